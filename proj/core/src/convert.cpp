#include "glt/convert.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "glt/graph.hpp"

namespace glt {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

std::string format_value(double v) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
        return std::to_string(static_cast<long long>(v));
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ConvertStats convert_linqs(const std::string& in_dir, const std::string& out_dir,
                           const ConvertOptions& opt) {
    std::string content_path, cites_path;
    for (const auto& entry : fs::directory_iterator(in_dir)) {
        const std::string p = entry.path().string();
        if (p.ends_with(".content")) {
            if (!content_path.empty()) throw std::runtime_error(in_dir + ": multiple .content files");
            content_path = p;
        } else if (p.ends_with(".cites")) {
            if (!cites_path.empty()) throw std::runtime_error(in_dir + ": multiple .cites files");
            cites_path = p;
        }
    }
    if (content_path.empty() || cites_path.empty())
        throw std::runtime_error(in_dir + ": unrecognized layout, need <name>.content and <name>.cites");

    std::ifstream content(content_path);
    if (!content) throw std::runtime_error("cannot open " + content_path);

    std::unordered_map<std::string, idx> node_of_paper;
    std::vector<std::vector<double>> features;
    std::vector<std::string> label_strings;
    std::string line;
    std::size_t lineno = 0;
    idx num_feats = -1;
    while (std::getline(content, line)) {
        ++lineno;
        std::vector<std::string> tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() < 3)
            throw std::runtime_error(content_path + ":" + std::to_string(lineno) + ": short row");
        const std::string& paper = tok.front();
        const std::string& label = tok.back();
        if (node_of_paper.count(paper))
            throw std::runtime_error(content_path + ":" + std::to_string(lineno) +
                                     ": duplicate paper id " + paper);
        std::vector<double> row(tok.size() - 2);
        for (std::size_t c = 1; c + 1 < tok.size(); ++c) {
            double v;
            auto [q, ec] = std::from_chars(tok[c].data(), tok[c].data() + tok[c].size(), v);
            if (ec != std::errc() || q != tok[c].data() + tok[c].size())
                throw std::runtime_error(content_path + ":" + std::to_string(lineno) +
                                         ": bad feature value " + tok[c]);
            row[c - 1] = v;
        }
        if (num_feats < 0) num_feats = static_cast<idx>(row.size());
        if (static_cast<idx>(row.size()) != num_feats)
            throw std::runtime_error(content_path + ":" + std::to_string(lineno) +
                                     ": inconsistent feature count");
        node_of_paper.emplace(paper, static_cast<idx>(features.size()));
        features.push_back(std::move(row));
        label_strings.push_back(label);
    }
    const idx n = static_cast<idx>(features.size());
    if (n == 0) throw std::runtime_error(content_path + ": empty");

    // Class ids by sorted label string, independent of row order.
    std::map<std::string, int> class_of;
    for (const auto& s : label_strings) class_of.emplace(s, 0);
    int next_class = 0;
    for (auto& [name, id] : class_of) id = next_class++;
    std::vector<int> labels(n);
    for (idx v = 0; v < n; ++v) labels[v] = class_of.at(label_strings[v]);

    ConvertStats st;
    st.num_nodes = n;
    st.num_classes = next_class;
    st.num_features = num_feats;

    std::ifstream cites(cites_path);
    if (!cites) throw std::runtime_error("cannot open " + cites_path);
    std::set<Edge> edges;
    lineno = 0;
    while (std::getline(cites, line)) {
        ++lineno;
        std::vector<std::string> tok = split_ws(line);
        if (tok.empty()) continue;
        if (tok.size() != 2)
            throw std::runtime_error(cites_path + ":" + std::to_string(lineno) +
                                     ": expected two paper ids");
        auto a = node_of_paper.find(tok[0]);
        auto b = node_of_paper.find(tok[1]);
        if (a == node_of_paper.end() || b == node_of_paper.end()) {
            ++st.skipped_unknown;
            continue;
        }
        if (a->second == b->second) {
            ++st.skipped_self;
            continue;
        }
        Edge e{std::min(a->second, b->second), std::max(a->second, b->second)};
        if (!edges.insert(e).second) ++st.skipped_duplicate;
    }
    st.num_edges = static_cast<idx>(edges.size());

    // Split by file order: per-class quota, then val, then test.
    std::vector<std::string> role(n);
    std::vector<idx> quota(next_class, opt.train_per_class);
    for (idx v = 0; v < n; ++v) {
        if (quota[labels[v]] > 0) {
            role[v] = "train";
            --quota[labels[v]];
        }
    }
    idx val_left = opt.val_size, test_left = opt.test_size;
    for (idx v = 0; v < n; ++v) {
        if (!role[v].empty()) continue;
        if (val_left > 0) {
            role[v] = "val";
            --val_left;
        } else if (test_left > 0) {
            role[v] = "test";
            --test_left;
        }
    }

    fs::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/edges.tsv");
        if (!out) throw std::runtime_error("cannot open " + out_dir + "/edges.tsv");
        for (const Edge& e : edges) out << e.i << '\t' << e.j << '\n';
    }
    {
        std::ofstream out(out_dir + "/features.tsv");
        if (!out) throw std::runtime_error("cannot open " + out_dir + "/features.tsv");
        for (idx v = 0; v < n; ++v) {
            out << v;
            for (double x : features[v]) out << '\t' << format_value(x);
            out << '\n';
        }
    }
    {
        std::ofstream out(out_dir + "/labels.tsv");
        if (!out) throw std::runtime_error("cannot open " + out_dir + "/labels.tsv");
        for (idx v = 0; v < n; ++v) out << v << '\t' << labels[v] << '\n';
    }
    {
        std::ofstream out(out_dir + "/split.tsv");
        if (!out) throw std::runtime_error("cannot open " + out_dir + "/split.tsv");
        for (idx v = 0; v < n; ++v)
            if (!role[v].empty()) out << v << '\t' << role[v] << '\n';
    }
    return st;
}

}  // namespace glt
