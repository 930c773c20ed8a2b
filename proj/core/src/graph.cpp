#include "glt/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

namespace glt {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

[[noreturn]] void fail_at(const std::string& file, std::size_t line, const std::string& msg) {
    fail(file + ":" + std::to_string(line) + ": " + msg);
}

// Whitespace-separated tokens; from_chars keeps this locale-free.
struct LineScanner {
    const char* p;
    const char* end;
    explicit LineScanner(const std::string& s) : p(s.data()), end(s.data() + s.size()) {}

    bool next_double(double& out) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p >= end) return false;
        auto [q, ec] = std::from_chars(p, end, out);
        if (ec != std::errc()) return false;
        p = q;
        return true;
    }

    bool next_int(idx& out) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p >= end) return false;
        auto [q, ec] = std::from_chars(p, end, out);
        if (ec != std::errc()) return false;
        p = q;
        return true;
    }

    bool next_word(std::string& out) {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p >= end) return false;
        const char* start = p;
        while (p < end && *p != ' ' && *p != '\t' && *p != '\r') ++p;
        out.assign(start, p);
        return true;
    }

    bool at_end() {
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        return p >= end;
    }
};

std::ifstream open_or_fail(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("missing file: " + path);
    return in;
}

void build_adjacency(Graph& g) {
    const idx n = g.num_nodes;
    g.adj_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (const Edge& e : g.edge_list) {
        ++g.adj_ptr[e.i + 1];
        ++g.adj_ptr[e.j + 1];
    }
    for (idx v = 0; v < n; ++v) g.adj_ptr[v + 1] += g.adj_ptr[v];
    g.adj_idx.resize(g.edge_list.size() * 2);
    std::vector<idx> cursor(g.adj_ptr.begin(), g.adj_ptr.end() - 1);
    // edge_list is sorted, so per-node neighbor lists come out ascending for
    // the i side; the j side needs the second pass ordering below.
    for (const Edge& e : g.edge_list) {
        g.adj_idx[cursor[e.i]++] = e.j;
        g.adj_idx[cursor[e.j]++] = e.i;
    }
    for (idx v = 0; v < n; ++v)
        std::sort(g.adj_idx.begin() + g.adj_ptr[v], g.adj_idx.begin() + g.adj_ptr[v + 1]);
}

}  // namespace

Graph graph_from_edges(idx num_nodes, std::vector<Edge> edges) {
    if (num_nodes < 0) fail("negative node count");
    for (Edge& e : edges) {
        if (e.i == e.j) fail("self-loop at node " + std::to_string(e.i));
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= num_nodes)
            fail("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                 ") out of range for N=" + std::to_string(num_nodes));
    }
    std::sort(edges.begin(), edges.end());
    auto dup = std::adjacent_find(edges.begin(), edges.end());
    if (dup != edges.end())
        fail("duplicate edge (" + std::to_string(dup->i) + "," + std::to_string(dup->j) + ")");
    Graph g;
    g.num_nodes = num_nodes;
    g.edge_list = std::move(edges);
    build_adjacency(g);
    return g;
}

Graph load_edges_tsv(const std::string& path, idx num_nodes) {
    std::ifstream in = open_or_fail(path);
    std::vector<Edge> edges;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        LineScanner sc(line);
        if (sc.at_end()) continue;
        Edge e;
        if (!sc.next_int(e.i) || !sc.next_int(e.j) || !sc.at_end())
            fail_at(path, lineno, "expected two node ids");
        if (e.i == e.j) fail_at(path, lineno, "self-loop");
        if (e.i > e.j) std::swap(e.i, e.j);
        if (e.i < 0 || e.j >= num_nodes) fail_at(path, lineno, "node index out of range");
        edges.push_back(e);
    }
    std::sort(edges.begin(), edges.end());
    auto dup = std::adjacent_find(edges.begin(), edges.end());
    if (dup != edges.end())
        fail(path + ": duplicate edge (" + std::to_string(dup->i) + "," + std::to_string(dup->j) +
             ")");
    Graph g;
    g.num_nodes = num_nodes;
    g.edge_list = std::move(edges);
    build_adjacency(g);
    return g;
}

Graph load_graph(const std::string& dataset_dir) {
    const std::string feat_path = dataset_dir + "/features.tsv";
    const std::string edge_path = dataset_dir + "/edges.tsv";
    const std::string label_path = dataset_dir + "/labels.tsv";
    const std::string split_path = dataset_dir + "/split.tsv";

    // features.tsv fixes N and F; every node must appear exactly once.
    std::ifstream fin = open_or_fail(feat_path);
    std::string line;
    std::size_t lineno = 0;
    idx num_cols = -1;
    std::vector<idx> row_of_node;  // node id -> dense row written so far
    std::vector<idx> order;
    std::vector<idx> fptr{0};
    std::vector<idx> fidx;
    std::vector<double> fval;
    std::vector<double> row_buf;
    while (std::getline(fin, line)) {
        ++lineno;
        LineScanner sc(line);
        if (sc.at_end()) continue;
        idx node;
        if (!sc.next_int(node)) fail_at(feat_path, lineno, "expected node id");
        if (node < 0) fail_at(feat_path, lineno, "node index out of range");
        row_buf.clear();
        double v;
        while (sc.next_double(v)) row_buf.push_back(v);
        if (!sc.at_end()) fail_at(feat_path, lineno, "non-numeric feature value");
        if (num_cols < 0) num_cols = static_cast<idx>(row_buf.size());
        if (static_cast<idx>(row_buf.size()) != num_cols)
            fail_at(feat_path, lineno, "inconsistent feature count");
        for (double x : row_buf)
            if (!std::isfinite(x)) fail_at(feat_path, lineno, "non-finite feature");
        // l1 row normalization; all-zero rows stay zero.
        double sum = 0.0;
        for (double x : row_buf) sum += std::abs(x);
        for (idx c = 0; c < num_cols; ++c) {
            if (row_buf[c] != 0.0) {
                fidx.push_back(c);
                fval.push_back(row_buf[c] / sum);
            }
        }
        fptr.push_back(static_cast<idx>(fidx.size()));
        if (node >= static_cast<idx>(row_of_node.size())) row_of_node.resize(node + 1, -1);
        if (row_of_node[node] != -1) fail_at(feat_path, lineno, "duplicate node id");
        row_of_node[node] = static_cast<idx>(order.size());
        order.push_back(node);
    }
    const idx n = static_cast<idx>(order.size());
    if (n == 0) fail(feat_path + ": no feature rows");
    for (idx node = 0; node < static_cast<idx>(row_of_node.size()); ++node)
        if (row_of_node[node] == -1) fail(feat_path + ": missing node " + std::to_string(node));
    if (static_cast<idx>(row_of_node.size()) != n)
        fail(feat_path + ": node ids must cover 0.." + std::to_string(n - 1));

    Graph g = load_edges_tsv(edge_path, n);

    // Rows may appear in any node order in the file; store in node order.
    g.features.rows = n;
    g.features.cols = num_cols;
    g.features.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
    for (idx node = 0; node < n; ++node) {
        idx r = row_of_node[node];
        g.features.row_ptr[node + 1] = g.features.row_ptr[node] + (fptr[r + 1] - fptr[r]);
    }
    g.features.col_idx.resize(fidx.size());
    g.features.vals.resize(fval.size());
    for (idx node = 0; node < n; ++node) {
        idx r = row_of_node[node];
        idx dst = g.features.row_ptr[node];
        for (idx k = fptr[r]; k < fptr[r + 1]; ++k, ++dst) {
            g.features.col_idx[dst] = fidx[k];
            g.features.vals[dst] = fval[k];
        }
    }

    g.labels.assign(n, -1);
    std::ifstream lin = open_or_fail(label_path);
    lineno = 0;
    std::vector<std::uint8_t> seen(n, 0);
    while (std::getline(lin, line)) {
        ++lineno;
        LineScanner sc(line);
        if (sc.at_end()) continue;
        idx node, lab;
        if (!sc.next_int(node) || !sc.next_int(lab) || !sc.at_end())
            fail_at(label_path, lineno, "expected node id and class id");
        if (node < 0 || node >= n) fail_at(label_path, lineno, "node index out of range");
        if (seen[node]) fail_at(label_path, lineno, "duplicate label for node");
        seen[node] = 1;
        if (lab < -1) fail_at(label_path, lineno, "bad class id");
        g.labels[node] = static_cast<int>(lab);
        g.num_classes = std::max(g.num_classes, lab + 1);
    }

    g.train_mask.assign(n, 0);
    g.val_mask.assign(n, 0);
    g.test_mask.assign(n, 0);
    std::ifstream sin = open_or_fail(split_path);
    lineno = 0;
    while (std::getline(sin, line)) {
        ++lineno;
        LineScanner sc(line);
        if (sc.at_end()) continue;
        idx node;
        std::string role;
        if (!sc.next_int(node) || !sc.next_word(role) || !sc.at_end())
            fail_at(split_path, lineno, "expected node id and role");
        if (node < 0 || node >= n) fail_at(split_path, lineno, "node index out of range");
        if (g.train_mask[node] || g.val_mask[node] || g.test_mask[node])
            fail_at(split_path, lineno, "node assigned to two splits");
        if (role == "train")
            g.train_mask[node] = 1;
        else if (role == "val")
            g.val_mask[node] = 1;
        else if (role == "test")
            g.test_mask[node] = 1;
        else
            fail_at(split_path, lineno, "unknown role '" + role + "'");
        if (g.labels[node] < 0) fail_at(split_path, lineno, "split node has no label");
    }
    return g;
}

std::vector<idx> degrees(const Graph& g) {
    std::vector<idx> d(g.num_nodes);
    for (idx v = 0; v < g.num_nodes; ++v) d[v] = g.degree(v);
    return d;
}

idx edge_index(const Graph& g, Edge e) {
    if (e.i > e.j) std::swap(e.i, e.j);
    auto it = std::lower_bound(g.edge_list.begin(), g.edge_list.end(), e);
    if (it == g.edge_list.end() || !(*it == e)) return -1;
    return it - g.edge_list.begin();
}

bool has_edge(const Graph& g, Edge e) { return edge_index(g, e) >= 0; }

double edge_degree(const Graph& g, Edge e) {
    if (!has_edge(g, e))
        fail("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") not present");
    return 0.5 * static_cast<double>(g.degree(e.i) + g.degree(e.j));
}

double edge_degree_2hop(const Graph& g, Edge e) {
    if (!has_edge(g, e))
        fail("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") not present");
    auto mean_nbr_deg = [&](idx v) {
        idx d = g.degree(v);
        if (d == 0) fail("undefined 2-hop degree: isolated endpoint " + std::to_string(v));
        double acc = 0.0;
        for (idx k = g.adj_ptr[v]; k < g.adj_ptr[v + 1]; ++k)
            acc += static_cast<double>(g.degree(g.adj_idx[k]));
        return acc / static_cast<double>(d);
    };
    return 0.5 * (mean_nbr_deg(e.i) + mean_nbr_deg(e.j));
}

double degree_ratio_bound(const Graph& g) {
    if (g.num_nodes < 1) fail("degree_ratio_bound needs at least one node");
    idx dmax = 0, dmin = g.num_nodes;
    for (idx v = 0; v < g.num_nodes; ++v) {
        idx d = g.degree(v);
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    return std::sqrt(static_cast<double>(dmax + 1) / static_cast<double>(dmin + 1));
}

Csr normalized_operator(const Graph& g, OperatorKind kind) {
    const idx n = g.num_nodes;
    Csr m;
    m.rows = n;
    m.cols = n;
    m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);

    switch (kind) {
        case OperatorKind::row_normalized: {
            m.col_idx.reserve(g.adj_idx.size());
            m.vals.reserve(g.adj_idx.size());
            for (idx v = 0; v < n; ++v) {
                const double inv = g.degree(v) ? 1.0 / static_cast<double>(g.degree(v)) : 0.0;
                for (idx k = g.adj_ptr[v]; k < g.adj_ptr[v + 1]; ++k) {
                    m.col_idx.push_back(g.adj_idx[k]);
                    m.vals.push_back(inv);
                }
                m.row_ptr[v + 1] = static_cast<idx>(m.col_idx.size());
            }
            return m;
        }
        case OperatorKind::sym_self_loop: {
            std::vector<double> s(n);
            for (idx v = 0; v < n; ++v) s[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
            m.col_idx.reserve(g.adj_idx.size() + n);
            m.vals.reserve(g.adj_idx.size() + n);
            for (idx v = 0; v < n; ++v) {
                bool diag_done = false;
                for (idx k = g.adj_ptr[v]; k < g.adj_ptr[v + 1]; ++k) {
                    idx u = g.adj_idx[k];
                    if (!diag_done && u > v) {
                        m.col_idx.push_back(v);
                        m.vals.push_back(s[v] * s[v]);
                        diag_done = true;
                    }
                    m.col_idx.push_back(u);
                    m.vals.push_back(s[v] * s[u]);
                }
                if (!diag_done) {
                    m.col_idx.push_back(v);
                    m.vals.push_back(s[v] * s[v]);
                }
                m.row_ptr[v + 1] = static_cast<idx>(m.col_idx.size());
            }
            return m;
        }
        case OperatorKind::normalized_laplacian: {
            std::vector<double> s(n, 0.0);
            for (idx v = 0; v < n; ++v)
                if (g.degree(v)) s[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));
            m.col_idx.reserve(g.adj_idx.size() + n);
            m.vals.reserve(g.adj_idx.size() + n);
            for (idx v = 0; v < n; ++v) {
                bool diag_done = g.degree(v) == 0;  // isolated rows are all-zero
                for (idx k = g.adj_ptr[v]; k < g.adj_ptr[v + 1]; ++k) {
                    idx u = g.adj_idx[k];
                    if (!diag_done && u > v) {
                        m.col_idx.push_back(v);
                        m.vals.push_back(1.0);
                        diag_done = true;
                    }
                    m.col_idx.push_back(u);
                    m.vals.push_back(-s[v] * s[u]);
                }
                if (!diag_done) {
                    m.col_idx.push_back(v);
                    m.vals.push_back(1.0);
                }
                m.row_ptr[v + 1] = static_cast<idx>(m.col_idx.size());
            }
            return m;
        }
    }
    fail("unknown operator kind");
}

Graph remove_edges(const Graph& g, const std::vector<std::uint8_t>& keep) {
    if (static_cast<idx>(keep.size()) != g.num_edges()) fail("keep mask length mismatch");
    Graph out;
    out.num_nodes = g.num_nodes;
    out.edge_list.reserve(g.edge_list.size());
    for (idx e = 0; e < g.num_edges(); ++e)
        if (keep[e]) out.edge_list.push_back(g.edge_list[e]);
    build_adjacency(out);
    out.features = g.features;
    out.labels = g.labels;
    out.num_classes = g.num_classes;
    out.train_mask = g.train_mask;
    out.val_mask = g.val_mask;
    out.test_mask = g.test_mask;
    return out;
}

}  // namespace glt
