#include "glt/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace glt {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& where, const std::string& msg) {
    throw ConfigError(where + ": " + msg);
}

// Tracks which keys a spec consumed so leftovers can be reported as unknown.
class SectionReader {
public:
    SectionReader(const ConfigFile& cfg, const std::string& name) : name_(name) {
        auto it = cfg.sections.find(name);
        if (it != cfg.sections.end()) kv_ = &it->second;
    }

    bool present() const { return kv_ != nullptr; }

    const std::string* raw(const std::string& key) {
        if (!kv_) return nullptr;
        auto it = kv_->find(key);
        if (it == kv_->end()) return nullptr;
        used_.insert(key);
        return &it->second;
    }

    std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

    bool get(const std::string& key, std::string& out) {
        const std::string* v = raw(key);
        if (!v) return false;
        out = *v;
        return true;
    }

    bool get(const std::string& key, double& out) {
        const std::string* v = raw(key);
        if (!v) return false;
        auto [q, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || q != v->data() + v->size()) bad(where(key), "expected a number, got '" + *v + "'");
        return true;
    }

    bool get(const std::string& key, idx& out) {
        const std::string* v = raw(key);
        if (!v) return false;
        auto [q, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || q != v->data() + v->size()) bad(where(key), "expected an integer, got '" + *v + "'");
        return true;
    }

    bool get(const std::string& key, std::uint64_t& out) {
        const std::string* v = raw(key);
        if (!v) return false;
        auto [q, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc() || q != v->data() + v->size())
            bad(where(key), "expected a nonnegative integer, got '" + *v + "'");
        return true;
    }

    bool get(const std::string& key, bool& out) {
        const std::string* v = raw(key);
        if (!v) return false;
        if (*v == "true" || *v == "1")
            out = true;
        else if (*v == "false" || *v == "0")
            out = false;
        else
            bad(where(key), "expected true/false, got '" + *v + "'");
        return true;
    }

    void finish() const {
        if (!kv_) return;
        for (const auto& [key, value] : *kv_)
            if (!used_.count(key)) bad(where(key), "unknown key");
    }

private:
    std::string name_;
    const std::map<std::string, std::string>* kv_ = nullptr;
    std::set<std::string> used_;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Shared hyperparameter keys accepted in a [run] section.
void read_hyperparams(SectionReader& sec, RunConfig& run) {
    sec.get("lr", run.lr);
    std::string opt;
    if (sec.get("optimizer", opt)) {
        if (opt == "adam")
            run.optimizer = OptimizerKind::adam;
        else if (opt == "sgd")
            run.optimizer = OptimizerKind::sgd;
        else
            bad(sec.where("optimizer"), "expected adam or sgd, got '" + opt + "'");
    }
    sec.get("beta1", run.beta1);
    sec.get("beta2", run.beta2);
    sec.get("adam_eps", run.adam_eps);
    sec.get("epochs", run.epochs);
    sec.get("lambda_dt", run.lambda_dt);
    sec.get("tau", run.tau);
    sec.get("hidden", run.hidden);
    sec.get("eval_every", run.eval_every);
    sec.get("warm_start", run.warm_start);
}

void validate_run(const RunConfig& run) {
    try {
        run.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

}  // namespace

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string at = origin + ":" + std::to_string(lineno);
        if (line.front() == '[') {
            if (line.back() != ']') bad(at, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) bad(at, "empty section name");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) bad(at, "expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) bad(at, "empty key");
        if (section.empty()) bad(at, "key outside any [section]");
        if (!cfg.sections[section].emplace(key, value).second)
            bad(at, "duplicate key '" + key + "'");
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

CliRunSpec parse_run_spec(const ConfigFile& cfg) {
    SectionReader sec(cfg, "run");
    if (!sec.present()) throw ConfigError("missing [run] section");
    CliRunSpec spec;
    if (!sec.get("dataset", spec.dataset)) throw ConfigError("[run] dataset: required");
    sec.get("name", spec.dataset_name);
    if (spec.dataset_name.empty())
        spec.dataset_name = std::filesystem::path(spec.dataset).filename().string();
    sec.get("out_dir", spec.out_dir);
    sec.get("metrics_csv", spec.metrics_csv);

    std::string scorer;
    if (sec.get("scorer", scorer)) {
        try {
            spec.scorer = scorer_from_string(scorer);
        } catch (const std::exception& e) {
            bad(sec.where("scorer"), e.what());
        }
    }

    bool has_k = sec.get("k", spec.k);
    bool has_pg = sec.get("p_g", spec.run.p_g);
    if (has_k && has_pg) throw ConfigError("[run]: set either k or p_g, not both");
    if (has_k) {
        if (spec.k < 0) bad(sec.where("k"), "must be >= 0");
        spec.run.p_g = sparsity_target(spec.k);
    }
    sec.get("p_theta", spec.run.p_theta);
    sec.get("seed", spec.run.seed);
    read_hyperparams(sec, spec.run);
    sec.finish();
    validate_run(spec.run);
    return spec;
}

CliSweepSpec parse_sweep_spec(const ConfigFile& cfg) {
    SectionReader sec(cfg, "sweep");
    if (!sec.present()) throw ConfigError("missing [sweep] section");
    CliSweepSpec spec;
    if (!sec.get("dataset", spec.dataset)) throw ConfigError("[sweep] dataset: required");
    sec.get("name", spec.dataset_name);
    if (spec.dataset_name.empty())
        spec.dataset_name = std::filesystem::path(spec.dataset).filename().string();
    if (!sec.get("out_csv", spec.out_csv)) throw ConfigError("[sweep] out_csv: required");

    std::string raw;
    if (!sec.get("scorers", raw)) throw ConfigError("[sweep] scorers: required");
    for (const std::string& s : split_list(raw)) {
        try {
            spec.scorers.push_back(scorer_from_string(s));
        } catch (const std::exception& e) {
            bad(sec.where("scorers"), e.what());
        }
    }
    if (spec.scorers.empty()) bad(sec.where("scorers"), "empty list");

    if (!sec.get("k_grid", raw)) throw ConfigError("[sweep] k_grid: required");
    for (const std::string& s : split_list(raw)) {
        idx k;
        auto [q, ec] = std::from_chars(s.data(), s.data() + s.size(), k);
        if (ec != std::errc() || q != s.data() + s.size() || k < 0)
            bad(sec.where("k_grid"), "bad simulation index '" + s + "'");
        spec.k_grid.push_back(k);
    }
    if (spec.k_grid.empty()) bad(sec.where("k_grid"), "empty list");

    if (!sec.get("seeds", raw)) throw ConfigError("[sweep] seeds: required");
    for (const std::string& s : split_list(raw)) {
        std::uint64_t seed;
        auto [q, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
        if (ec != std::errc() || q != s.data() + s.size())
            bad(sec.where("seeds"), "bad seed '" + s + "'");
        spec.seeds.push_back(seed);
    }
    if (spec.seeds.empty()) bad(sec.where("seeds"), "empty list");

    std::string mode;
    if (sec.get("p_theta_mode", mode)) {
        if (mode == "zero")
            spec.p_theta_mode = CliSweepSpec::PThetaMode::zero;
        else if (mode == "match_k")
            spec.p_theta_mode = CliSweepSpec::PThetaMode::match_k;
        else if (mode == "fixed")
            spec.p_theta_mode = CliSweepSpec::PThetaMode::fixed;
        else
            bad(sec.where("p_theta_mode"), "expected zero, match_k, or fixed");
    }
    bool has_fixed = sec.get("p_theta", spec.p_theta_value);
    if (spec.p_theta_mode == CliSweepSpec::PThetaMode::fixed && !has_fixed)
        throw ConfigError("[sweep] p_theta: required when p_theta_mode = fixed");
    if (has_fixed && spec.p_theta_mode != CliSweepSpec::PThetaMode::fixed)
        throw ConfigError("[sweep] p_theta: only allowed when p_theta_mode = fixed");
    if (has_fixed && (spec.p_theta_value < 0.0 || spec.p_theta_value >= 1.0))
        bad(sec.where("p_theta"), "must be in [0,1)");
    sec.finish();

    SectionReader runsec(cfg, "run");
    read_hyperparams(runsec, spec.base);
    runsec.finish();
    validate_run(spec.base);
    return spec;
}

}  // namespace glt
