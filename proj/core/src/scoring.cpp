#include "glt/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "glt/rng.hpp"

namespace glt {

namespace {
std::atomic<std::uint64_t> g_teddy_calls{0};
}

std::uint64_t teddy_score_invocations() { return g_teddy_calls.load(); }
void reset_teddy_score_invocations() { g_teddy_calls.store(0); }

ScorerKind scorer_from_string(const std::string& name) {
    if (name == "teddy") return ScorerKind::teddy;
    if (name == "random") return ScorerKind::random_uniform;
    if (name == "lowest_degree") return ScorerKind::lowest_degree;
    if (name == "highest_degree") return ScorerKind::highest_degree;
    if (name == "one_hop_degree") return ScorerKind::one_hop_degree;
    throw std::runtime_error("unknown scorer '" + name + "'");
}

std::string scorer_name(ScorerKind kind) {
    switch (kind) {
        case ScorerKind::teddy: return "teddy";
        case ScorerKind::random_uniform: return "random";
        case ScorerKind::lowest_degree: return "lowest_degree";
        case ScorerKind::highest_degree: return "highest_degree";
        case ScorerKind::one_hop_degree: return "one_hop_degree";
    }
    throw std::runtime_error("unknown scorer kind");
}

std::vector<double> node_score_g(const Graph& g) {
    std::vector<double> out(g.num_nodes, 0.0);
    for (idx v = 0; v < g.num_nodes; ++v) {
        idx d = g.degree(v);
        if (d > 0) out[v] = 1.0 / std::sqrt(static_cast<double>(d));
    }
    return out;
}

std::vector<double> neighbor_avg_gbar(const Graph& g, const std::vector<double>& gvec) {
    if (static_cast<idx>(gvec.size()) != g.num_nodes)
        throw std::runtime_error("gvec length mismatch");
    std::vector<double> out(g.num_nodes, 0.0);
    for (idx v = 0; v < g.num_nodes; ++v) {
        idx d = g.degree(v);
        if (d == 0) continue;
        double acc = 0.0;
        for (idx k = g.adj_ptr[v]; k < g.adj_ptr[v + 1]; ++k) acc += gvec[g.adj_idx[k]];
        out[v] = acc / static_cast<double>(d);
    }
    return out;
}

std::vector<double> node_score_gtilde(const Graph& g, const std::vector<double>& gbar) {
    if (static_cast<idx>(gbar.size()) != g.num_nodes)
        throw std::runtime_error("gbar length mismatch");
    std::vector<double> out(g.num_nodes, 0.0);
    for (idx v = 0; v < g.num_nodes; ++v) {
        idx d = g.degree(v);
        if (d > 0) out[v] = gbar[v] / static_cast<double>(d);
    }
    return out;
}

EdgeScoreTable teddy_scores(const Graph& g) {
    ++g_teddy_calls;
    EdgeScoreTable t;
    t.scorer_tag = "teddy";
    t.g = node_score_g(g);
    t.gbar = neighbor_avg_gbar(g, t.g);
    t.gtilde = node_score_gtilde(g, t.gbar);
    t.scores.resize(g.edge_list.size());
    for (idx e = 0; e < g.num_edges(); ++e)
        t.scores[e] = t.gtilde[g.edge_list[e].i] * t.gtilde[g.edge_list[e].j];
    return t;
}

EdgeScoreTable baseline_scores(const Graph& g, ScorerKind kind, std::uint64_t seed) {
    EdgeScoreTable t;
    t.scorer_tag = scorer_name(kind);
    t.scores.resize(g.edge_list.size());
    auto edeg = [&](idx e) {
        return 0.5 * static_cast<double>(g.degree(g.edge_list[e].i) + g.degree(g.edge_list[e].j));
    };
    switch (kind) {
        case ScorerKind::random_uniform: {
            // Counter-based: score of edge e depends only on (seed, e), so a
            // parallel evaluation order cannot change the result.
            for (idx e = 0; e < g.num_edges(); ++e) {
                std::uint64_t bits = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(e)));
                t.scores[e] = static_cast<double>(bits >> 11) * 0x1.0p-53;
            }
            return t;
        }
        case ScorerKind::lowest_degree:
            for (idx e = 0; e < g.num_edges(); ++e) t.scores[e] = edeg(e);
            return t;
        case ScorerKind::highest_degree:
            for (idx e = 0; e < g.num_edges(); ++e) t.scores[e] = -edeg(e);
            return t;
        case ScorerKind::one_hop_degree:
            for (idx e = 0; e < g.num_edges(); ++e) t.scores[e] = 1.0 / edeg(e);
            return t;
        case ScorerKind::teddy:
            throw std::runtime_error("teddy is not a baseline scorer");
    }
    throw std::runtime_error("unknown scorer kind");
}

EdgeScoreTable compute_scores(const Graph& g, ScorerKind kind, std::uint64_t seed) {
    return kind == ScorerKind::teddy ? teddy_scores(g) : baseline_scores(g, kind, seed);
}

idx num_edges_to_prune(double p_g, idx num_edges) {
    if (p_g < 0.0 || p_g >= 1.0) throw std::runtime_error("p_g must be in [0,1)");
    return static_cast<idx>(std::ceil(p_g * static_cast<double>(num_edges)));
}

PruneResult prune_edges(const Graph& g, const EdgeScoreTable& t, double p_g) {
    const idx m = g.num_edges();
    if (static_cast<idx>(t.scores.size()) != m) throw std::runtime_error("score table length mismatch");
    const idx n_prune = num_edges_to_prune(p_g, m);

    std::vector<idx> order(m);
    std::iota(order.begin(), order.end(), 0);
    // Ascending score, ties by ascending canonical edge index.
    std::stable_sort(order.begin(), order.end(),
                     [&](idx a, idx b) { return t.scores[a] < t.scores[b]; });

    EdgeMask mask;
    mask.keep.assign(m, 1);
    for (idx r = 0; r < n_prune; ++r) mask.keep[order[r]] = 0;
    mask.graph_sparsity = m ? static_cast<double>(n_prune) / static_cast<double>(m) : 0.0;

    return PruneResult{remove_edges(g, mask.keep), std::move(mask)};
}

double mean_pruned_edge_degree(const Graph& g, const EdgeMask& mask) {
    if (static_cast<idx>(mask.keep.size()) != g.num_edges())
        throw std::runtime_error("mask length mismatch");
    double acc = 0.0;
    idx count = 0;
    for (idx e = 0; e < g.num_edges(); ++e) {
        if (!mask.keep[e]) {
            acc += 0.5 * static_cast<double>(g.degree(g.edge_list[e].i) + g.degree(g.edge_list[e].j));
            ++count;
        }
    }
    return count ? acc / static_cast<double>(count) : 0.0;
}

void write_scores_tsv(const std::string& path, const Graph& g, const EdgeScoreTable& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    for (idx e = 0; e < g.num_edges(); ++e)
        out << g.edge_list[e].i << '\t' << g.edge_list[e].j << '\t' << t.scores[e] << '\n';
}

}  // namespace glt
