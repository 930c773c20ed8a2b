#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "glt/graph.hpp"

namespace glt {

// Per-edge scores aligned to Graph.edge_list. The node-level intermediates
// g, gbar, gtilde are kept for diagnostics and oracle tests; baselines leave
// them empty.
struct EdgeScoreTable {
    std::string scorer_tag;
    std::vector<double> scores;
    std::vector<double> g, gbar, gtilde;
};

struct EdgeMask {
    std::vector<std::uint8_t> keep;
    double graph_sparsity = 0.0;  // ceil(p_g * M) / M

    idx num_pruned() const {
        idx c = 0;
        for (auto k : keep) c += !k;
        return c;
    }
};

enum class ScorerKind { teddy, random_uniform, lowest_degree, highest_degree, one_hop_degree };

ScorerKind scorer_from_string(const std::string& name);
std::string scorer_name(ScorerKind kind);

// g(v) = 1/sqrt(deg v), 0 for isolated nodes.
std::vector<double> node_score_g(const Graph& g);

// gbar = D^-1 A g; 0 where the neighborhood is empty.
std::vector<double> neighbor_avg_gbar(const Graph& g, const std::vector<double>& gvec);

// gtilde(v) = gbar(v)/deg(v), 0 for isolated nodes.
std::vector<double> node_score_gtilde(const Graph& g, const std::vector<double>& gbar);

// score(i,j) = gtilde(i) * gtilde(j) on existing edges only; O(N+M).
EdgeScoreTable teddy_scores(const Graph& g);

// random_uniform draws a counter-based value per edge index, so scores are
// independent of evaluation order; the other kinds are edge-degree
// transformations with polarity arranged for smallest-score-first pruning.
EdgeScoreTable baseline_scores(const Graph& g, ScorerKind kind, std::uint64_t seed = 0);

EdgeScoreTable compute_scores(const Graph& g, ScorerKind kind, std::uint64_t seed = 0);

// Edges removed by pruning at ratio p_g (one-shot, Algorithm "smallest
// ceil(p_g M) scores, ties by ascending edge index").
idx num_edges_to_prune(double p_g, idx num_edges);

struct PruneResult {
    Graph graph;
    EdgeMask mask;
};

PruneResult prune_edges(const Graph& g, const EdgeScoreTable& t, double p_g);

// Mean edge_degree over pruned edges, measured on the original graph.
// Returns 0 when nothing was pruned.
double mean_pruned_edge_degree(const Graph& g, const EdgeMask& mask);

void write_scores_tsv(const std::string& path, const Graph& g, const EdgeScoreTable& t);

// Call counter used to assert the one-shot property in tests.
std::uint64_t teddy_score_invocations();
void reset_teddy_score_invocations();

}  // namespace glt
