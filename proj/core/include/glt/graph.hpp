#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glt/csr.hpp"

namespace glt {

// Canonical undirected edge: i < j always.
struct Edge {
    idx i = 0;
    idx j = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Undirected graph with optional node features, labels, and split masks.
// edge_list is the canonical edge identity everywhere: sorted (min,max)
// pairs, no self-loops, no duplicates. adj_* is its symmetrization (2M
// directed entries, neighbor lists ascending). Immutable after construction.
struct Graph {
    idx num_nodes = 0;
    std::vector<Edge> edge_list;
    std::vector<idx> adj_ptr;
    std::vector<idx> adj_idx;

    Csr features;                     // num_nodes x F; 0 cols when absent
    std::vector<int> labels;          // -1 marks unlabeled nodes
    idx num_classes = 0;
    std::vector<std::uint8_t> train_mask, val_mask, test_mask;

    idx num_edges() const { return static_cast<idx>(edge_list.size()); }
    idx num_features() const { return features.cols; }
    bool has_features() const { return features.cols > 0; }
    idx degree(idx v) const { return adj_ptr[v + 1] - adj_ptr[v]; }
};

// Builds the canonical representation from raw (i,j) pairs in any order and
// orientation. Throws on self-loops, duplicates, or out-of-range endpoints.
Graph graph_from_edges(idx num_nodes, std::vector<Edge> edges);

// Loads the TSV dataset directory layout (edges.tsv, features.tsv,
// labels.tsv, split.tsv). Features are l1 row-normalized here. Errors carry
// the offending file and line.
Graph load_graph(const std::string& dataset_dir);

// Structure-only variant used by the converter and by synthetic fixtures:
// reads a single edges.tsv-format file plus a node count.
Graph load_edges_tsv(const std::string& path, idx num_nodes);

std::vector<idx> degrees(const Graph& g);

// (|N(i)| + |N(j)|) / 2. The edge must exist.
double edge_degree(const Graph& g, Edge e);

// Mean neighbor degree of each endpoint, averaged. Both endpoints need
// degree >= 1.
double edge_degree_2hop(const Graph& g, Edge e);

// sqrt((deg_max + 1) / (deg_min + 1)) over all nodes.
double degree_ratio_bound(const Graph& g);

enum class OperatorKind {
    row_normalized,        // D^-1 A, all-zero rows for isolated nodes
    sym_self_loop,         // Dt^-1/2 (A+I) Dt^-1/2 with Dt = D + I
    normalized_laplacian,  // I - D^-1/2 A D^-1/2, zero row for isolated nodes
};

Csr normalized_operator(const Graph& g, OperatorKind kind);

// Same nodes/features/labels/masks, edges filtered to keep[e] == 1.
Graph remove_edges(const Graph& g, const std::vector<std::uint8_t>& keep);

// True if (i,j) normalized to (min,max) is in edge_list; index via binary search.
bool has_edge(const Graph& g, Edge e);
idx edge_index(const Graph& g, Edge e);  // -1 if absent

}  // namespace glt
