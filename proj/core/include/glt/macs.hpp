#pragma once

#include <cstdint>
#include <vector>

#include "glt/graph.hpp"

namespace glt {

// Inference-cost model, multiply-accumulates only. Per layer: aggregation
// costs nnz(A' + I) * F_out over the directed entries (2M' + N), transform
// costs nnz(W_layer) * N. Activations and softmax are not counted.
std::uint64_t compute_macs(const Graph& g_pruned, const std::vector<std::uint8_t>& param_mask,
                           idx F, idx H, idx C);

// Dense-parameter convenience: every weight counts.
std::uint64_t compute_macs_dense(const Graph& g, idx F, idx H, idx C);

}  // namespace glt
