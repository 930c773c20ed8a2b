#include "glt/macs.hpp"

#include <stdexcept>

namespace glt {

std::uint64_t compute_macs(const Graph& g_pruned, const std::vector<std::uint8_t>& param_mask,
                           idx F, idx H, idx C) {
    const std::uint64_t d = static_cast<std::uint64_t>(F) * H + static_cast<std::uint64_t>(H) * C;
    if (param_mask.size() != d) throw std::runtime_error("param mask length != F*H + H*C");
    std::uint64_t nnz_w0 = 0, nnz_w1 = 0;
    const std::uint64_t split = static_cast<std::uint64_t>(F) * H;
    for (std::uint64_t i = 0; i < d; ++i) {
        if (!param_mask[i]) continue;
        if (i < split)
            ++nnz_w0;
        else
            ++nnz_w1;
    }
    const std::uint64_t n = static_cast<std::uint64_t>(g_pruned.num_nodes);
    const std::uint64_t agg_nnz = 2ull * static_cast<std::uint64_t>(g_pruned.num_edges()) + n;
    return agg_nnz * static_cast<std::uint64_t>(H + C) + (nnz_w0 + nnz_w1) * n;
}

std::uint64_t compute_macs_dense(const Graph& g, idx F, idx H, idx C) {
    std::vector<std::uint8_t> all(static_cast<std::size_t>(F * H + H * C), 1);
    return compute_macs(g, all, F, H, C);
}

}  // namespace glt
