#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "glt/gcn.hpp"
#include "glt/graph.hpp"
#include "glt/scoring.hpp"

namespace glt {

enum class OptimizerKind { adam, sgd };

// Hyperparameters of one pipeline run. Defaults follow the repo's pinned
// experiment settings (see README).
struct RunConfig {
    double lr = 0.01;
    OptimizerKind optimizer = OptimizerKind::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    idx epochs = 200;
    double lambda_dt = 1.0;
    double tau = 1.0;
    double p_g = 0.0;
    double p_theta = 0.0;
    std::uint64_t seed = 0;
    idx hidden = 128;
    idx eval_every = 1;
    bool warm_start = false;  // initialize the student from the teacher

    // Throws with the offending field named.
    void validate() const;
};

// Keeps the h largest-magnitude entries (ties to the lower index), zeros the
// rest: Euclidean projection onto the set of h-sparse vectors.
std::vector<double> project_l0(std::vector<double> theta, idx h);

idx l0_keep_count(double p_theta, idx d);  // ceil((1 - p_theta) * d)

// Sparsity level reached after k rounds of pruning `per_round` of what is
// left; the sweep grid is indexed by k.
double sparsity_target(idx k, double per_round = 0.05);

struct TrainResult {
    GcnParams params;  // best-validation weights
    Mat logits;        // their logits on the training graph
    double val_acc = 0.0;
    double test_acc = 0.0;
    idx best_epoch = 0;  // 0 only when epochs == 0
};

// Plain cross-entropy training on the full graph; best-validation selection
// over epochs 1..T (ties to the earliest), initialization returned for T=0.
TrainResult pretrain_dense(const Graph& g, const RunConfig& cfg);

// The full ticket: sparse graph plus sparse weights.
struct LotteryTicket {
    EdgeMask edge_mask;                    // aligned to the original edge list
    std::vector<std::uint8_t> param_mask;  // support of sparse_params, length d
    GcnParams sparse_params;
    double p_g_achieved = 0.0;
    double p_theta_achieved = 0.0;
    double val_acc = 0.0;
    double test_acc = 0.0;
    idx best_epoch = 0;
};

// Called after every projection with the epoch index and the current flat
// parameters; used by the sparsity-invariant instrumentation.
using EpochHook = std::function<void(idx epoch, const std::vector<double>& theta)>;

// L0-projected distilled training on the pruned graph. Z_dense == nullptr
// drops distillation. warm_from (optional) replaces the fresh seeded init.
// edge_mask (optional) is stamped into the returned ticket.
LotteryTicket train_sparse(const Graph& g_pruned, const Mat* Z_dense, const RunConfig& cfg,
                           const GcnParams* warm_from = nullptr, const EdgeMask* edge_mask = nullptr,
                           const EpochHook& hook = {});

struct TicketResult {
    LotteryTicket ticket;
    TrainResult teacher;
    double mean_pruned_edge_degree = 0.0;
    std::uint64_t inference_macs = 0;
    std::string scorer_tag;
};

// One-shot pipeline: pretrain dense teacher, score edges once, prune, train
// the sparse student with distillation.
TicketResult run_ticket_pipeline(const Graph& g, const RunConfig& cfg,
                                 ScorerKind scorer = ScorerKind::teddy);

// Bundle directory: checkpoint.bin(+.json), edge_mask.tsv (pruned edges),
// param_mask.bin (bit-packed), metrics.json.
void save_ticket_bundle(const std::string& dir, const Graph& original, const TicketResult& r,
                        const RunConfig& cfg);

std::vector<std::uint8_t> load_param_mask(const std::string& path);

}  // namespace glt
