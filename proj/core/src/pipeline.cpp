#include "glt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "glt/macs.hpp"
#include "glt/rng.hpp"

namespace glt {

void RunConfig::validate() const {
    auto bad = [](const std::string& field, const std::string& why) {
        throw std::runtime_error("config field '" + field + "': " + why);
    };
    if (!(lr > 0.0)) bad("lr", "must be > 0");
    if (epochs < 0) bad("epochs", "must be >= 0");
    if (lambda_dt < 0.0) bad("lambda_dt", "must be >= 0");
    if (!(tau > 0.0)) bad("tau", "must be > 0");
    if (p_g < 0.0 || p_g >= 1.0) bad("p_g", "must be in [0,1)");
    if (p_theta < 0.0 || p_theta >= 1.0) bad("p_theta", "must be in [0,1)");
    if (hidden < 1) bad("hidden", "must be >= 1");
    if (eval_every < 1) bad("eval_every", "must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) bad("beta1", "must be in [0,1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) bad("beta2", "must be in [0,1)");
    if (!(adam_eps > 0.0)) bad("adam_eps", "must be > 0");
}

std::vector<double> project_l0(std::vector<double> theta, idx h) {
    const idx d = static_cast<idx>(theta.size());
    if (h < 0 || h > d) throw std::runtime_error("h out of range");
    if (h == d) return theta;
    std::vector<idx> order(d);
    std::iota(order.begin(), order.end(), 0);
    // Largest magnitude first, ties to the lower index.
    auto cmp = [&](idx a, idx b) {
        const double ma = std::abs(theta[a]), mb = std::abs(theta[b]);
        if (ma != mb) return ma > mb;
        return a < b;
    };
    std::nth_element(order.begin(), order.begin() + h, order.end(), cmp);
    std::vector<std::uint8_t> keep(d, 0);
    for (idx r = 0; r < h; ++r) keep[order[r]] = 1;
    for (idx i = 0; i < d; ++i)
        if (!keep[i]) theta[i] = 0.0;
    return theta;
}

idx l0_keep_count(double p_theta, idx d) {
    if (p_theta < 0.0 || p_theta >= 1.0) throw std::runtime_error("p_theta must be in [0,1)");
    return static_cast<idx>(std::ceil((1.0 - p_theta) * static_cast<double>(d)));
}

double sparsity_target(idx k, double per_round) {
    if (k < 0) throw std::runtime_error("simulation index must be >= 0");
    if (per_round <= 0.0 || per_round >= 1.0) throw std::runtime_error("per_round must be in (0,1)");
    return 1.0 - std::pow(1.0 - per_round, static_cast<double>(k));
}

namespace {

struct LoopResult {
    GcnParams params;
    Mat logits;
    double val_acc = 0.0;
    double test_acc = 0.0;
    idx best_epoch = 0;
};

// Shared epoch loop. project_h < 0 disables projection (dense teacher);
// Z_dense == nullptr disables distillation. Evaluation looks at theta_t right
// after it is produced, so best-val selection covers epochs 1..T and the
// initialization only when T == 0.
LoopResult train_loop(const Graph& g, const RunConfig& cfg, std::uint64_t init_seed,
                      const Mat* Z_dense, double lambda_dt, idx project_h,
                      const GcnParams* warm_from, const EpochHook& hook) {
    cfg.validate();
    if (!g.has_features()) throw std::runtime_error("graph has no features");
    if (g.num_classes < 1) throw std::runtime_error("graph has no labels");

    GcnContext ctx = make_gcn_context(g);
    GcnParams params =
        warm_from ? *warm_from : glorot_init(g.num_features(), cfg.hidden, g.num_classes, init_seed);
    if (params.F != g.num_features() || params.C != g.num_classes)
        throw std::runtime_error("warm-start checkpoint shape mismatch");

    std::vector<double> theta = params.flatten();
    if (project_h >= 0) {
        // PGD starts from a feasible point: the init is projected too.
        theta = project_l0(std::move(theta), project_h);
        params.unflatten(theta);
    }

    AdamState adam;
    adam.beta1 = cfg.beta1;
    adam.beta2 = cfg.beta2;
    adam.eps = cfg.adam_eps;

    LoopResult best;
    best.val_acc = -1.0;
    for (idx t = 0;; ++t) {
        ForwardTrace tr = gcn_forward(ctx, params);
        const bool eval_now =
            (t == 0 && cfg.epochs == 0) || (t > 0 && (t % cfg.eval_every == 0 || t == cfg.epochs));
        if (eval_now) {
            const double va = accuracy(tr.Z, g.labels, g.val_mask);
            if (va > best.val_acc) {
                best.val_acc = va;
                best.test_acc = accuracy(tr.Z, g.labels, g.test_mask);
                best.params = params;
                best.logits = tr.Z;
                best.best_epoch = t;
            }
        }
        if (t == cfg.epochs) break;

        std::vector<double> grad =
            gcn_backward(ctx, tr, params, g.labels, g.train_mask, Z_dense, lambda_dt, cfg.tau);
        if (cfg.optimizer == OptimizerKind::adam)
            adam_step(theta, grad, adam, cfg.lr);
        else
            sgd_step(theta, grad, cfg.lr);
        if (project_h >= 0) theta = project_l0(std::move(theta), project_h);
        params.unflatten(theta);
        if (hook) hook(t + 1, theta);
    }
    return best;
}

}  // namespace

TrainResult pretrain_dense(const Graph& g, const RunConfig& cfg) {
    LoopResult r = train_loop(g, cfg, seed_stream(cfg.seed, kStreamTeacher), nullptr, 0.0, -1,
                              nullptr, {});
    return TrainResult{std::move(r.params), std::move(r.logits), r.val_acc, r.test_acc,
                       r.best_epoch};
}

LotteryTicket train_sparse(const Graph& g_pruned, const Mat* Z_dense, const RunConfig& cfg,
                           const GcnParams* warm_from, const EdgeMask* edge_mask,
                           const EpochHook& hook) {
    const idx d = g_pruned.num_features() * cfg.hidden + cfg.hidden * g_pruned.num_classes;
    const idx h = l0_keep_count(cfg.p_theta, d);
    LoopResult r = train_loop(g_pruned, cfg, seed_stream(cfg.seed, kStreamStudent), Z_dense,
                              Z_dense ? cfg.lambda_dt : 0.0, h, warm_from, hook);

    LotteryTicket ticket;
    ticket.sparse_params = std::move(r.params);
    ticket.val_acc = r.val_acc;
    ticket.test_acc = r.test_acc;
    ticket.best_epoch = r.best_epoch;
    ticket.p_theta_achieved =
        1.0 - static_cast<double>(ticket.sparse_params.nnz()) / static_cast<double>(d);
    std::vector<double> theta = ticket.sparse_params.flatten();
    ticket.param_mask.resize(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) ticket.param_mask[i] = theta[i] != 0.0;
    if (edge_mask) {
        ticket.edge_mask = *edge_mask;
        ticket.p_g_achieved = edge_mask->graph_sparsity;
    }
    return ticket;
}

TicketResult run_ticket_pipeline(const Graph& g, const RunConfig& cfg, ScorerKind scorer) {
    cfg.validate();
    TicketResult out;
    out.scorer_tag = scorer_name(scorer);

    TrainResult teacher = pretrain_dense(g, cfg);

    // Scores are computed once, on the original graph (one-shot).
    EdgeScoreTable table = compute_scores(g, scorer, seed_stream(cfg.seed, kStreamScorer));
    PruneResult pruned = prune_edges(g, table, cfg.p_g);
    out.mean_pruned_edge_degree = mean_pruned_edge_degree(g, pruned.mask);

    const GcnParams* warm = cfg.warm_start ? &teacher.params : nullptr;
    out.ticket = train_sparse(pruned.graph, &teacher.logits, cfg, warm, &pruned.mask, {});
    out.inference_macs = compute_macs(pruned.graph, out.ticket.param_mask,
                                      g.num_features(), cfg.hidden, g.num_classes);
    out.teacher = std::move(teacher);
    return out;
}

void save_ticket_bundle(const std::string& dir, const Graph& original, const TicketResult& r,
                        const RunConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    CheckpointMeta meta{cfg.seed, r.ticket.best_epoch, r.ticket.val_acc, r.ticket.test_acc};
    save_checkpoint(dir + "/checkpoint.bin", r.ticket.sparse_params, meta);

    {
        std::ofstream out(dir + "/edge_mask.tsv");
        if (!out) throw std::runtime_error("cannot open " + dir + "/edge_mask.tsv");
        const auto& keep = r.ticket.edge_mask.keep;
        for (idx e = 0; e < static_cast<idx>(keep.size()); ++e)
            if (!keep[e]) out << original.edge_list[e].i << '\t' << original.edge_list[e].j << '\n';
    }

    {
        std::ofstream out(dir + "/param_mask.bin", std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + dir + "/param_mask.bin");
        const std::uint64_t d = r.ticket.param_mask.size();
        out.write(reinterpret_cast<const char*>(&d), sizeof d);
        std::vector<std::uint8_t> packed((d + 7) / 8, 0);
        for (std::uint64_t i = 0; i < d; ++i)
            if (r.ticket.param_mask[i]) packed[i >> 3] |= static_cast<std::uint8_t>(1u << (i & 7));
        out.write(reinterpret_cast<const char*>(packed.data()),
                  static_cast<std::streamsize>(packed.size()));
    }

    nlohmann::json j{
        {"scorer", r.scorer_tag},
        {"seed", cfg.seed},
        {"p_g", cfg.p_g},
        {"p_theta", cfg.p_theta},
        {"p_g_achieved", r.ticket.p_g_achieved},
        {"p_theta_achieved", r.ticket.p_theta_achieved},
        {"val_acc", r.ticket.val_acc},
        {"test_acc", r.ticket.test_acc},
        {"best_epoch", r.ticket.best_epoch},
        {"teacher_val_acc", r.teacher.val_acc},
        {"teacher_test_acc", r.teacher.test_acc},
        {"teacher_best_epoch", r.teacher.best_epoch},
        {"mean_pruned_edge_degree", r.mean_pruned_edge_degree},
        {"inference_macs", r.inference_macs},
    };
    std::ofstream out(dir + "/metrics.json");
    if (!out) throw std::runtime_error("cannot open " + dir + "/metrics.json");
    out << j.dump(2) << '\n';
}

std::vector<std::uint8_t> load_param_mask(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint64_t d = 0;
    in.read(reinterpret_cast<char*>(&d), sizeof d);
    std::vector<std::uint8_t> packed((d + 7) / 8);
    in.read(reinterpret_cast<char*>(packed.data()), static_cast<std::streamsize>(packed.size()));
    if (!in) throw std::runtime_error(path + ": truncated mask");
    std::vector<std::uint8_t> mask(d);
    for (std::uint64_t i = 0; i < d; ++i) mask[i] = (packed[i >> 3] >> (i & 7)) & 1u;
    return mask;
}

}  // namespace glt
