#include <doctest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "glt/macs.hpp"
#include "glt/pipeline.hpp"
#include "glt/rng.hpp"
#include "test_util.hpp"

using namespace glt;

namespace {

RunConfig small_cfg(std::uint64_t seed) {
    RunConfig cfg;
    cfg.hidden = 8;
    cfg.epochs = 15;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("project_l0 keeps the h largest magnitudes") {
    std::vector<double> x = {3.0, -1.0, 0.5, -4.0};
    CHECK(project_l0(x, 2) == std::vector<double>{3.0, 0.0, 0.0, -4.0});
    CHECK(project_l0(x, 4) == x);  // h = d is the identity
    CHECK(project_l0(x, 0) == std::vector<double>{0.0, 0.0, 0.0, 0.0});
    CHECK_THROWS(project_l0(x, 7));  // precondition: h <= d
}

TEST_CASE("project_l0 breaks magnitude ties toward lower indices") {
    CHECK(project_l0({1.0, -1.0, 1.0}, 2) == std::vector<double>{1.0, -1.0, 0.0});
    CHECK(project_l0({2.0, 2.0, 2.0, 2.0}, 1) == std::vector<double>{2.0, 0.0, 0.0, 0.0});
}

TEST_CASE("project_l0 is idempotent with bounded support") {
    Rng rng(splitmix64(3));
    for (int trial = 0; trial < 20; ++trial) {
        idx d = 50 + static_cast<idx>(rng.below(200));
        idx h = static_cast<idx>(rng.below(static_cast<std::uint64_t>(d) + 1));
        std::vector<double> x(d);
        for (double& v : x) v = rng.uniform(-5.0, 5.0);
        std::vector<double> p = project_l0(x, h);
        idx nnz = 0;
        for (double v : p) nnz += v != 0.0;
        CHECK(nnz <= h);
        CHECK(project_l0(p, h) == p);
    }
}

TEST_CASE("project_l0 is the closest h-sparse vector") {
    Rng rng(splitmix64(4));
    const idx d = 60, h = 20;
    std::vector<double> x(d);
    for (double& v : x) v = rng.uniform(-3.0, 3.0);
    std::vector<double> p = project_l0(x, h);
    auto dist2 = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (idx i = 0; i < d; ++i) s += (x[i] - v[i]) * (x[i] - v[i]);
        return s;
    };
    const double best = dist2(p);
    std::vector<idx> support(d);
    for (idx i = 0; i < d; ++i) support[i] = i;
    for (int probe = 0; probe < 100; ++probe) {
        rng.shuffle(support);
        std::vector<double> v(d, 0.0);
        for (idx i = 0; i < h; ++i) v[support[i]] = x[support[i]];
        CHECK(best <= dist2(v) + 1e-12);
    }
}

TEST_CASE("l0_keep_count ceiling") {
    CHECK(l0_keep_count(0.0, 10) == 10);
    CHECK(l0_keep_count(0.25, 8) == 6);
    CHECK(l0_keep_count(0.5, 7) == 4);
    CHECK(l0_keep_count(0.87, 184320) == 23962);
    CHECK(l0_keep_count(0.999, 10) == 1);
}

TEST_CASE("sparsity_target compounds 5 percent per round") {
    CHECK(sparsity_target(0) == 0.0);
    CHECK(sparsity_target(1) == doctest::Approx(0.05).epsilon(1e-12));
    for (idx k : {5, 10, 20, 30, 40})
        CHECK(sparsity_target(k) == doctest::Approx(1.0 - std::pow(0.95, k)).epsilon(1e-12));
    CHECK(sparsity_target(20) == doctest::Approx(0.641514).epsilon(1e-6));
    CHECK(sparsity_target(40) == doctest::Approx(0.871488).epsilon(1e-6));
    double prev = -1.0;
    for (idx k = 0; k <= 60; ++k) {
        double s = sparsity_target(k);
        CHECK(s > prev);
        CHECK(s < 1.0);
        prev = s;
    }
}

TEST_CASE("run config validation names the bad field") {
    RunConfig cfg;
    cfg.lr = -1.0;
    try {
        cfg.validate();
        FAIL("expected a throw");
    } catch (const std::exception& ex) {
        CHECK(std::string(ex.what()).find("lr") != std::string::npos);
    }
    cfg = RunConfig{};
    cfg.p_g = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = RunConfig{};
    cfg.p_theta = -0.2;
    CHECK_THROWS(cfg.validate());
    cfg = RunConfig{};
    cfg.tau = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = RunConfig{};
    cfg.eval_every = 0;
    CHECK_THROWS(cfg.validate());
    cfg = RunConfig{};
    cfg.epochs = -1;
    CHECK_THROWS(cfg.validate());
    cfg = RunConfig{};
    cfg.hidden = 0;
    CHECK_THROWS(cfg.validate());
    cfg = RunConfig{};
    cfg.lambda_dt = -0.5;
    CHECK_THROWS(cfg.validate());
    cfg = RunConfig{};  // defaults are valid
    CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("pretrain_dense with zero epochs returns the seeded init") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 10);
    RunConfig cfg = small_cfg(7);
    cfg.epochs = 0;
    TrainResult r = pretrain_dense(g, cfg);
    GcnParams init = glorot_init(8, cfg.hidden, 3, seed_stream(7, kStreamTeacher));
    CHECK(r.params.W0 == init.W0);
    CHECK(r.params.W1 == init.W1);
    CHECK(r.best_epoch == 0);
    GcnContext ctx = make_gcn_context(g);
    Mat z = gcn_forward(ctx, init).Z;
    CHECK(r.logits.v == z.v);
}

TEST_CASE("pretrain_dense is deterministic and seed-sensitive") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 11);
    TrainResult a = pretrain_dense(g, small_cfg(3));
    TrainResult b = pretrain_dense(g, small_cfg(3));
    CHECK(a.params.W0 == b.params.W0);
    CHECK(a.params.W1 == b.params.W1);
    CHECK(a.val_acc == b.val_acc);
    CHECK(a.test_acc == b.test_acc);
    CHECK(a.best_epoch == b.best_epoch);
    TrainResult c = pretrain_dense(g, small_cfg(4));
    CHECK(a.params.W0 != c.params.W0);
}

TEST_CASE("reported accuracies match the stored logits") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 12);
    TrainResult r = pretrain_dense(g, small_cfg(5));
    CHECK(r.val_acc == accuracy(r.logits, g.labels, g.val_mask));
    CHECK(r.test_acc == accuracy(r.logits, g.labels, g.test_mask));
    CHECK(r.best_epoch >= 1);
}

TEST_CASE("train_sparse enforces the parameter budget every epoch") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 13);
    RunConfig cfg = small_cfg(2);
    cfg.p_theta = 0.5;
    const idx d = 8 * cfg.hidden + cfg.hidden * 3;
    const idx h = l0_keep_count(cfg.p_theta, d);
    idx calls = 0;
    EpochHook hook = [&](idx epoch, const std::vector<double>& theta) {
        ++calls;
        CHECK(epoch == calls);
        CHECK((idx)theta.size() == d);
        idx nnz = 0;
        for (double v : theta) nnz += v != 0.0;
        CHECK(nnz <= h);
    };
    LotteryTicket t = train_sparse(g, nullptr, cfg, nullptr, nullptr, hook);
    CHECK(calls == cfg.epochs);
    CHECK(t.sparse_params.nnz() <= h);
    CHECK(t.p_theta_achieved >= cfg.p_theta - 1.0 / double(d));
    // the stored mask is exactly the support
    std::vector<double> theta = t.sparse_params.flatten();
    REQUIRE(t.param_mask.size() == theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i)
        CHECK(t.param_mask[i] == (theta[i] != 0.0 ? 1 : 0));
}

TEST_CASE("train_sparse projects the starting point") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 14);
    RunConfig cfg = small_cfg(6);
    cfg.p_theta = 0.75;
    cfg.epochs = 0;
    LotteryTicket t = train_sparse(g, nullptr, cfg);
    const idx d = 8 * cfg.hidden + cfg.hidden * 3;
    const idx h = l0_keep_count(cfg.p_theta, d);
    CHECK(t.sparse_params.nnz() <= h);
    // equals the projected fresh init on the student stream
    GcnParams init = glorot_init(8, cfg.hidden, 3, seed_stream(cfg.seed, kStreamStudent));
    std::vector<double> expect = project_l0(init.flatten(), h);
    CHECK(t.sparse_params.flatten() == expect);
}

TEST_CASE("warm start begins from the projected teacher") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 15);
    RunConfig cfg = small_cfg(8);
    TrainResult teacher = pretrain_dense(g, cfg);
    RunConfig scfg = cfg;
    scfg.p_theta = 0.6;
    scfg.epochs = 0;
    scfg.warm_start = true;
    LotteryTicket t = train_sparse(g, nullptr, scfg, &teacher.params);
    const idx d = teacher.params.dim();
    std::vector<double> expect = project_l0(teacher.params.flatten(), l0_keep_count(0.6, d));
    CHECK(t.sparse_params.flatten() == expect);
}

TEST_CASE("p_theta = 0 keeps parameters dense") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 16);
    RunConfig cfg = small_cfg(9);
    LotteryTicket t = train_sparse(g, nullptr, cfg);
    const idx d = 8 * cfg.hidden + cfg.hidden * 3;
    CHECK(t.sparse_params.nnz() == d);
    CHECK(t.p_theta_achieved == 0.0);
}

TEST_CASE("distillation changes the student") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 17);
    RunConfig cfg = small_cfg(10);
    cfg.lambda_dt = 1.0;
    TrainResult teacher = pretrain_dense(g, cfg);
    LotteryTicket with = train_sparse(g, &teacher.logits, cfg);
    LotteryTicket without = train_sparse(g, nullptr, cfg);
    CHECK(with.sparse_params.W0 != without.sparse_params.W0);
}

TEST_CASE("ticket pipeline scores once and is deterministic") {
    Graph g = testutil::make_synth_dataset(40, 10, 3, 0.12, 18);
    RunConfig cfg = small_cfg(11);
    cfg.p_g = 0.2;
    cfg.p_theta = 0.3;
    reset_teddy_score_invocations();
    TicketResult a = run_ticket_pipeline(g, cfg);
    CHECK(teddy_score_invocations() == 1);
    TicketResult b = run_ticket_pipeline(g, cfg);
    CHECK(a.ticket.sparse_params.W0 == b.ticket.sparse_params.W0);
    CHECK(a.ticket.sparse_params.W1 == b.ticket.sparse_params.W1);
    CHECK(a.ticket.val_acc == b.ticket.val_acc);
    CHECK(a.inference_macs == b.inference_macs);
    CHECK(a.scorer_tag == "teddy");

    CHECK(a.ticket.edge_mask.keep.size() == (std::size_t)g.num_edges());
    CHECK(a.ticket.edge_mask.num_pruned() == num_edges_to_prune(0.2, g.num_edges()));
    CHECK(a.ticket.p_g_achieved == doctest::Approx(a.ticket.edge_mask.graph_sparsity));
    CHECK(a.mean_pruned_edge_degree ==
          doctest::Approx(mean_pruned_edge_degree(g, a.ticket.edge_mask)));

    // macs recomputed from the bundle pieces
    Graph pruned = remove_edges(g, a.ticket.edge_mask.keep);
    CHECK(a.inference_macs ==
          compute_macs(pruned, a.ticket.param_mask, g.num_features(), cfg.hidden, g.num_classes));
}

TEST_CASE("pipeline with p_g = 0 keeps every edge") {
    Graph g = testutil::make_synth_dataset(30, 8, 3, 0.15, 19);
    RunConfig cfg = small_cfg(12);
    TicketResult r = run_ticket_pipeline(g, cfg);
    CHECK(r.ticket.edge_mask.num_pruned() == 0);
    CHECK(r.ticket.p_g_achieved == 0.0);
    CHECK(r.mean_pruned_edge_degree == 0.0);
}

TEST_CASE("ticket bundles round-trip through the filesystem") {
    Graph g = testutil::make_synth_dataset(35, 9, 3, 0.15, 20);
    RunConfig cfg = small_cfg(13);
    cfg.p_g = 0.25;
    cfg.p_theta = 0.4;
    TicketResult r = run_ticket_pipeline(g, cfg);

    namespace fs = std::filesystem;
    std::string dir = (fs::temp_directory_path() / "glt_bundle_test").string();
    fs::remove_all(dir);
    save_ticket_bundle(dir, g, r, cfg);

    CHECK(fs::exists(dir + "/checkpoint.bin"));
    CHECK(fs::exists(dir + "/checkpoint.bin.json"));
    CHECK(fs::exists(dir + "/edge_mask.tsv"));
    CHECK(fs::exists(dir + "/param_mask.bin"));
    CHECK(fs::exists(dir + "/metrics.json"));

    std::vector<std::uint8_t> mask = load_param_mask(dir + "/param_mask.bin");
    CHECK(mask == r.ticket.param_mask);

    CheckpointMeta meta;
    GcnParams p = load_checkpoint(dir + "/checkpoint.bin", &meta);
    CHECK(p.W0 == r.ticket.sparse_params.W0);
    CHECK(p.W1 == r.ticket.sparse_params.W1);
    CHECK(meta.seed == cfg.seed);

    // pruned edges listed one per line, all really pruned
    std::ifstream in(dir + "/edge_mask.tsv");
    std::string line;
    idx rows = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        idx i, j;
        ss >> i >> j;
        idx e = edge_index(g, {i, j});
        REQUIRE(e >= 0);
        CHECK(r.ticket.edge_mask.keep[e] == 0);
        ++rows;
    }
    CHECK(rows == r.ticket.edge_mask.num_pruned());

    nlohmann::json j;
    std::ifstream jin(dir + "/metrics.json");
    jin >> j;
    CHECK(j.at("scorer") == "teddy");
    CHECK(j.at("seed") == cfg.seed);
    CHECK(j.at("p_g") == doctest::Approx(0.25));
    CHECK(j.at("p_theta_achieved").get<double>() ==
          doctest::Approx(r.ticket.p_theta_achieved));
    CHECK(j.at("test_acc").get<double>() == doctest::Approx(r.ticket.test_acc));
    CHECK(j.at("teacher_test_acc").get<double>() == doctest::Approx(r.teacher.test_acc));
    CHECK(j.at("inference_macs").get<std::uint64_t>() == r.inference_macs);
}

TEST_CASE("macs model closed forms") {
    // empty graph: aggregation touches only the N self-loops
    Graph empty = graph_from_edges(5, {});
    std::vector<std::uint8_t> zero_mask(4 * 6 + 6 * 3, 0);
    CHECK(compute_macs(empty, zero_mask, 4, 6, 3) == 5ull * (6 + 3));

    Graph g = testutil::make_er(20, 0.2, 21);
    const idx m = g.num_edges();
    CHECK(compute_macs_dense(g, 4, 6, 3) ==
          static_cast<std::uint64_t>((2 * m + 20) * (6 + 3) + (4 * 6 + 6 * 3) * 20));

    // transform cost is linear in surviving weights
    std::vector<std::uint8_t> mask(4 * 6 + 6 * 3, 0);
    for (int i = 0; i < 10; ++i) mask[i] = 1;          // 10 in W0
    for (int i = 0; i < 5; ++i) mask[4 * 6 + i] = 1;   // 5 in W1
    CHECK(compute_macs(g, mask, 4, 6, 3) ==
          static_cast<std::uint64_t>((2 * m + 20) * (6 + 3) + 15 * 20));
}
