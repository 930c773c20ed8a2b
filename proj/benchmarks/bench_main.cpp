// Microbenchmarks for the hot paths: scoring, pruning, eigensolve, training
// steps, projection. Synthetic inputs only, so this binary runs anywhere.

#include <benchmark/benchmark.h>

#include "glt/gcn.hpp"
#include "glt/graph.hpp"
#include "glt/pipeline.hpp"
#include "glt/rng.hpp"
#include "glt/scoring.hpp"
#include "glt/spectral.hpp"

using namespace glt;

namespace {

Graph er_graph(idx n, double avg_deg, std::uint64_t seed) {
    Rng rng(splitmix64(seed));
    const double p = avg_deg / static_cast<double>(n - 1);
    std::vector<Edge> edges;
    for (idx i = 0; i < n; ++i)
        for (idx j = i + 1; j < n; ++j)
            if (rng.next_double() < p) edges.push_back({i, j});
    return graph_from_edges(n, std::move(edges));
}

Graph with_features(Graph g, idx f, idx c, std::uint64_t seed) {
    Rng rng(splitmix64(seed));
    g.features.rows = g.num_nodes;
    g.features.cols = f;
    g.features.row_ptr.assign(g.num_nodes + 1, 0);
    for (idx i = 0; i < g.num_nodes; ++i) {
        for (idx j = 0; j < f; ++j)
            if (rng.next_double() < 0.05) {
                g.features.col_idx.push_back(j);
                g.features.vals.push_back(rng.next_double());
            }
        g.features.row_ptr[i + 1] = static_cast<idx>(g.features.col_idx.size());
    }
    g.num_classes = c;
    g.labels.resize(g.num_nodes);
    for (idx i = 0; i < g.num_nodes; ++i) g.labels[i] = static_cast<int>(rng.below(c));
    g.train_mask.assign(g.num_nodes, 0);
    g.val_mask.assign(g.num_nodes, 0);
    g.test_mask.assign(g.num_nodes, 0);
    for (idx i = 0; i < g.num_nodes; ++i) g.train_mask[i] = i % 10 == 0;
    return g;
}

void BM_TeddyScores(benchmark::State& state) {
    Graph g = er_graph(state.range(0), 8.0, 1);
    for (auto _ : state) benchmark::DoNotOptimize(teddy_scores(g));
    state.SetItemsProcessed(state.iterations() * g.num_edges());
}
BENCHMARK(BM_TeddyScores)->Arg(1000)->Arg(10000)->Arg(50000);

void BM_PruneEdges(benchmark::State& state) {
    Graph g = er_graph(state.range(0), 8.0, 2);
    EdgeScoreTable t = teddy_scores(g);
    for (auto _ : state) benchmark::DoNotOptimize(prune_edges(g, t, 0.5));
}
BENCHMARK(BM_PruneEdges)->Arg(10000)->Arg(50000);

void BM_LaplacianSpectrum(benchmark::State& state) {
    Graph g = er_graph(state.range(0), 6.0, 3);
    for (auto _ : state) benchmark::DoNotOptimize(laplacian_spectrum(g));
}
BENCHMARK(BM_LaplacianSpectrum)->Arg(100)->Arg(300)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_ForwardBackward(benchmark::State& state) {
    Graph g = with_features(er_graph(state.range(0), 8.0, 4), 500, 7, 5);
    GcnContext ctx = make_gcn_context(g);
    GcnParams p = glorot_init(500, 64, 7, 6);
    for (auto _ : state) {
        ForwardTrace tr = gcn_forward(ctx, p);
        benchmark::DoNotOptimize(
            gcn_backward(ctx, tr, p, g.labels, g.train_mask, nullptr, 0.0, 1.0));
    }
}
BENCHMARK(BM_ForwardBackward)->Arg(1000)->Arg(3000)->Unit(benchmark::kMillisecond);

void BM_ProjectL0(benchmark::State& state) {
    Rng rng(splitmix64(7));
    std::vector<double> theta(state.range(0));
    for (double& v : theta) v = rng.uniform(-1.0, 1.0);
    const idx h = state.range(0) / 2;
    for (auto _ : state) benchmark::DoNotOptimize(project_l0(theta, h));
}
BENCHMARK(BM_ProjectL0)->Arg(1 << 16)->Arg(1 << 19);

}  // namespace

BENCHMARK_MAIN();
