#include "glt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "glt/rng.hpp"
#include "glt/sym_eigen.hpp"

namespace glt {

namespace {

std::vector<double> dense_normalized_laplacian(const Graph& g) {
    const idx n = g.num_nodes;
    Csr lap = normalized_operator(g, OperatorKind::normalized_laplacian);
    std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
    for (idx i = 0; i < n; ++i)
        for (idx k = lap.row_ptr[i]; k < lap.row_ptr[i + 1]; ++k)
            a[i * n + lap.col_idx[k]] = lap.vals[k];
    return a;
}

}  // namespace

Spectrum laplacian_spectrum(const Graph& g, idx budget) {
    if (g.num_nodes > budget)
        throw std::runtime_error(
            "graph has " + std::to_string(g.num_nodes) + " nodes, over the dense eigensolve budget " +
            std::to_string(budget) + "; use sampled energy deltas instead");
    std::vector<double> a = dense_normalized_laplacian(g);
    Spectrum s;
    s.eigenvalues = sym_eigenvalues_inplace(a, g.num_nodes);
    return s;
}

double graph_energy(const Spectrum& s) {
    double e = 0.0;
    for (double lam : s.eigenvalues) e += std::abs(lam - 1.0);
    return e;
}

double graph_energy(const Graph& g, idx budget) { return graph_energy(laplacian_spectrum(g, budget)); }

EnergyDelta energy_deltas(const Graph& g, const DeltaOptions& opt) {
    const idx m = g.num_edges();
    std::vector<idx> selected(m);
    std::iota(selected.begin(), selected.end(), 0);
    if (opt.sample_size >= 0 && opt.sample_size < m) {
        Rng rng(splitmix64(opt.seed));
        rng.shuffle(selected);
        selected.resize(opt.sample_size);
        std::sort(selected.begin(), selected.end());
    }

    const double base = graph_energy(g, opt.budget);
    EnergyDelta out;
    out.per_edge.reserve(selected.size());
    std::vector<std::uint8_t> keep(m, 1);
    for (idx e : selected) {
        keep[e] = 0;
        Graph pruned = remove_edges(g, keep);
        keep[e] = 1;
        out.per_edge.push_back({g.edge_list[e], graph_energy(pruned, opt.budget) - base});
    }
    return out;
}

DeltaReport delta_vs_degree_report(const Graph& g, const EnergyDelta& d) {
    DeltaReport r;
    r.rows.reserve(d.per_edge.size());
    std::vector<double> negdeg, delta;
    for (const auto& entry : d.per_edge) {
        double deg = edge_degree(g, entry.edge);
        r.rows.push_back({entry.edge, deg, entry.delta});
        negdeg.push_back(-deg);
        delta.push_back(entry.delta);
    }
    r.spearman_negdeg_delta = spearman(negdeg, delta);
    return r;
}

void write_delta_report_tsv(const std::string& path, const DeltaReport& r) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "# edge_i\tedge_j\tedge_degree\tdelta\n";
    for (const auto& row : r.rows)
        out << row.edge.i << '\t' << row.edge.j << '\t' << row.edge_degree << '\t' << row.delta
            << '\n';
    out << "# spearman(-edge_degree, delta) = " << r.spearman_negdeg_delta << '\n';
}

namespace {

// Average ranks, ties share the mean of their positions.
std::vector<double> ranks(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> r(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
        i = j + 1;
    }
    return r;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::runtime_error("spearman length mismatch");
    const std::size_t n = x.size();
    if (n < 2) return 0.0;
    std::vector<double> rx = ranks(x), ry = ranks(y);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mx, dy = ry[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace glt
