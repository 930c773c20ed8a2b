#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glt/graph.hpp"

namespace glt {

// Full spectrum of the normalized Laplacian I - D^-1/2 A D^-1/2, ascending.
// Isolated nodes contribute eigenvalue 0.
struct Spectrum {
    std::vector<double> eigenvalues;
};

constexpr idx kSpectralBudget = 4000;

// Dense symmetric eigensolve; throws past the node budget and points the
// caller at sampled energy_deltas instead.
Spectrum laplacian_spectrum(const Graph& g, idx budget = kSpectralBudget);

// E(G) = sum |lambda - 1|.
double graph_energy(const Spectrum& s);
double graph_energy(const Graph& g, idx budget = kSpectralBudget);

struct EnergyDeltaEntry {
    Edge edge;
    double delta = 0.0;  // E(G - edge) - E(G)
};

struct EnergyDelta {
    std::vector<EnergyDeltaEntry> per_edge;  // canonical edge order
};

struct DeltaOptions {
    idx sample_size = -1;       // -1 = all edges
    std::uint64_t seed = 0;     // sampling seed
    idx budget = kSpectralBudget;
};

// Removes each selected edge in turn and eigensolves the remainder; degrees
// are recomputed per removal. O(#edges * N^3).
EnergyDelta energy_deltas(const Graph& g, const DeltaOptions& opt = {});

struct DeltaReportRow {
    Edge edge;
    double edge_degree = 0.0;
    double delta = 0.0;
};

struct DeltaReport {
    std::vector<DeltaReportRow> rows;
    // Spearman rank correlation between -edge_degree and delta; positive
    // means low-degree edges destabilize the spectrum most when removed.
    double spearman_negdeg_delta = 0.0;
};

DeltaReport delta_vs_degree_report(const Graph& g, const EnergyDelta& d);

void write_delta_report_tsv(const std::string& path, const DeltaReport& r);

// Spearman rank correlation with average ranks on ties. Returns 0 when
// either side is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace glt
