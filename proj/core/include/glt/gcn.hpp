#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glt/csr.hpp"
#include "glt/graph.hpp"

namespace glt {

// Row-major dense matrix, just enough for the training loop.
struct Mat {
    idx rows = 0, cols = 0;
    std::vector<double> v;

    Mat() = default;
    Mat(idx r, idx c) : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, 0.0) {}
    double& at(idx r, idx c) { return v[r * cols + c]; }
    double at(idx r, idx c) const { return v[r * cols + c]; }
    double* row(idx r) { return v.data() + r * cols; }
    const double* row(idx r) const { return v.data() + r * cols; }
};

// Two-layer GCN weights, no biases. Flat parameter order is W0 row-major
// then W1 row-major, d = F*H + H*C.
struct GcnParams {
    idx F = 0, H = 0, C = 0;
    std::vector<double> W0;  // F x H
    std::vector<double> W1;  // H x C

    idx dim() const { return F * H + H * C; }
    std::vector<double> flatten() const;
    void unflatten(const std::vector<double>& theta);
    idx nnz() const;
};

// Glorot-uniform init, limit sqrt(6/(fan_in+fan_out)) per matrix, drawn in
// flat order from the seeded stream.
GcnParams glorot_init(idx F, idx H, idx C, std::uint64_t seed);

// Everything the backward pass needs that is fixed per graph.
struct GcnContext {
    Csr op;  // sym-normalized adjacency with self-loops; symmetric
    Csr X;   // N x F features
    Csr Xt;  // X transposed
    idx N = 0;
};

GcnContext make_gcn_context(const Graph& g);

struct ForwardTrace {
    Mat U;   // op (X W0), pre-activation
    Mat H1;  // relu(U)
    Mat T1;  // H1 W1
    Mat Z;   // op T1, logits
};

ForwardTrace gcn_forward(const GcnContext& ctx, const GcnParams& p);

struct LossValue {
    double total = 0.0;
    double ce_part = 0.0;
    double kl_part = 0.0;
};

// Mean of -log softmax(Z)[label] over masked nodes. Throws on empty mask.
double cross_entropy(const Mat& Z, const std::vector<int>& labels,
                     const std::vector<std::uint8_t>& mask);

// Mean over all rows of KL(softmax(Z/tau) || softmax(Zt/tau)); student first,
// teacher rows treated as constants.
double distill_kl(const Mat& Z, const Mat& Zt, double tau);

LossValue distill_loss(const Mat& Z, const std::vector<int>& labels,
                       const std::vector<std::uint8_t>& mask, const Mat* Zt, double lambda_dt,
                       double tau);

// Gradient of distill_loss w.r.t. the flat parameter vector. Zt == nullptr
// drops the KL term regardless of lambda_dt.
std::vector<double> gcn_backward(const GcnContext& ctx, const ForwardTrace& trace,
                                 const GcnParams& p, const std::vector<int>& labels,
                                 const std::vector<std::uint8_t>& mask, const Mat* Zt,
                                 double lambda_dt, double tau);

double accuracy(const Mat& Z, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask);

struct AdamState {
    std::vector<double> m, v;
    std::int64_t t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& st,
               double lr);
void sgd_step(std::vector<double>& theta, const std::vector<double>& grad, double lr);

// Versioned little-endian binary checkpoint plus a JSON sidecar at
// path + ".json" carrying provenance.
struct CheckpointMeta {
    std::uint64_t seed = 0;
    std::int64_t epoch = -1;
    double val_acc = 0.0;
    double test_acc = 0.0;
};

void save_checkpoint(const std::string& path, const GcnParams& p, const CheckpointMeta& meta);
GcnParams load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

}  // namespace glt
