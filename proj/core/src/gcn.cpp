#include "glt/gcn.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "glt/rng.hpp"

namespace glt {

namespace {

// out = A B, all row-major dense.
void gemm_nn(const Mat& a, const Mat& b, Mat& out) {
    out = Mat(a.rows, b.cols);
    for (idx i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (idx k = 0; k < a.cols; ++k) {
            const double v = ai[k];
            if (v == 0.0) continue;
            const double* bk = b.row(k);
            for (idx j = 0; j < b.cols; ++j) oi[j] += v * bk[j];
        }
    }
}

// out = A^T B.
void gemm_tn(const Mat& a, const Mat& b, Mat& out) {
    out = Mat(a.cols, b.cols);
    for (idx i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        const double* bi = b.row(i);
        for (idx k = 0; k < a.cols; ++k) {
            const double v = ai[k];
            if (v == 0.0) continue;
            double* ok = out.row(k);
            for (idx j = 0; j < b.cols; ++j) ok[j] += v * bi[j];
        }
    }
}

// out = A B^T.
void gemm_nt(const Mat& a, const Mat& b, Mat& out) {
    out = Mat(a.rows, b.rows);
    for (idx i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* oi = out.row(i);
        for (idx j = 0; j < b.rows; ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (idx k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
            oi[j] = acc;
        }
    }
}

void softmax_row(const double* z, idx c, double* out) {
    double mx = z[0];
    for (idx j = 1; j < c; ++j) mx = std::max(mx, z[j]);
    double sum = 0.0;
    for (idx j = 0; j < c; ++j) {
        out[j] = std::exp(z[j] - mx);
        sum += out[j];
    }
    for (idx j = 0; j < c; ++j) out[j] /= sum;
}

// log softmax, same stabilization.
void log_softmax_row(const double* z, idx c, double* out) {
    double mx = z[0];
    for (idx j = 1; j < c; ++j) mx = std::max(mx, z[j]);
    double sum = 0.0;
    for (idx j = 0; j < c; ++j) sum += std::exp(z[j] - mx);
    const double lse = mx + std::log(sum);
    for (idx j = 0; j < c; ++j) out[j] = z[j] - lse;
}

}  // namespace

std::vector<double> GcnParams::flatten() const {
    std::vector<double> theta;
    theta.reserve(dim());
    theta.insert(theta.end(), W0.begin(), W0.end());
    theta.insert(theta.end(), W1.begin(), W1.end());
    return theta;
}

void GcnParams::unflatten(const std::vector<double>& theta) {
    if (static_cast<idx>(theta.size()) != dim()) throw std::runtime_error("theta length mismatch");
    W0.assign(theta.begin(), theta.begin() + F * H);
    W1.assign(theta.begin() + F * H, theta.end());
}

idx GcnParams::nnz() const {
    idx c = 0;
    for (double w : W0) c += w != 0.0;
    for (double w : W1) c += w != 0.0;
    return c;
}

GcnParams glorot_init(idx F, idx H, idx C, std::uint64_t seed) {
    GcnParams p;
    p.F = F;
    p.H = H;
    p.C = C;
    p.W0.resize(static_cast<std::size_t>(F) * H);
    p.W1.resize(static_cast<std::size_t>(H) * C);
    Rng rng(seed);
    const double lim0 = std::sqrt(6.0 / static_cast<double>(F + H));
    for (double& w : p.W0) w = rng.uniform(-lim0, lim0);
    const double lim1 = std::sqrt(6.0 / static_cast<double>(H + C));
    for (double& w : p.W1) w = rng.uniform(-lim1, lim1);
    return p;
}

GcnContext make_gcn_context(const Graph& g) {
    if (!g.has_features()) throw std::runtime_error("graph has no features");
    GcnContext ctx;
    ctx.op = normalized_operator(g, OperatorKind::sym_self_loop);
    ctx.X = g.features;
    ctx.Xt = g.features.transposed();
    ctx.N = g.num_nodes;
    return ctx;
}

ForwardTrace gcn_forward(const GcnContext& ctx, const GcnParams& p) {
    if (ctx.X.cols != p.F) throw std::runtime_error("feature width != F");
    ForwardTrace tr;
    // P = X W0 via CSR rows; U = op P
    Mat P(ctx.N, p.H);
    for (idx i = 0; i < ctx.N; ++i) {
        double* pi = P.row(i);
        for (idx k = ctx.X.row_ptr[i]; k < ctx.X.row_ptr[i + 1]; ++k) {
            const double xv = ctx.X.vals[k];
            const double* w = p.W0.data() + ctx.X.col_idx[k] * p.H;
            for (idx h = 0; h < p.H; ++h) pi[h] += xv * w[h];
        }
    }
    tr.U = Mat(ctx.N, p.H);
    ctx.op.matmul_dense(P.v.data(), p.H, tr.U.v.data());
    tr.H1 = tr.U;
    for (double& x : tr.H1.v) x = x > 0.0 ? x : 0.0;
    Mat w1m;
    w1m.rows = p.H;
    w1m.cols = p.C;
    w1m.v = p.W1;
    gemm_nn(tr.H1, w1m, tr.T1);
    tr.Z = Mat(ctx.N, p.C);
    ctx.op.matmul_dense(tr.T1.v.data(), p.C, tr.Z.v.data());
    return tr;
}

double cross_entropy(const Mat& Z, const std::vector<int>& labels,
                     const std::vector<std::uint8_t>& mask) {
    idx count = 0;
    double acc = 0.0;
    std::vector<double> ls(Z.cols);
    for (idx i = 0; i < Z.rows; ++i) {
        if (!mask[i]) continue;
        const int y = labels[i];
        if (y < 0 || y >= Z.cols) throw std::runtime_error("label out of range on masked node");
        log_softmax_row(Z.row(i), Z.cols, ls.data());
        acc -= ls[y];
        ++count;
    }
    if (count == 0) throw std::runtime_error("empty mask");
    return acc / static_cast<double>(count);
}

double distill_kl(const Mat& Z, const Mat& Zt, double tau) {
    if (Z.rows != Zt.rows || Z.cols != Zt.cols) throw std::runtime_error("logit shape mismatch");
    if (tau <= 0.0) throw std::runtime_error("tau must be positive");
    const idx c = Z.cols;
    std::vector<double> zs(c), zt(c), lp(c), lq(c);
    double acc = 0.0;
    for (idx i = 0; i < Z.rows; ++i) {
        for (idx j = 0; j < c; ++j) {
            zs[j] = Z.at(i, j) / tau;
            zt[j] = Zt.at(i, j) / tau;
        }
        log_softmax_row(zs.data(), c, lp.data());
        log_softmax_row(zt.data(), c, lq.data());
        double kl = 0.0;
        for (idx j = 0; j < c; ++j) kl += std::exp(lp[j]) * (lp[j] - lq[j]);
        acc += kl;
    }
    return acc / static_cast<double>(Z.rows);
}

LossValue distill_loss(const Mat& Z, const std::vector<int>& labels,
                       const std::vector<std::uint8_t>& mask, const Mat* Zt, double lambda_dt,
                       double tau) {
    LossValue lv;
    lv.ce_part = cross_entropy(Z, labels, mask);
    lv.kl_part = Zt ? distill_kl(Z, *Zt, tau) : 0.0;
    lv.total = lv.ce_part + lambda_dt * lv.kl_part;
    return lv;
}

std::vector<double> gcn_backward(const GcnContext& ctx, const ForwardTrace& trace,
                                 const GcnParams& p, const std::vector<int>& labels,
                                 const std::vector<std::uint8_t>& mask, const Mat* Zt,
                                 double lambda_dt, double tau) {
    const idx n = ctx.N, c = p.C;
    Mat G(n, c);  // dL/dZ

    idx masked = 0;
    for (idx i = 0; i < n; ++i) masked += mask[i] ? 1 : 0;
    if (masked == 0) throw std::runtime_error("empty mask");
    const double inv_mask = 1.0 / static_cast<double>(masked);

    std::vector<double> prob(c), lp(c), lq(c), zs(c), zt(c);
    for (idx i = 0; i < n; ++i) {
        double* gi = G.row(i);
        if (mask[i]) {
            if (labels[i] < 0 || labels[i] >= c)
                throw std::runtime_error("label out of range on masked node");
            softmax_row(trace.Z.row(i), c, prob.data());
            for (idx j = 0; j < c; ++j) gi[j] += inv_mask * prob[j];
            gi[labels[i]] -= inv_mask;
        }
        if (Zt && lambda_dt != 0.0) {
            for (idx j = 0; j < c; ++j) {
                zs[j] = trace.Z.at(i, j) / tau;
                zt[j] = Zt->at(i, j) / tau;
            }
            log_softmax_row(zs.data(), c, lp.data());
            log_softmax_row(zt.data(), c, lq.data());
            double kl = 0.0;
            for (idx j = 0; j < c; ++j) kl += std::exp(lp[j]) * (lp[j] - lq[j]);
            // d KL_i / d Z_ij = p_j ((lp_j - lq_j) - KL_i) / tau
            const double scale = lambda_dt / (static_cast<double>(n) * tau);
            for (idx j = 0; j < c; ++j) gi[j] += scale * std::exp(lp[j]) * ((lp[j] - lq[j]) - kl);
        }
    }

    // Z = op T1, T1 = H1 W1, H1 = relu(U), U = op (X W0); op is symmetric.
    Mat dT1(n, c);
    ctx.op.matmul_dense(G.v.data(), c, dT1.v.data());
    Mat dW1;
    gemm_tn(trace.H1, dT1, dW1);
    Mat w1m;
    w1m.rows = p.H;
    w1m.cols = p.C;
    w1m.v = p.W1;
    Mat dH1;
    gemm_nt(dT1, w1m, dH1);
    for (std::size_t k = 0; k < dH1.v.size(); ++k)
        if (trace.U.v[k] <= 0.0) dH1.v[k] = 0.0;
    Mat dP(n, p.H);
    ctx.op.matmul_dense(dH1.v.data(), p.H, dP.v.data());

    std::vector<double> grad(p.dim(), 0.0);
    // dW0 = X^T dP through the transposed CSR
    double* gw0 = grad.data();
    for (idx f = 0; f < ctx.Xt.rows; ++f) {
        double* row = gw0 + f * p.H;
        for (idx k = ctx.Xt.row_ptr[f]; k < ctx.Xt.row_ptr[f + 1]; ++k) {
            const double xv = ctx.Xt.vals[k];
            const double* dpi = dP.row(ctx.Xt.col_idx[k]);
            for (idx h = 0; h < p.H; ++h) row[h] += xv * dpi[h];
        }
    }
    std::copy(dW1.v.begin(), dW1.v.end(), grad.begin() + p.F * p.H);
    return grad;
}

double accuracy(const Mat& Z, const std::vector<int>& labels,
                const std::vector<std::uint8_t>& mask) {
    idx count = 0, hit = 0;
    for (idx i = 0; i < Z.rows; ++i) {
        if (!mask[i]) continue;
        const double* zi = Z.row(i);
        idx best = 0;
        for (idx j = 1; j < Z.cols; ++j)
            if (zi[j] > zi[best]) best = j;
        hit += best == labels[i];
        ++count;
    }
    if (count == 0) throw std::runtime_error("empty mask");
    return static_cast<double>(hit) / static_cast<double>(count);
}

void adam_step(std::vector<double>& theta, const std::vector<double>& grad, AdamState& st,
               double lr) {
    if (st.m.empty()) {
        st.m.assign(theta.size(), 0.0);
        st.v.assign(theta.size(), 0.0);
    }
    if (theta.size() != grad.size() || theta.size() != st.m.size())
        throw std::runtime_error("adam size mismatch");
    ++st.t;
    const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grad[i];
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grad[i] * grad[i];
        theta[i] -= lr * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + st.eps);
    }
}

void sgd_step(std::vector<double>& theta, const std::vector<double>& grad, double lr) {
    if (theta.size() != grad.size()) throw std::runtime_error("sgd size mismatch");
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
}

namespace {
constexpr char kMagic[8] = {'G', 'L', 'T', 'C', 'K', 'P', 'T', '1'};
}

void save_checkpoint(const std::string& path, const GcnParams& p, const CheckpointMeta& meta) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.write(kMagic, sizeof kMagic);
    const std::int64_t dims[3] = {p.F, p.H, p.C};
    out.write(reinterpret_cast<const char*>(dims), sizeof dims);
    out.write(reinterpret_cast<const char*>(p.W0.data()),
              static_cast<std::streamsize>(p.W0.size() * sizeof(double)));
    out.write(reinterpret_cast<const char*>(p.W1.data()),
              static_cast<std::streamsize>(p.W1.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write to " + path);

    nlohmann::json side{{"seed", meta.seed},
                        {"epoch", meta.epoch},
                        {"val_acc", meta.val_acc},
                        {"test_acc", meta.test_acc},
                        {"format", "gltckpt-v1"}};
    std::ofstream js(path + ".json");
    if (!js) throw std::runtime_error("cannot open " + path + ".json");
    js << side.dump(2) << '\n';
}

GcnParams load_checkpoint(const std::string& path, CheckpointMeta* meta) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw std::runtime_error(path + ": not a checkpoint file");
    std::int64_t dims[3];
    in.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!in || dims[0] <= 0 || dims[1] <= 0 || dims[2] <= 0)
        throw std::runtime_error(path + ": bad checkpoint header");
    GcnParams p;
    p.F = dims[0];
    p.H = dims[1];
    p.C = dims[2];
    p.W0.resize(static_cast<std::size_t>(p.F) * p.H);
    p.W1.resize(static_cast<std::size_t>(p.H) * p.C);
    in.read(reinterpret_cast<char*>(p.W0.data()),
            static_cast<std::streamsize>(p.W0.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(p.W1.data()),
            static_cast<std::streamsize>(p.W1.size() * sizeof(double)));
    if (!in) throw std::runtime_error(path + ": truncated checkpoint");

    if (meta) {
        std::ifstream js(path + ".json");
        if (js) {
            nlohmann::json side = nlohmann::json::parse(js, nullptr, false);
            if (!side.is_discarded()) {
                meta->seed = side.value("seed", std::uint64_t{0});
                meta->epoch = side.value("epoch", std::int64_t{-1});
                meta->val_acc = side.value("val_acc", 0.0);
                meta->test_acc = side.value("test_acc", 0.0);
            }
        }
    }
    return p;
}

}  // namespace glt
