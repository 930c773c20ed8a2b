#include "glt/sym_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace glt {

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form, without
// accumulating the transformations. On exit d holds the diagonal and e[i]
// the subdiagonal entry coupling rows i-1 and i (e[0] = 0).
void householder_tridiag(std::vector<double>& a, idx n, std::vector<double>& d,
                         std::vector<double>& e) {
    auto at = [&](idx r, idx c) -> double& { return a[r * n + c]; };
    d.assign(n, 0.0);
    e.assign(n, 0.0);

    for (idx i = n - 1; i >= 1; --i) {
        const idx l = i - 1;
        double h = 0.0;
        if (l > 0) {
            double scale = 0.0;
            for (idx k = 0; k <= l; ++k) scale += std::abs(at(i, k));
            if (scale == 0.0) {
                e[i] = at(i, l);
            } else {
                for (idx k = 0; k <= l; ++k) {
                    at(i, k) /= scale;
                    h += at(i, k) * at(i, k);
                }
                double f = at(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                at(i, l) = f - g;
                // p = A u / h, accumulated in e[0..l]
                double fu = 0.0;
                for (idx j = 0; j <= l; ++j) {
                    g = 0.0;
                    for (idx k = 0; k <= j; ++k) g += at(j, k) * at(i, k);
                    for (idx k = j + 1; k <= l; ++k) g += at(k, j) * at(i, k);
                    e[j] = g / h;
                    fu += e[j] * at(i, j);
                }
                // q = p - (u'p / 2h) u, then A <- A - u q' - q u'
                const double hh = fu / (h + h);
                for (idx j = 0; j <= l; ++j) e[j] -= hh * at(i, j);
                for (idx j = 0; j <= l; ++j) {
                    const double fj = at(i, j);
                    const double qj = e[j];
                    for (idx k = 0; k <= j; ++k) at(j, k) -= fj * e[k] + qj * at(i, k);
                }
            }
        } else {
            e[i] = at(i, l);
        }
    }
    for (idx i = 0; i < n; ++i) d[i] = at(i, i);
    e[0] = 0.0;
}

// Implicit-shift QL sweeps on the tridiagonal (d, e). Eigenvalues land in d
// unsorted. e is consumed.
void tql_eigenvalues(std::vector<double>& d, std::vector<double>& e, idx n) {
    if (n <= 1) return;
    for (idx i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    const double eps = std::numeric_limits<double>::epsilon();

    // Subdiagonals are negligible relative to their neighbors or to the whole
    // tridiagonal; the neighbor-only test stalls inside clusters of near-zero
    // eigenvalues (multi-component graph Laplacians), where d and e are both
    // roundoff-sized and the sweep shift carries no information.
    double anorm = 0.0;
    for (idx i = 0; i < n; ++i) anorm = std::max(anorm, std::abs(d[i]) + std::abs(e[i]));
    const double tol_floor = eps * anorm;

    for (idx l = 0; l < n; ++l) {
        int iter = 0;
        idx m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= tol_floor) break;
            }
            if (m != l) {
                if (iter++ == 50) throw std::runtime_error("QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
                double s = 1.0, c = 1.0, p = 0.0;
                idx i = m - 1;
                for (; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        // deflate and restart this eigenvalue
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

std::vector<double> sym_eigenvalues_inplace(std::vector<double>& a, idx n) {
    if (static_cast<idx>(a.size()) != n * n) throw std::runtime_error("matrix size mismatch");
    std::vector<double> d, e;
    if (n == 0) return d;
    if (n == 1) return {a[0]};
    householder_tridiag(a, n, d, e);
    tql_eigenvalues(d, e, n);
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> sym_eigenvalues(std::vector<double> a, idx n) {
    return sym_eigenvalues_inplace(a, n);
}

}  // namespace glt
