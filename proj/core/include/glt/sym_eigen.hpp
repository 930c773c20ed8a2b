#pragma once

#include <vector>

#include "glt/csr.hpp"

namespace glt {

// Eigenvalues of a dense symmetric matrix (row-major, n x n), ascending.
// Householder reduction to tridiagonal form followed by implicit-shift QL.
// Only the lower triangle is read. The input buffer is destroyed.
// Throws if QL fails to converge (50 sweeps per eigenvalue).
std::vector<double> sym_eigenvalues_inplace(std::vector<double>& a, idx n);

std::vector<double> sym_eigenvalues(std::vector<double> a, idx n);

}  // namespace glt
