#pragma once

#include <cstdint>
#include <vector>

namespace glt {

using idx = std::int64_t;

// Compressed sparse row matrix, double entries. Column indices within a row
// are kept in ascending order by every constructor in this codebase.
struct Csr {
    idx rows = 0;
    idx cols = 0;
    std::vector<idx> row_ptr;  // size rows+1
    std::vector<idx> col_idx;  // size nnz
    std::vector<double> vals;  // size nnz

    idx nnz() const { return static_cast<idx>(col_idx.size()); }

    // y = A x
    void matvec(const double* x, double* y) const {
        for (idx i = 0; i < rows; ++i) {
            double acc = 0.0;
            for (idx k = row_ptr[i]; k < row_ptr[i + 1]; ++k) acc += vals[k] * x[col_idx[k]];
            y[i] = acc;
        }
    }

    // Y = A X where X is row-major rows=cols(A) x width. Y must be rows x width.
    void matmul_dense(const double* x, idx width, double* y) const {
        for (idx i = 0; i < rows; ++i) {
            double* yi = y + i * width;
            for (idx c = 0; c < width; ++c) yi[c] = 0.0;
            for (idx k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                const double v = vals[k];
                const double* xj = x + col_idx[k] * width;
                for (idx c = 0; c < width; ++c) yi[c] += v * xj[c];
            }
        }
    }

    Csr transposed() const {
        Csr t;
        t.rows = cols;
        t.cols = rows;
        t.row_ptr.assign(static_cast<std::size_t>(cols) + 1, 0);
        for (idx j : col_idx) ++t.row_ptr[j + 1];
        for (idx i = 0; i < cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
        t.col_idx.resize(col_idx.size());
        t.vals.resize(vals.size());
        std::vector<idx> cursor(t.row_ptr.begin(), t.row_ptr.end() - 1);
        for (idx i = 0; i < rows; ++i) {
            for (idx k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                idx pos = cursor[col_idx[k]]++;
                t.col_idx[pos] = i;
                t.vals[pos] = vals[k];
            }
        }
        return t;
    }
};

}  // namespace glt
