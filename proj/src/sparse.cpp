#include "pcgrr/sparse.hpp"

#include "pcgrr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcgrr {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": length " + std::to_string(a) +
                             " does not match " + std::to_string(b));
    }
}

} // namespace

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
    if (row_ptr_.size() != n_ + 1) {
        throw std::invalid_argument("CsrMatrix: row_ptr must have n+1 entries");
    }
    if (row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size()) {
        throw std::invalid_argument("CsrMatrix: row_ptr does not span col_idx/values");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t begin = row_ptr_[i];
        const std::size_t end = row_ptr_[i + 1];
        if (end < begin) {
            throw std::invalid_argument("CsrMatrix: row_ptr decreases at row " + std::to_string(i));
        }
        double abs_sum = 0.0;
        for (std::size_t k = begin; k < end; ++k) {
            if (col_idx_[k] >= n_) {
                throw std::invalid_argument("CsrMatrix: column index out of range in row " +
                                            std::to_string(i));
            }
            if (k > begin && col_idx_[k] <= col_idx_[k - 1]) {
                throw std::invalid_argument("CsrMatrix: columns not strictly increasing in row " +
                                            std::to_string(i));
            }
            if (!std::isfinite(values_[k])) {
                throw std::invalid_argument("CsrMatrix: non-finite value in row " + std::to_string(i));
            }
            abs_sum += std::abs(values_[k]);
        }
        mu_ = std::max(mu_, end - begin);
        inf_norm_ = std::max(inf_norm_, abs_sum);
    }
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const std::size_t j = col_idx_[k];
            if (j == i) continue;
            const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j]);
            const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[j + 1]);
            const auto it = std::lower_bound(first, last, i);
            if (it == last || *it != i) {
                throw std::invalid_argument("CsrMatrix: structurally unsymmetric at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
            if (values_[static_cast<std::size_t>(it - col_idx_.begin())] != values_[k]) {
                throw std::invalid_argument("CsrMatrix: numerically unsymmetric at (" +
                                            std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    std::vector<std::size_t> row_ptr(n + 1);
    std::vector<std::size_t> col_idx(n);
    for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
    for (std::size_t i = 0; i < n; ++i) col_idx[i] = i;
    return CsrMatrix(n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
}

double CsrMatrix::at(std::size_t i, std::size_t j) const {
    if (i >= n_ || j >= n_) throw DimensionError("CsrMatrix::at: index out of range");
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

Vector CsrMatrix::diagonal() const {
    Vector d(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) d[i] = at(i, i);
    return d;
}

double CsrMatrix::max_row_sum() const {
    double best = n_ ? -INFINITY : 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) s += values_[k];
        best = std::max(best, s);
    }
    return best;
}

void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y) {
    require_same(x.size(), A.size(), "spmv input");
    require_same(y.size(), A.size(), "spmv output");
    const auto rp = A.row_ptr();
    const auto ci = A.col_idx();
    const auto v = A.values();
    for (std::size_t i = 0; i < A.size(); ++i) {
        double sum = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) sum += v[k] * x[ci[k]];
        y[i] = sum;
    }
}

Vector spmv(const CsrMatrix& A, std::span<const double> x) {
    Vector y(A.size());
    spmv(A, x, y);
    return y;
}

void residual(const CsrMatrix& A, std::span<const double> b, std::span<const double> x,
              std::span<double> out) {
    require_same(b.size(), A.size(), "residual rhs");
    spmv(A, x, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = b[i] - out[i];
}

double dot(std::span<const double> x, std::span<const double> y) {
    require_same(x.size(), y.size(), "dot");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i] + y[i];
}

void xpby(std::span<const double> x, double beta, std::span<double> y) {
    require_same(x.size(), y.size(), "xpby");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + beta * y[i];
}

double norm_inf_matrix(const CsrMatrix& A) { return A.inf_norm(); }

std::size_t max_row_nnz(const CsrMatrix& A) { return A.mu(); }

CsrMatrix gen_laplacian_2d(std::size_t nx, std::size_t ny) {
    if (nx == 0 || ny == 0) throw std::invalid_argument("gen_laplacian_2d: zero grid dimension");
    const std::size_t n = nx * ny;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    row_ptr.reserve(n + 1);
    col_idx.reserve(5 * n);
    values.reserve(5 * n);
    row_ptr.push_back(0);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const std::size_t k = ix + nx * iy;
            auto push = [&](std::size_t col, double v) {
                col_idx.push_back(col);
                values.push_back(v);
            };
            if (iy > 0) push(k - nx, -1.0);
            if (ix > 0) push(k - 1, -1.0);
            push(k, 4.0);
            if (ix + 1 < nx) push(k + 1, -1.0);
            if (iy + 1 < ny) push(k + nx, -1.0);
            row_ptr.push_back(col_idx.size());
        }
    }
    return CsrMatrix(n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

} // namespace pcgrr
