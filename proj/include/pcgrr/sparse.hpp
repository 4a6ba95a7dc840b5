#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcgrr {

using Vector = std::vector<double>;

/**
 * Square sparse matrix in compressed sparse row form.
 *
 * The full symmetric matrix is stored (both triangles). Column indices are
 * strictly increasing within every row. The constructor rejects anything
 * that is not structurally and numerically symmetric, so every CsrMatrix in
 * the library is a valid operand for the CG variants.
 *
 * Two quantities used by the rounding-error model are cached on
 * construction: `mu()`, the maximum number of nonzeros in a row, and
 * `inf_norm()`, the maximum absolute row sum.
 */
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
              std::vector<double> values);

    static CsrMatrix identity(std::size_t n);

    std::size_t size() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    std::size_t mu() const noexcept { return mu_; }
    double inf_norm() const noexcept { return inf_norm_; }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Entry (i, j), zero when not stored.
    double at(std::size_t i, std::size_t j) const;
    Vector diagonal() const;
    /// Largest row sum of signed entries.
    double max_row_sum() const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
    std::size_t mu_ = 0;
    double inf_norm_ = 0.0;
};

// Kernels. All accumulate in index order so results are bit-reproducible.

/// y = A x, each row summed left to right.
void spmv(const CsrMatrix& A, std::span<const double> x, std::span<double> y);
Vector spmv(const CsrMatrix& A, std::span<const double> x);

/// out = b - A x, computed as fl(b - fl(Ax)).
void residual(const CsrMatrix& A, std::span<const double> b, std::span<const double> x,
              std::span<double> out);

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

/// y <- alpha x + y
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// y <- x + beta y
void xpby(std::span<const double> x, double beta, std::span<double> y);

double norm_inf_matrix(const CsrMatrix& A);
std::size_t max_row_nnz(const CsrMatrix& A);

/// Five-point finite-difference Laplacian on an nx-by-ny grid with
/// homogeneous Dirichlet boundaries: 4 on the diagonal, -1 per neighbour.
/// Unknown (ix, iy) maps to row ix + nx * iy.
CsrMatrix gen_laplacian_2d(std::size_t nx, std::size_t ny);

} // namespace pcgrr
