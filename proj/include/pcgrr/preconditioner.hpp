#pragma once

#include "pcgrr/sparse.hpp"

#include <optional>
#include <string_view>

namespace pcgrr {

enum class PrecKind { identity, jacobi, icc0 };

/// Whether M^-1 exists as an explicit operator with known sparsity and norm.
/// Selects which bound the gap model uses for the q/z recurrences.
enum class PrecMode { explicit_inverse, implicit };

/// How the IC(0) diagonal shift eta is applied:
/// scaled_diagonal factors A + eta * diag(A), identity factors A + eta * I.
enum class ShiftMode { scaled_diagonal, identity };

/// Lower-triangular IC(0) factor, CSR with the diagonal last in every row.
struct LowerFactor {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
};

/**
 * Symmetric positive definite preconditioning operator M^-1.
 *
 * The identity is treated as implicit: the gap model then uses the
 * formulation based on ||m_i|| rather than ||M^-1||, which for M = I is the
 * sharper of the two. Jacobi is explicit with one nonzero per row. IC(0)
 * never forms M^-1.
 */
class Preconditioner {
public:
    static Preconditioner identity(std::size_t n);
    /// Throws FactorizationError naming the first row with a_ii <= 0.
    static Preconditioner jacobi(const CsrMatrix& A);
    /// Zero-fill incomplete Cholesky of the shifted matrix. Throws
    /// FactorizationError when a pivot is not positive.
    static Preconditioner icc0(const CsrMatrix& A, double shift = 0.0,
                               ShiftMode mode = ShiftMode::scaled_diagonal);

    PrecKind kind() const noexcept { return kind_; }
    PrecMode mode() const noexcept { return mode_; }
    std::size_t size() const noexcept { return n_; }
    /// Max nonzeros per row of M^-1. Unset for IC(0); 0 for the identity by convention.
    std::optional<std::size_t> mu_tilde() const noexcept { return mu_tilde_; }
    /// ||M^-1||_inf. Unset for IC(0).
    std::optional<double> inv_inf_norm() const noexcept { return inv_inf_norm_; }
    const LowerFactor& factor() const noexcept { return factor_; }

    void apply(std::span<const double> r, std::span<double> u) const;
    Vector apply(std::span<const double> r) const;

private:
    PrecKind kind_ = PrecKind::identity;
    PrecMode mode_ = PrecMode::implicit;
    std::size_t n_ = 0;
    std::optional<std::size_t> mu_tilde_;
    std::optional<double> inv_inf_norm_;
    Vector inv_diag_;
    LowerFactor factor_;
};

std::string_view to_string(PrecKind kind);

} // namespace pcgrr
