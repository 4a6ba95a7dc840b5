#include "pcgrr/preconditioner.hpp"

#include "pcgrr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pcgrr {

Preconditioner Preconditioner::identity(std::size_t n) {
    Preconditioner m;
    m.kind_ = PrecKind::identity;
    m.mode_ = PrecMode::implicit;
    m.n_ = n;
    m.mu_tilde_ = 0;
    m.inv_inf_norm_ = 1.0;
    return m;
}

Preconditioner Preconditioner::jacobi(const CsrMatrix& A) {
    Preconditioner m;
    m.kind_ = PrecKind::jacobi;
    m.mode_ = PrecMode::explicit_inverse;
    m.n_ = A.size();
    m.inv_diag_ = A.diagonal();
    double inv_max = 0.0;
    for (std::size_t i = 0; i < m.n_; ++i) {
        if (!(m.inv_diag_[i] > 0.0)) {
            throw FactorizationError("jacobi: nonpositive diagonal entry in row " + std::to_string(i),
                                     i);
        }
        m.inv_diag_[i] = 1.0 / m.inv_diag_[i];
        inv_max = std::max(inv_max, m.inv_diag_[i]);
    }
    m.mu_tilde_ = 1;
    m.inv_inf_norm_ = inv_max;
    return m;
}

Preconditioner Preconditioner::icc0(const CsrMatrix& A, double shift, ShiftMode shift_mode) {
    if (!(shift >= 0.0)) throw std::invalid_argument("icc0: shift must be nonnegative");
    Preconditioner m;
    m.kind_ = PrecKind::icc0;
    m.mode_ = PrecMode::implicit;
    m.n_ = A.size();

    LowerFactor& L = m.factor_;
    L.n = A.size();
    L.row_ptr.assign(1, 0);
    const auto rp = A.row_ptr();
    const auto ci = A.col_idx();
    const auto av = A.values();
    for (std::size_t i = 0; i < L.n; ++i) {
        bool has_diag = false;
        for (std::size_t k = rp[i]; k < rp[i + 1] && ci[k] <= i; ++k) {
            double v = av[k];
            if (ci[k] == i) {
                v += shift_mode == ShiftMode::scaled_diagonal ? shift * av[k] : shift;
                has_diag = true;
            }
            L.col_idx.push_back(ci[k]);
            L.values.push_back(v);
        }
        if (!has_diag) {
            throw FactorizationError("icc0: missing diagonal entry in row " + std::to_string(i), i);
        }
        L.row_ptr.push_back(L.col_idx.size());
    }

    // Row-oriented IC(0): l_ij = (a_ij - sum_{k<j} l_ik l_jk) / l_jj on the
    // lower pattern of A, then l_ii = sqrt(a_ii - sum_{k<i} l_ik^2).
    for (std::size_t i = 0; i < L.n; ++i) {
        const std::size_t row_begin = L.row_ptr[i];
        const std::size_t diag = L.row_ptr[i + 1] - 1;
        for (std::size_t kk = row_begin; kk < diag; ++kk) {
            const std::size_t j = L.col_idx[kk];
            const std::size_t j_diag = L.row_ptr[j + 1] - 1;
            double sum = L.values[kk];
            std::size_t a = row_begin;
            std::size_t b = L.row_ptr[j];
            while (a < kk && b < j_diag) {
                if (L.col_idx[a] == L.col_idx[b]) {
                    sum -= L.values[a] * L.values[b];
                    ++a;
                    ++b;
                } else if (L.col_idx[a] < L.col_idx[b]) {
                    ++a;
                } else {
                    ++b;
                }
            }
            L.values[kk] = sum / L.values[j_diag];
        }
        double d = L.values[diag];
        for (std::size_t kk = row_begin; kk < diag; ++kk) d -= L.values[kk] * L.values[kk];
        if (!(d > 0.0) || !std::isfinite(d)) {
            throw FactorizationError("icc0: nonpositive pivot in row " + std::to_string(i) +
                                         "; retry with a larger diagonal shift",
                                     i);
        }
        L.values[diag] = std::sqrt(d);
    }
    return m;
}

void Preconditioner::apply(std::span<const double> r, std::span<double> u) const {
    if (r.size() != n_ || u.size() != n_) {
        throw DimensionError("Preconditioner::apply: vector length does not match operator size " +
                             std::to_string(n_));
    }
    switch (kind_) {
    case PrecKind::identity:
        std::copy(r.begin(), r.end(), u.begin());
        return;
    case PrecKind::jacobi:
        for (std::size_t i = 0; i < n_; ++i) u[i] = r[i] * inv_diag_[i];
        return;
    case PrecKind::icc0: {
        const LowerFactor& L = factor_;
        // L y = r
        for (std::size_t i = 0; i < n_; ++i) {
            const std::size_t diag = L.row_ptr[i + 1] - 1;
            double sum = r[i];
            for (std::size_t k = L.row_ptr[i]; k < diag; ++k) sum -= L.values[k] * u[L.col_idx[k]];
            u[i] = sum / L.values[diag];
        }
        // L^T u = y, column sweep over the rows of L
        for (std::size_t i = n_; i-- > 0;) {
            const std::size_t diag = L.row_ptr[i + 1] - 1;
            u[i] /= L.values[diag];
            const double ui = u[i];
            for (std::size_t k = L.row_ptr[i]; k < diag; ++k) u[L.col_idx[k]] -= L.values[k] * ui;
        }
        return;
    }
    }
}

Vector Preconditioner::apply(std::span<const double> r) const {
    Vector u(n_);
    apply(r, u);
    return u;
}

std::string_view to_string(PrecKind kind) {
    switch (kind) {
    case PrecKind::identity: return "none";
    case PrecKind::jacobi: return "jacobi";
    case PrecKind::icc0: return "icc";
    }
    return "?";
}

} // namespace pcgrr
