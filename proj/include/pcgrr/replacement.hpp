#pragma once

#include "pcgrr/preconditioner.hpp"
#include "pcgrr/solve_types.hpp"

#include <cmath>
#include <optional>

namespace pcgrr {

struct ReplacementPolicy {
    double tau = std::sqrt(0x1p-52);
    bool enabled = true;
    /// Hard cap on replacements per solve; unlimited when unset.
    std::optional<std::size_t> max_replacements;
};

/**
 * Replacement criterion: fire when the estimated gap crosses tau times the
 * recursive residual norm between two consecutive iterates,
 *
 *     f_prev <= tau * rho_prev   and   f_cur > tau * rho_cur.
 *
 * In the solver, iteration i passes f_prev = est ||f_{i-1}||,
 * rho_prev = ||r_{i-1}||, f_cur = est ||f_i||, rho_cur = ||r_i||; a firing
 * replaces r_{i+1} and the auxiliaries of step i.
 */
bool should_replace(double f_prev, double rho_prev, double f_cur, double rho_cur, double tau);

/// Explicitly recomputed vectors replacing the recursive ones.
struct ReplacedVectors {
    Vector r;  ///< b - A x_{i+1}
    Vector u;  ///< M^-1 r
    Vector w;  ///< A u
    Vector s;  ///< A p_i
    Vector q;  ///< M^-1 s
    Vector z;  ///< A q
};

/// Recomputes r, u, w (for x_{i+1}) and s, q, z (for p_i). x and p are not
/// touched. Four products with A and two preconditioner applications.
ReplacedVectors perform_replacement(const CsrMatrix& A, const Preconditioner& M,
                                    std::span<const double> b, std::span<const double> x_next,
                                    std::span<const double> p);

/// Pipelined CG with automated residual replacement. With policy.enabled
/// false the iteration is exactly solve_pcg_pipelined's; the estimator still
/// runs and is reported in the trace.
SolveResult solve_pcg_rr(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                         std::span<const double> x0, const SolveOptions& opts = {},
                         const ReplacementPolicy& policy = {});

} // namespace pcgrr
