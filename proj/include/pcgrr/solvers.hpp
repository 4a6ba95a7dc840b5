#pragma once

#include "pcgrr/preconditioner.hpp"
#include "pcgrr/solve_types.hpp"

namespace pcgrr {

/// Classical preconditioned CG (Hestenes-Stiefel recurrences): two
/// reduction phases per iteration. Throws BreakdownError if (s_i, p_i) <= 0.
SolveResult solve_cg(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                     std::span<const double> x0, const SolveOptions& opts = {});

/// Chronopoulos/Gear CG: s_i = A p_i is carried by a recurrence and the two
/// dot products are fused into one reduction phase.
SolveResult solve_cgcg(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                       std::span<const double> x0, const SolveOptions& opts = {});

/// Pipelined CG: recurrences for s, w, z, u, q; the single reduction phase
/// (gamma, delta) is issued before m_i = M^-1 w_i and v_i = A m_i so that,
/// in a distributed setting, it overlaps them.
SolveResult solve_pcg_pipelined(const CsrMatrix& A, const Preconditioner& M,
                                std::span<const double> b, std::span<const double> x0,
                                const SolveOptions& opts = {});

} // namespace pcgrr
