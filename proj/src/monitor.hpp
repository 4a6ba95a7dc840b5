#pragma once

#include "pcgrr/solve_types.hpp"

namespace pcgrr::detail {

void require_system(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                    std::span<const double> x0);

/// Bookkeeping shared by every solver: trace records, true-residual probes
/// and the stopping rules. Never alters the iteration it observes.
class IterationMonitor {
public:
    IterationMonitor(const CsrMatrix& A, std::span<const double> b, const SolveOptions& opts);

    /// Records iterate k. Returns the final status when the solve should stop.
    std::optional<SolveStatus> record(std::size_t k, std::span<const double> x,
                                      std::span<const double> r, double alpha, double beta,
                                      bool replaced = false);

    std::vector<IterationRecord>& trace() noexcept { return trace_; }
    double b_norm() const noexcept { return b_norm_; }

    SolveResult finish(SolveStatus status, Vector x, const OpCounts& ops,
                       std::size_t replacements = 0);

private:
    const CsrMatrix& A_;
    std::span<const double> b_;
    const SolveOptions& opts_;
    double b_norm_;
    bool probing_;
    std::vector<IterationRecord> trace_;
    Vector scratch_;
    Vector best_x_;
    std::optional<std::pair<std::size_t, double>> best_;
};

/// Result for b = 0: the solution is x = 0.
SolveResult zero_rhs_result(std::size_t n);

} // namespace pcgrr::detail
