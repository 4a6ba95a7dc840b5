#include "monitor.hpp"

#include "pcgrr/errors.hpp"

#include <cmath>

namespace pcgrr {

std::string_view to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::stagnated: return "stagnated";
    case SolveStatus::max_iter: return "max_iter";
    }
    return "?";
}

std::size_t SolveResult::reported_iteration() const {
    if (argmin_true_residual && status == SolveStatus::stagnated) return argmin_true_residual->first;
    return iterations.empty() ? 0 : iterations.back().iter;
}

namespace detail {

void require_system(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                    std::span<const double> x0) {
    const std::size_t n = A.size();
    if (M.size() != n || b.size() != n || x0.size() != n) {
        throw DimensionError("solve: A is " + std::to_string(n) + "x" + std::to_string(n) +
                             " but M, b, x0 have sizes " + std::to_string(M.size()) + ", " +
                             std::to_string(b.size()) + ", " + std::to_string(x0.size()));
    }
}

IterationMonitor::IterationMonitor(const CsrMatrix& A, std::span<const double> b,
                                   const SolveOptions& opts)
    : A_(A), b_(b), opts_(opts), b_norm_(norm2(b)),
      probing_(opts.probe_true_residual || opts.stop_rule == StopRule::stagnation),
      scratch_(probing_ ? A.size() : 0) {
    if (opts.max_iter < 1) throw std::invalid_argument("SolveOptions: max_iter must be >= 1");
    if (opts.stagnation_window < 1) {
        throw std::invalid_argument("SolveOptions: stagnation_window must be >= 1");
    }
    if (!(opts.tol_rel >= 0.0)) throw std::invalid_argument("SolveOptions: tol_rel must be >= 0");
}

std::optional<SolveStatus> IterationMonitor::record(std::size_t k, std::span<const double> x,
                                                    std::span<const double> r, double alpha,
                                                    double beta, bool replaced) {
    IterationRecord rec;
    rec.iter = k;
    rec.recursive_residual_norm = norm2(r);
    rec.alpha = alpha;
    rec.beta = beta;
    rec.replaced = replaced;
    if (probing_) {
        residual(A_, b_, x, scratch_);
        rec.true_residual_norm = norm2(scratch_);
        for (std::size_t i = 0; i < scratch_.size(); ++i) scratch_[i] -= r[i];
        rec.true_gap_norm = norm2(scratch_);
    }
    if (opts_.on_iterate) opts_.on_iterate(k, x);
    trace_.push_back(rec);

    if (!std::isfinite(rec.recursive_residual_norm)) {
        throw BreakdownError("recursive residual is not finite", k);
    }
    if (opts_.stop_rule == StopRule::stagnation) {
        const double t = *rec.true_residual_norm;
        if (!best_ || t < best_->second) {
            best_ = std::make_pair(k, t);
            best_x_.assign(x.begin(), x.end());
        }
        if (rec.recursive_residual_norm == 0.0 || t == 0.0) return SolveStatus::converged;
        // The true residual of CG is not monotone and can rise for many
        // iterations early on; only a plateau with the recursive residual
        // already below it counts.
        if (k - best_->first >= opts_.stagnation_window &&
            rec.recursive_residual_norm < best_->second) {
            return SolveStatus::stagnated;
        }
    } else {
        if (rec.true_residual_norm && (!best_ || *rec.true_residual_norm < best_->second)) {
            best_ = std::make_pair(k, *rec.true_residual_norm);
        }
        if (rec.recursive_residual_norm <= opts_.tol_rel * b_norm_) return SolveStatus::converged;
    }
    if (k >= opts_.max_iter) return SolveStatus::max_iter;
    return std::nullopt;
}

SolveResult IterationMonitor::finish(SolveStatus status, Vector x, const OpCounts& ops,
                                     std::size_t replacements) {
    SolveResult out;
    out.status = status;
    out.b_norm = b_norm_;
    out.ops = ops;
    out.replacement_count = replacements;
    out.argmin_true_residual = best_;
    if (opts_.stop_rule == StopRule::stagnation && status == SolveStatus::stagnated && best_) {
        out.x = std::move(best_x_);
    } else {
        out.x = std::move(x);
    }
    out.iterations = std::move(trace_);
    return out;
}

SolveResult zero_rhs_result(std::size_t n) {
    SolveResult out;
    out.x.assign(n, 0.0);
    out.status = SolveStatus::converged;
    IterationRecord rec;
    rec.true_residual_norm = 0.0;
    rec.true_gap_norm = 0.0;
    out.iterations.push_back(rec);
    out.argmin_true_residual = std::make_pair(std::size_t{0}, 0.0);
    return out;
}

} // namespace detail
} // namespace pcgrr
