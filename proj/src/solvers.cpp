#include "pcgrr/solvers.hpp"

#include "monitor.hpp"
#include "pcgrr/errors.hpp"

#include <cmath>
#include <tuple>

namespace pcgrr {

using detail::IterationMonitor;

namespace {

double checked_alpha(double numerator, double denominator, std::size_t iteration) {
    if (denominator == 0.0 || !std::isfinite(denominator)) {
        throw BreakdownError("zero or non-finite step-length denominator", iteration);
    }
    const double alpha = numerator / denominator;
    if (!std::isfinite(alpha)) throw BreakdownError("non-finite step length", iteration);
    return alpha;
}

} // namespace

SolveResult solve_cg(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                     std::span<const double> x0, const SolveOptions& opts) {
    detail::require_system(A, M, b, x0);
    const std::size_t n = A.size();
    IterationMonitor mon(A, b, opts);
    if (mon.b_norm() == 0.0) return detail::zero_rhs_result(n);
    const bool estimating = opts.estimate_gap;
    const ModelConstants c =
        ModelConstants::from(A, M, b, opts.epsilon, opts.mu_def, opts.norm_bound);

    OpCounts ops;
    Vector x(x0.begin(), x0.end()), r(n), u(n), p(n), s(n);
    residual(A, b, x, r);
    ++ops.spmv;
    M.apply(r, u);
    ++ops.prec_apply;
    p = u;
    double gamma = dot(r, u);
    ++ops.reduction_groups;

    double f = 0.0;
    auto stop = mon.record(0, x, r, 0.0, 0.0);
    if (estimating) {
        f = initial_gap_residual(norm2(x), c);
        mon.trace().back().estimated_gap_norm = f;
    }
    double beta = 0.0;
    for (std::size_t i = 0; !stop; ++i) {
        spmv(A, p, s);
        ++ops.spmv;
        const double sp = dot(s, p);
        ++ops.reduction_groups;
        if (!(sp > 0.0)) throw BreakdownError("(s, p) <= 0: matrix not SPD or fatal round-off", i);
        const double alpha = checked_alpha(gamma, sp, i);

        double e_f = 0.0;
        if (estimating) e_f = bound_factor_cg(norm2(x), norm2(p), norm2(r), alpha, c);

        axpy(alpha, p, x);
        axpy(-alpha, s, r);
        M.apply(r, u);
        ++ops.prec_apply;
        const double gamma_next = dot(r, u);
        ++ops.reduction_groups;
        ++ops.iterations;

        stop = mon.record(i + 1, x, r, alpha, beta);
        if (estimating) {
            f = gap_step_cg(f, e_f, c.epsilon);
            mon.trace().back().estimated_gap_norm = f;
        }
        if (stop) break;

        beta = gamma_next / gamma;
        xpby(u, beta, p);
        gamma = gamma_next;
    }
    return mon.finish(*stop, std::move(x), ops);
}

SolveResult solve_cgcg(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                       std::span<const double> x0, const SolveOptions& opts) {
    detail::require_system(A, M, b, x0);
    const std::size_t n = A.size();
    IterationMonitor mon(A, b, opts);
    if (mon.b_norm() == 0.0) return detail::zero_rhs_result(n);
    const bool estimating = opts.estimate_gap;
    const ModelConstants c =
        ModelConstants::from(A, M, b, opts.epsilon, opts.mu_def, opts.norm_bound);

    OpCounts ops;
    Vector x(x0.begin(), x0.end()), r(n), u(n), w(n), p(n, 0.0), s(n, 0.0);
    residual(A, b, x, r);
    ++ops.spmv;
    M.apply(r, u);
    ++ops.prec_apply;
    spmv(A, u, w);
    ++ops.spmv;
    double gamma = dot(r, u);
    double delta = dot(w, u);
    ++ops.reduction_groups;

    auto stop = mon.record(0, x, r, 0.0, 0.0);
    double f = 0.0;
    double g = 0.0;
    if (estimating) {
        f = initial_gap_residual(norm2(x), c);
        mon.trace().back().estimated_gap_norm = f;
    }
    if (stop) return mon.finish(*stop, std::move(x), ops);

    double alpha = checked_alpha(gamma, delta, 0);
    double beta = 0.0;
    double pi_prev = 0.0;
    double sigma_prev = 0.0;
    for (std::size_t i = 0;; ++i) {
        xpby(u, beta, p);
        xpby(w, beta, s);

        std::pair<double, double> e{0.0, 0.0};
        if (estimating) {
            CgcgNorms v{norm2(x), norm2(p), norm2(r), norm2(s), norm2(u), pi_prev, sigma_prev};
            e = bound_factors_cgcg(v, alpha, beta, c);
            // s_0 = A u_0 = A p_0 is explicit: its gap is the round-off of one product.
            if (i == 0) e.second = c.mu * c.sqrt_n() * c.theta * v.pi;
            pi_prev = v.pi;
            sigma_prev = v.sigma;
        }

        axpy(alpha, p, x);
        axpy(-alpha, s, r);
        M.apply(r, u);
        ++ops.prec_apply;
        spmv(A, u, w);
        ++ops.spmv;
        const double gamma_next = dot(r, u);
        delta = dot(w, u);
        ++ops.reduction_groups;
        ++ops.iterations;

        stop = mon.record(i + 1, x, r, alpha, beta);
        if (estimating) {
            std::tie(f, g) = gap_step_cgcg(f, g, e.first, e.second, alpha, beta, c.epsilon);
            mon.trace().back().estimated_gap_norm = f;
        }
        if (stop) break;

        if (gamma_next == 0.0) throw BreakdownError("gamma = 0 with nonzero residual", i + 1);
        const double beta_next = gamma_next / gamma;
        alpha = checked_alpha(1.0, delta / gamma_next - beta_next / alpha, i + 1);
        beta = beta_next;
        gamma = gamma_next;
    }
    return mon.finish(*stop, std::move(x), ops);
}

SolveResult solve_pcg_pipelined(const CsrMatrix& A, const Preconditioner& M,
                                std::span<const double> b, std::span<const double> x0,
                                const SolveOptions& opts) {
    detail::require_system(A, M, b, x0);
    const std::size_t n = A.size();
    IterationMonitor mon(A, b, opts);
    if (mon.b_norm() == 0.0) return detail::zero_rhs_result(n);
    const bool estimating = opts.estimate_gap;
    PipelinedGapEstimator estimator(ModelConstants::from(A, M, b, opts.epsilon, opts.mu_def,
                                                         opts.norm_bound));

    OpCounts ops;
    Vector x(x0.begin(), x0.end()), r(n), u(n), w(n);
    Vector m(n, 0.0), v(n, 0.0), z(n, 0.0), q(n, 0.0), s(n, 0.0), p(n, 0.0);
    residual(A, b, x, r);
    ++ops.spmv;
    M.apply(r, u);
    ++ops.prec_apply;
    spmv(A, u, w);
    ++ops.spmv;

    auto stop = mon.record(0, x, r, 0.0, 0.0);
    double gamma_prev = 0.0;
    double alpha_prev = 0.0;
    for (std::size_t i = 0; !stop; ++i) {
        // Single reduction phase; the norms for the gap estimate join it.
        const double gamma = dot(r, u);
        const double delta = dot(w, u);
        PipelinedGapEstimator::LiveNorms live;
        if (estimating) {
            live = {norm2(x), norm2(r), norm2(u), norm2(w), norm2(p),
                    norm2(s), norm2(q), norm2(z), norm2(m)};
        }
        ++ops.reduction_groups;

        M.apply(w, m);
        ++ops.prec_apply;
        spmv(A, m, v);
        ++ops.spmv;

        double alpha = 0.0;
        double beta = 0.0;
        if (i > 0) {
            if (gamma == 0.0) throw BreakdownError("gamma = 0 with nonzero residual", i);
            beta = gamma / gamma_prev;
            alpha = checked_alpha(1.0, delta / gamma - beta / alpha_prev, i);
        } else {
            alpha = checked_alpha(gamma, delta, i);
        }

        xpby(v, beta, z);
        xpby(m, beta, q);
        xpby(w, beta, s);
        xpby(u, beta, p);
        axpy(alpha, p, x);
        axpy(-alpha, s, r);
        axpy(-alpha, q, u);
        axpy(-alpha, z, w);
        ++ops.iterations;

        if (estimating) {
            if (auto upd = estimator.iterate(i, live, alpha, beta, false)) {
                IterationRecord& rec = mon.trace()[i];
                rec.estimated_gap_norm = upd->state.f;
                rec.gap = GapDiagnostics{upd->state.norms, upd->state.alpha, upd->state.beta,
                                         upd->factors, upd->f_prev, live.r, upd->reset};
            }
        }

        stop = mon.record(i + 1, x, r, alpha, beta);
        gamma_prev = gamma;
        alpha_prev = alpha;
    }
    return mon.finish(*stop, std::move(x), ops);
}

} // namespace pcgrr
