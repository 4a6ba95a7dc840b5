#include "pcgrr/replacement.hpp"

#include "monitor.hpp"
#include "pcgrr/errors.hpp"

#include <cmath>

namespace pcgrr {

bool should_replace(double f_prev, double rho_prev, double f_cur, double rho_cur, double tau) {
    return f_prev <= tau * rho_prev && f_cur > tau * rho_cur;
}

ReplacedVectors perform_replacement(const CsrMatrix& A, const Preconditioner& M,
                                    std::span<const double> b, std::span<const double> x_next,
                                    std::span<const double> p) {
    const std::size_t n = A.size();
    if (x_next.size() != n || p.size() != n || b.size() != n || M.size() != n) {
        throw DimensionError("perform_replacement: vector length does not match A");
    }
    ReplacedVectors out{Vector(n), Vector(n), Vector(n), Vector(n), Vector(n), Vector(n)};
    spmv(A, p, out.s);
    M.apply(out.s, out.q);
    spmv(A, out.q, out.z);
    residual(A, b, x_next, out.r);
    M.apply(out.r, out.u);
    spmv(A, out.u, out.w);
    return out;
}

SolveResult solve_pcg_rr(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                         std::span<const double> x0, const SolveOptions& opts,
                         const ReplacementPolicy& policy) {
    detail::require_system(A, M, b, x0);
    if (!(policy.tau > 0.0)) throw std::invalid_argument("ReplacementPolicy: tau must be > 0");
    const std::size_t n = A.size();
    detail::IterationMonitor mon(A, b, opts);
    if (mon.b_norm() == 0.0) return detail::zero_rhs_result(n);
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
    bool replace_latch = false;
    std::size_t replacements = 0;
    for (std::size_t i = 0; !stop; ++i) {
        const double gamma = dot(r, u);
        const double delta = dot(w, u);
        const PipelinedGapEstimator::LiveNorms live{norm2(x), norm2(r), norm2(u),
                                                    norm2(w), norm2(p), norm2(s),
                                                    norm2(q), norm2(z), norm2(m)};
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
            const double denom = delta / gamma - beta / alpha_prev;
            if (denom == 0.0 || !std::isfinite(denom)) {
                throw BreakdownError("zero or non-finite step-length denominator", i);
            }
            alpha = 1.0 / denom;
        } else {
            if (delta == 0.0 || !std::isfinite(delta)) {
                throw BreakdownError("zero or non-finite step-length denominator", i);
            }
            alpha = gamma / delta;
        }
        if (!std::isfinite(alpha)) throw BreakdownError("non-finite step length", i);

        xpby(v, beta, z);
        xpby(m, beta, q);
        xpby(w, beta, s);
        xpby(u, beta, p);
        axpy(alpha, p, x);
        axpy(-alpha, s, r);
        axpy(-alpha, q, u);
        axpy(-alpha, z, w);
        ++ops.iterations;

        bool replaced = false;
        if (auto upd = estimator.iterate(i, live, alpha, beta, replace_latch)) {
            if (upd->reset) replace_latch = false;
            IterationRecord& rec = mon.trace()[i];
            rec.estimated_gap_norm = upd->state.f;
            rec.gap = GapDiagnostics{upd->state.norms, upd->state.alpha, upd->state.beta,
                                     upd->factors, upd->f_prev, live.r, upd->reset};

            const bool under_cap =
                !policy.max_replacements || replacements < *policy.max_replacements;
            if (policy.enabled && under_cap &&
                should_replace(upd->f_prev, upd->state.norms.rho, upd->state.f, live.r,
                               policy.tau)) {
                ReplacedVectors rv = perform_replacement(A, M, b, x, p);
                ops.spmv += 4;
                ops.prec_apply += 2;
                s = std::move(rv.s);
                q = std::move(rv.q);
                z = std::move(rv.z);
                r = std::move(rv.r);
                u = std::move(rv.u);
                w = std::move(rv.w);
                replace_latch = true;
                replaced = true;
                ++replacements;
            }
        }

        stop = mon.record(i + 1, x, r, alpha, beta, replaced);
        gamma_prev = gamma;
        alpha_prev = alpha;
    }
    return mon.finish(*stop, std::move(x), ops, replacements);
}

} // namespace pcgrr
