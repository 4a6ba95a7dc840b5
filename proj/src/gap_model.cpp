#include "pcgrr/gap_model.hpp"

#include "pcgrr/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace pcgrr {

ModelConstants ModelConstants::from(const CsrMatrix& A, const Preconditioner& M,
                                    std::span<const double> b, double epsilon,
                                    MuDefinition mu_def, NormBound norm_bound) {
    if (b.size() != A.size() || M.size() != A.size()) {
        throw DimensionError("ModelConstants: operator and right-hand side sizes differ");
    }
    ModelConstants c;
    c.n = A.size();
    c.epsilon = epsilon;
    const double scale = norm_bound == NormBound::sqrt_n_inf ? c.sqrt_n() : 1.0;
    c.theta = scale * A.inf_norm();
    c.mu = mu_def == MuDefinition::max_row_nonzeros ? static_cast<double>(A.mu()) : A.max_row_sum();
    c.mode = M.mode();
    if (M.mode() == PrecMode::explicit_inverse) {
        c.mu_tilde = static_cast<double>(M.mu_tilde().value());
        c.inv_norm = scale * M.inv_inf_norm().value();
    }
    c.zeta = norm2(b);
    return c;
}

double ModelConstants::sqrt_n() const { return std::sqrt(static_cast<double>(n)); }

BoundFactors bound_factors_pipelined(const GapState& state, const ModelConstants& c) {
    if (!state.has_norms) {
        throw std::logic_error("bound_factors_pipelined: no cached norms before iteration 1");
    }
    const PipelinedNorms& v = state.norms;
    const double a = std::abs(state.alpha);
    const double b = std::abs(state.beta);
    const double th = c.theta;
    BoundFactors e;
    e.e_f = th * v.chi + 2 * a * th * v.pi + v.rho + 2 * a * v.sigma;
    e.e_g = th * v.xi + 2 * b * th * v.pi_prev + v.omega + 2 * b * v.sigma_prev;
    e.e_h = th * v.xi + 2 * a * th * v.phi + v.omega + 2 * a * v.psi;
    if (c.mode == PrecMode::implicit) {
        e.e_j = (c.mu * c.sqrt_n() + 2) * th * v.nu + 2 * b * th * v.phi_prev + 2 * b * v.psi_prev;
    } else {
        e.e_j = 2 * b * th * v.phi_prev +
                ((c.mu + 2 * c.mu_tilde.value()) * c.sqrt_n() + 2) * th * c.inv_norm.value() * v.omega +
                2 * b * v.psi_prev;
    }
    return e;
}

GapState gap_step_pipelined(const GapState& state, const BoundFactors& e, double alpha, double beta,
                            double epsilon) {
    const double a = std::abs(alpha);
    const double b = std::abs(beta);
    GapState next = state;
    next.f = state.f + a * b * state.g + a * state.h + std::sqrt(e.e_f) * epsilon +
             a * std::sqrt(e.e_g) * epsilon;
    next.g = b * state.g + state.h + std::sqrt(e.e_g) * epsilon;
    next.h = state.h + a * b * state.j + std::sqrt(e.e_h) * epsilon + a * std::sqrt(e.e_j) * epsilon;
    next.j = b * state.j + std::sqrt(e.e_j) * epsilon;
    for (double v : {next.f, next.g, next.h, next.j}) {
        if (!std::isfinite(v)) throw std::domain_error("gap_step_pipelined: non-finite estimate");
    }
    return next;
}

GapState gap_reset_pipelined(const GapState& state, const ModelConstants& c, double alpha,
                             const BoundFactors& e) {
    const PipelinedNorms& v = state.norms;
    const double eps = c.epsilon;
    const double a = std::abs(alpha);
    const double mu_sqrt_n = c.mu * c.sqrt_n();
    GapState next = state;
    next.f = eps * std::sqrt((mu_sqrt_n + 1) * c.theta * v.chi + c.zeta) +
             eps * std::sqrt(a * mu_sqrt_n * c.theta * v.pi) + std::sqrt(e.e_f) * eps;
    next.g = eps * std::sqrt(mu_sqrt_n * c.theta * v.pi);
    next.h = eps * std::sqrt(mu_sqrt_n * c.theta * v.xi) +
             eps * std::sqrt(a * mu_sqrt_n * c.theta * v.phi) + std::sqrt(e.e_h) * eps;
    next.j = eps * std::sqrt(mu_sqrt_n * c.theta * v.phi);
    return next;
}

double bound_factor_cg(double chi, double pi, double rho, double alpha, const ModelConstants& c) {
    return c.theta * chi + (c.mu * c.sqrt_n() + 4) * std::abs(alpha) * c.theta * pi + rho;
}

double gap_step_cg(double f, double e_f, double epsilon) { return f + std::sqrt(e_f) * epsilon; }

std::pair<double, double> bound_factors_cgcg(const CgcgNorms& v, double alpha, double beta,
                                             const ModelConstants& c) {
    const double a = std::abs(alpha);
    const double b = std::abs(beta);
    const double th = c.theta;
    const double e_f = th * v.chi + 2 * a * th * v.pi + v.rho + 2 * a * v.sigma;
    double e_g = 0.0;
    if (c.mode == PrecMode::implicit) {
        // ||M^-1|| unavailable: bound the u and Au round-off through ||u_i|| instead.
        e_g = (c.mu * c.sqrt_n() + 2) * th * v.xi + 2 * b * th * v.pi_prev + 2 * b * v.sigma_prev;
    } else {
        e_g = 2 * b * th * v.pi_prev +
              ((c.mu + 2 * c.mu_tilde.value()) * c.sqrt_n() + 2) * th * c.inv_norm.value() * v.rho +
              2 * b * v.sigma_prev;
    }
    return {e_f, e_g};
}

std::pair<double, double> gap_step_cgcg(double f, double g, double e_f, double e_g, double alpha,
                                        double beta, double epsilon) {
    const double a = std::abs(alpha);
    const double b = std::abs(beta);
    const double f_next = f + a * b * g + std::sqrt(e_f) * epsilon + a * std::sqrt(e_g) * epsilon;
    const double g_next = b * g + std::sqrt(e_g) * epsilon;
    return {f_next, g_next};
}

double initial_gap_residual(double x_norm, const ModelConstants& c) {
    return c.epsilon * std::sqrt((c.mu * c.sqrt_n() + 1) * c.theta * x_norm + c.zeta);
}

double initial_gap_product(double v_norm, const ModelConstants& c) {
    return c.epsilon * std::sqrt(c.mu * c.sqrt_n() * c.theta * v_norm);
}

double true_gap_probe(const CsrMatrix& A, std::span<const double> b, std::span<const double> x,
                      std::span<const double> r) {
    if (r.size() != A.size()) throw DimensionError("true_gap_probe: residual length mismatch");
    Vector t(A.size());
    residual(A, b, x, t);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] -= r[k];
    return norm2(t);
}

std::optional<PipelinedGapEstimator::Update>
PipelinedGapEstimator::iterate(std::size_t i, const LiveNorms& live, double alpha_i, double beta_i,
                               bool reset) {
    std::optional<Update> out;
    if (i > 0) {
        PipelinedNorms& v = state_.norms;
        v.pi_prev = v.pi;
        v.sigma_prev = v.sigma;
        v.phi_prev = v.phi;
        v.psi_prev = v.psi;
        v.chi = last_.x;
        v.rho = last_.r;
        v.xi = last_.u;
        v.omega = last_.w;
        v.pi = live.p;
        v.sigma = live.s;
        v.phi = live.q;
        v.psi = live.z;
        v.nu = live.m;
        state_.alpha = alpha_last_;
        state_.beta = beta_last_;
        state_.has_norms = true;

        Update u;
        u.f_prev = state_.f;
        u.factors = bound_factors_pipelined(state_, c_);
        u.reset = i == 1 || reset;
        state_ = u.reset ? gap_reset_pipelined(state_, c_, state_.alpha, u.factors)
                         : gap_step_pipelined(state_, u.factors, state_.alpha, state_.beta, c_.epsilon);
        u.state = state_;
        out = u;
    }
    last_ = live;
    alpha_last_ = alpha_i;
    beta_last_ = beta_i;
    return out;
}

} // namespace pcgrr
