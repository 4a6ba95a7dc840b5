#pragma once

#include "pcgrr/preconditioner.hpp"
#include "pcgrr/sparse.hpp"

#include <optional>
#include <utility>

namespace pcgrr {

/// Reading of the dimension factor mu in the rounding-error bounds.
enum class MuDefinition {
    max_row_nonzeros,  ///< maximum number of nonzeros in a row of A (default)
    max_row_sum,       ///< literal maximum signed row sum of A
};

/// Computable stand-in for the 2-norms ||A|| and ||M^-1||.
enum class NormBound {
    /// ||.||_inf: an upper bound on the 2-norm of a symmetric matrix (default).
    symmetric_inf,
    /// sqrt(n) * ||.||_inf: the bound valid for any square matrix.
    sqrt_n_inf,
};

/**
 * Problem-wide constants of the residual-gap model.
 *
 * ||A||_2 never appears directly: theta stands in for it, and inv_norm for
 * ||M^-1||_2 when the preconditioner is explicit. Both follow NormBound.
 */
struct ModelConstants {
    std::size_t n = 0;
    double epsilon = 0x1p-52;
    double theta = 0.0;
    double mu = 0.0;
    std::optional<double> mu_tilde;
    std::optional<double> inv_norm;
    double zeta = 0.0;  ///< ||b||_2
    PrecMode mode = PrecMode::implicit;

    static ModelConstants from(const CsrMatrix& A, const Preconditioner& M, std::span<const double> b,
                               double epsilon = 0x1p-52,
                               MuDefinition mu_def = MuDefinition::max_row_nonzeros,
                               NormBound norm_bound = NormBound::symmetric_inf);

    double sqrt_n() const;
};

/// Vector norms feeding the pipelined bound factors for iteration i. Every
/// entry refers to iteration i-1 vectors (x, p, s, u, w, q, z, m, r); the
/// *_prev entries to iteration i-2.
struct PipelinedNorms {
    double chi = 0.0;    ///< ||x_{i-1}||
    double pi = 0.0;     ///< ||p_{i-1}||
    double sigma = 0.0;  ///< ||s_{i-1}||
    double xi = 0.0;     ///< ||u_{i-1}||
    double omega = 0.0;  ///< ||w_{i-1}||
    double phi = 0.0;    ///< ||q_{i-1}||
    double psi = 0.0;    ///< ||z_{i-1}||
    double nu = 0.0;     ///< ||m_{i-1}||
    double rho = 0.0;    ///< ||r_{i-1}||
    double pi_prev = 0.0;
    double sigma_prev = 0.0;
    double phi_prev = 0.0;
    double psi_prev = 0.0;
};

/// Running estimates of ||f_i||, ||g_{i-1}||, ||h_i||, ||j_{i-1}|| with the
/// one-iteration-delayed norms and coefficients (alpha_{i-1}, beta_{i-1})
/// they were built from.
struct GapState {
    double f = 0.0;
    double g = 0.0;
    double h = 0.0;
    double j = 0.0;
    PipelinedNorms norms;
    double alpha = 0.0;
    double beta = 0.0;
    bool has_norms = false;
};

struct BoundFactors {
    double e_f = 0.0;
    double e_g = 0.0;
    double e_h = 0.0;
    double e_j = 0.0;
};

/// Local rounding-error factors of the pipelined recurrences, evaluated from
/// the cached norms and coefficients in `state`. The q/z factor depends on
/// the preconditioner mode. Throws std::logic_error if no norms are cached.
BoundFactors bound_factors_pipelined(const GapState& state, const ModelConstants& c);

/// One step of the square-root estimate:
///   f' = f + |a b| g + |a| h + sqrt(e_f) eps + |a| sqrt(e_g) eps
///   g' = |b| g + h + sqrt(e_g) eps
///   h' = h + |a b| j + sqrt(e_h) eps + |a| sqrt(e_j) eps
///   j' = |b| j + sqrt(e_j) eps
GapState gap_step_pipelined(const GapState& state, const BoundFactors& e, double alpha, double beta,
                            double epsilon);

/// Restarts the estimate from the initial-gap bounds (square-root scaled),
/// used at the first estimated iteration and right after a replacement.
GapState gap_reset_pipelined(const GapState& state, const ModelConstants& c, double alpha,
                             const BoundFactors& e);

// Classical CG.
double bound_factor_cg(double chi, double pi, double rho, double alpha, const ModelConstants& c);
double gap_step_cg(double f, double e_f, double epsilon);

// Chronopoulos/Gear CG.
struct CgcgNorms {
    double chi = 0.0;    ///< ||x_i||
    double pi = 0.0;     ///< ||p_i||
    double rho = 0.0;    ///< ||r_i||
    double sigma = 0.0;  ///< ||s_i||
    double xi = 0.0;     ///< ||u_i||
    double pi_prev = 0.0;
    double sigma_prev = 0.0;
};
/// (e_f, e_g) for step i with coefficients alpha_i, beta_i.
std::pair<double, double> bound_factors_cgcg(const CgcgNorms& norms, double alpha, double beta,
                                             const ModelConstants& c);
std::pair<double, double> gap_step_cgcg(double f, double g, double e_f, double e_g, double alpha,
                                        double beta, double epsilon);

/// Square-root scaled round-off of r_0 = fl(b - A x_0).
double initial_gap_residual(double x_norm, const ModelConstants& c);
/// Square-root scaled round-off of an explicit product A v.
double initial_gap_product(double v_norm, const ModelConstants& c);

/// ||(b - A x) - r||_2, computed fresh.
double true_gap_probe(const CsrMatrix& A, std::span<const double> b, std::span<const double> x,
                      std::span<const double> r);

/**
 * Drives the pipelined estimate through a solve, including the
 * one-iteration delay: the estimate for iterate i is formed in iteration i
 * from norms of iteration i-1 vectors.
 */
class PipelinedGapEstimator {
public:
    /// Norms of the solver's live vectors at the reduction phase of
    /// iteration i: x_i, r_i, u_i, w_i and p, s, q, z, m from iteration i-1.
    struct LiveNorms {
        double x = 0.0, r = 0.0, u = 0.0, w = 0.0;
        double p = 0.0, s = 0.0, q = 0.0, z = 0.0, m = 0.0;
    };

    struct Update {
        double f_prev = 0.0;  ///< estimate for iterate i-1 (0 before the first one)
        GapState state;       ///< state.f estimates the gap of iterate i
        BoundFactors factors;
        bool reset = false;
    };

    explicit PipelinedGapEstimator(const ModelConstants& constants) : c_(constants) {}

    /// Advances to iteration i with the coefficients alpha_i, beta_i just
    /// computed. Returns the estimate for iterate i when i > 0. `reset`
    /// requests the initial-gap formulas (after a replacement).
    std::optional<Update> iterate(std::size_t i, const LiveNorms& live, double alpha_i, double beta_i,
                                  bool reset);

    const ModelConstants& constants() const noexcept { return c_; }

private:
    ModelConstants c_;
    GapState state_;
    LiveNorms last_;
    double alpha_last_ = 0.0;
    double beta_last_ = 0.0;
};

} // namespace pcgrr
