#pragma once

#include "pcgrr/gap_model.hpp"
#include "pcgrr/sparse.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace pcgrr {

enum class StopRule {
    /// Stop once ||r_i|| / ||b|| <= tol_rel (recursive residual).
    tolerance,
    /// Probe b - A x_i every iteration and stop when the minimum true
    /// residual has not improved for `stagnation_window` iterations while
    /// the recursive residual has dropped below that minimum. The iterate
    /// attaining the minimum is returned.
    stagnation,
};

struct SolveOptions {
    StopRule stop_rule = StopRule::tolerance;
    double tol_rel = 1e-8;
    std::size_t max_iter = 10000;
    std::size_t stagnation_window = 50;
    /// Instrumentation only: never feeds back into the iteration.
    bool probe_true_residual = false;
    /// Track the residual-gap estimate in the trace (CG, CG-CG, p-CG).
    bool estimate_gap = true;
    double epsilon = 0x1p-52;
    MuDefinition mu_def = MuDefinition::max_row_nonzeros;
    NormBound norm_bound = NormBound::symmetric_inf;
    /// Optional observer of every iterate x_i, i >= 0.
    std::function<void(std::size_t, std::span<const double>)> on_iterate;
};

/// Inputs and outputs of the pipelined estimator at one iteration, kept so
/// the bound factors can be re-derived from the trace.
struct GapDiagnostics {
    PipelinedNorms norms;
    double alpha = 0.0;  ///< alpha_{i-1}
    double beta = 0.0;   ///< beta_{i-1}
    BoundFactors factors;
    double f_prev = 0.0;
    double rho_cur = 0.0;  ///< ||r_i|| at the reduction phase
    bool reset = false;
};

struct IterationRecord {
    std::size_t iter = 0;
    double recursive_residual_norm = 0.0;
    std::optional<double> true_residual_norm;
    std::optional<double> true_gap_norm;
    std::optional<double> estimated_gap_norm;
    /// Coefficients of the step that produced this iterate (0 for iterate 0).
    double alpha = 0.0;
    double beta = 0.0;
    /// r (and the auxiliary vectors) of this iterate were recomputed explicitly.
    bool replaced = false;
    std::optional<GapDiagnostics> gap;
};

enum class SolveStatus { converged, stagnated, max_iter };

std::string_view to_string(SolveStatus s);

/// Work performed by the algorithm itself; probes are excluded.
struct OpCounts {
    std::size_t spmv = 0;
    std::size_t prec_apply = 0;
    std::size_t reduction_groups = 0;
    std::size_t iterations = 0;
};

struct SolveResult {
    Vector x;
    SolveStatus status = SolveStatus::max_iter;
    std::vector<IterationRecord> iterations;
    std::size_t replacement_count = 0;
    /// (iteration, ||b - A x_i||) minimising the true residual, when probing.
    std::optional<std::pair<std::size_t, double>> argmin_true_residual;
    OpCounts ops;
    double b_norm = 0.0;

    /// Iteration reported for the solve: the argmin in stagnation mode,
    /// otherwise the last iterate.
    std::size_t reported_iteration() const;
};

} // namespace pcgrr
