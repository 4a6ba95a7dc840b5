#pragma once

#include "pcgrr/preconditioner.hpp"
#include "pcgrr/replacement.hpp"
#include "pcgrr/solve_types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pcgrr {

enum class Method { cg, cgcg, pcg, pcgrr };

std::string_view to_string(Method m);
std::string_view display_name(Method m);  ///< "CG", "CG-CG", "p-CG", "p-CG-rr"
std::optional<Method> parse_method(std::string_view s);
inline constexpr Method all_methods[] = {Method::cg, Method::cgcg, Method::pcg, Method::pcgrr};

struct LaplacianProblem {
    std::size_t nx = 0;
    std::size_t ny = 0;
};
struct MatrixMarketProblem {
    std::string path;
};

enum class RhsMode {
    from_exact_uniform,  ///< b = A xhat, xhat_j = 1/sqrt(n)
    uniform,             ///< b_j = 1/sqrt(n)
    from_file,
};
enum class X0Mode { zero, seeded_random };

struct PrecSpec {
    PrecKind kind = PrecKind::identity;
    double shift = 0.0;
    ShiftMode shift_mode = ShiftMode::scaled_diagonal;
};

/// Stagnation stopping with a 5000-iteration cap.
SolveOptions experiment_options();

struct ExperimentConfig {
    std::string name;  ///< label for the problem; derived from the problem when empty
    std::variant<LaplacianProblem, MatrixMarketProblem> problem;
    RhsMode rhs_mode = RhsMode::from_exact_uniform;
    std::string rhs_path;  ///< used with RhsMode::from_file
    X0Mode x0_mode = X0Mode::zero;
    std::uint64_t seed = 0;
    std::vector<Method> methods{std::begin(all_methods), std::end(all_methods)};
    PrecSpec prec;
    SolveOptions opts = experiment_options();
    ReplacementPolicy policy;
    /// When set, one CSV trace per method is written as <dir>/<name>_<method>.csv.
    std::optional<std::string> trace_dir;
};

struct SummaryRow {
    std::string problem;
    Method method = Method::cg;
    std::size_t iter = 0;
    double relres = 0.0;
    std::optional<double> relerr;
    std::size_t rr = 0;
    SolveStatus status = SolveStatus::converged;
    std::optional<std::string> error;  ///< set when the method could not run
};

struct MethodRun {
    SummaryRow row;
    std::optional<SolveResult> result;
    std::string csv;
};

struct ExperimentResult {
    std::string name;
    std::size_t n = 0;
    double b_norm = 0.0;
    std::vector<MethodRun> runs;

    std::vector<SummaryRow> rows() const;
};

/// Loaded problem data; exposed so tests can reuse the exact setup.
struct ProblemData {
    std::string name;
    CsrMatrix A;
    Vector b;
    Vector x0;
    std::optional<Vector> x_exact;
};
ProblemData build_problem(const ExperimentConfig& cfg);

/// Uniform [0,1) entries from a 64-bit Mersenne twister.
Vector seeded_uniform(std::size_t n, std::uint64_t seed);

/// Reads whitespace-separated values, or a Matrix Market array file.
Vector read_vector_file(const std::string& path);

SolveResult run_method(Method m, const CsrMatrix& A, const Preconditioner& M,
                       std::span<const double> b, std::span<const double> x0,
                       const SolveOptions& opts, const ReplacementPolicy& policy);

/// Runs every configured method. File and dimension problems throw;
/// preconditioner and solver breakdowns are recorded per method.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Fixed header `iter,relres_rec,relres_true,gap_true,gap_est,replaced`.
std::string trace_csv(const SolveResult& result);

enum class TableFormat { plain, csv, markdown };
std::optional<TableFormat> parse_table_format(std::string_view s);
std::string emit_table(const std::vector<SummaryRow>& rows, TableFormat fmt);

double relative_error_anorm(const CsrMatrix& A, std::span<const double> x_exact,
                            std::span<const double> x);

struct Table2Entry {
    std::string name;
    PrecSpec prec;
};
/// Matrix Market problems of the small-matrix table with their preconditioners.
const std::vector<Table2Entry>& table2_entries();

} // namespace pcgrr
