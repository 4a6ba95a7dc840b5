#include "pcgrr/errors.hpp"
#include "pcgrr/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

using namespace pcgrr;

namespace {

struct CommonArgs {
    std::string method = "all";
    std::string prec = "none";
    double icc_shift = 0.0;
    std::string icc_shift_mode = "diag";
    std::string rhs = "exact";
    std::string x0 = "zero";
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::size_t max_iter = 5000;
    std::size_t window = 50;
    double tau = std::sqrt(0x1p-52);
    std::string mu = "nnz";
    std::string theta = "inf";
    std::string format = "plain";
};

void add_common(CLI::App* app, CommonArgs& a, bool with_prec) {
    app->add_option("--method", a.method, "cg|cgcg|pcg|pcgrr|all, comma separated")
        ->capture_default_str();
    if (with_prec) {
        app->add_option("--prec", a.prec, "none|jacobi|icc")
            ->check(CLI::IsMember({"none", "jacobi", "icc"}))
            ->capture_default_str();
        app->add_option("--icc-shift", a.icc_shift, "diagonal shift for IC(0)")
            ->check(CLI::NonNegativeNumber);
        app->add_option("--icc-shift-mode", a.icc_shift_mode,
                        "diag: A + shift*diag(A), identity: A + shift*I")
            ->check(CLI::IsMember({"diag", "identity"}))
            ->capture_default_str();
    }
    app->add_option("--rhs", a.rhs, "exact (b = A*xhat), uniform, or a vector file path")
        ->capture_default_str();
    app->add_option("--x0", a.x0, "zero|rand")
        ->check(CLI::IsMember({"zero", "rand"}))
        ->capture_default_str();
    app->add_option("--seed", a.seed, "seed for --x0 rand")->capture_default_str();
    app->add_option("--tol", a.tol, "relative tolerance; stagnation detection when absent");
    app->add_option("--max-iter", a.max_iter)->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--stagnation-window", a.window)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--tau", a.tau, "replacement threshold")->check(CLI::PositiveNumber);
    app->add_option("--mu", a.mu, "nnz|rowsum")
        ->check(CLI::IsMember({"nnz", "rowsum"}))
        ->capture_default_str();
    app->add_option("--theta", a.theta, "norm bound in the gap model: inf or sqrt-n-inf")
        ->check(CLI::IsMember({"inf", "sqrt-n-inf"}))
        ->capture_default_str();
    app->add_option("--format", a.format, "plain|csv|markdown")
        ->check(CLI::IsMember({"plain", "csv", "markdown"}))
        ->capture_default_str();
}

std::vector<Method> parse_methods(const std::string& s) {
    if (s == "all") return {std::begin(all_methods), std::end(all_methods)};
    std::vector<Method> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t comma = std::min(s.find(',', pos), s.size());
        const std::string tok = s.substr(pos, comma - pos);
        const auto m = parse_method(tok);
        if (!m) throw CLI::ValidationError("--method", "unknown method '" + tok + "'");
        out.push_back(*m);
        pos = comma + 1;
    }
    return out;
}

ExperimentConfig base_config(const CommonArgs& a) {
    ExperimentConfig cfg;
    cfg.methods = parse_methods(a.method);
    if (a.prec == "jacobi") cfg.prec.kind = PrecKind::jacobi;
    if (a.prec == "icc") cfg.prec.kind = PrecKind::icc0;
    cfg.prec.shift = a.icc_shift;
    cfg.prec.shift_mode = a.icc_shift_mode == "identity" ? ShiftMode::identity
                                                         : ShiftMode::scaled_diagonal;
    if (a.rhs == "exact") {
        cfg.rhs_mode = RhsMode::from_exact_uniform;
    } else if (a.rhs == "uniform") {
        cfg.rhs_mode = RhsMode::uniform;
    } else {
        cfg.rhs_mode = RhsMode::from_file;
        cfg.rhs_path = a.rhs;
    }
    cfg.x0_mode = a.x0 == "rand" ? X0Mode::seeded_random : X0Mode::zero;
    cfg.seed = a.seed;
    cfg.opts.max_iter = a.max_iter;
    cfg.opts.stagnation_window = a.window;
    if (a.tol) {
        cfg.opts.stop_rule = StopRule::tolerance;
        cfg.opts.tol_rel = *a.tol;
        cfg.opts.probe_true_residual = true;
    }
    cfg.opts.mu_def = a.mu == "rowsum" ? MuDefinition::max_row_sum : MuDefinition::max_row_nonzeros;
    cfg.opts.norm_bound = a.theta == "sqrt-n-inf" ? NormBound::sqrt_n_inf : NormBound::symmetric_inf;
    cfg.policy.tau = a.tau;
    return cfg;
}

void print_header(const ExperimentConfig& cfg) {
    std::printf("# eps = %.6e  tau = %.6e  stop = %s\n", cfg.opts.epsilon, cfg.policy.tau,
                cfg.opts.stop_rule == StopRule::stagnation ? "stagnation" : "tolerance");
}

/// Prints one experiment; returns true if any method broke down.
bool report(const ExperimentResult& res, TableFormat fmt) {
    std::printf("## %s  n = %zu  ||b|| = %.1e\n", res.name.c_str(), res.n, res.b_norm);
    std::fputs(emit_table(res.rows(), fmt).c_str(), stdout);
    bool failed = false;
    for (const auto& run : res.runs) {
        if (run.row.error) {
            failed = true;
            std::fprintf(stderr, "%s %s: %s\n", res.name.c_str(),
                         std::string(display_name(run.row.method)).c_str(),
                         run.row.error->c_str());
        }
    }
    return failed;
}

void write_traces(const ExperimentResult& res, const std::string& target) {
    namespace fs = std::filesystem;
    const fs::path base(target);
    for (const auto& run : res.runs) {
        if (run.csv.empty()) continue;
        fs::path path = base;
        if (res.runs.size() > 1) {
            path = base.parent_path() /
                   (base.stem().string() + "_" + std::string(to_string(run.row.method)) +
                    base.extension().string());
        }
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::FILE* f = std::fopen(path.string().c_str(), "w");
        if (!f) throw std::runtime_error("cannot write trace file: " + path.string());
        std::fputs(run.csv.c_str(), f);
        std::fclose(f);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pipelined conjugate gradients with automated residual replacement"};
    app.require_subcommand(1);

    CommonArgs solve_args;
    std::string matrix_path;
    std::vector<std::size_t> lapl;
    std::string trace_path;
    auto* solve = app.add_subcommand("solve", "solve one system with the selected methods");
    auto* src_mat = solve->add_option("--matrix", matrix_path, "Matrix Market file")
                        ->check(CLI::ExistingFile);
    auto* src_lap = solve->add_option("--laplacian", lapl, "2D Laplacian grid NX NY")
                        ->expected(2)
                        ->check(CLI::PositiveNumber);
    src_mat->excludes(src_lap);
    solve->add_option("--trace", trace_path, "CSV trace file (method appended if several)");
    add_common(solve, solve_args, true);

    auto* bench = app.add_subcommand("bench", "reproduce the benchmark tables");
    bench->require_subcommand(1);

    CommonArgs t1_args;
    std::vector<std::size_t> sizes{50, 100, 200};
    std::string t1_trace_dir;
    auto* t1 = bench->add_subcommand("table1", "2D Laplacian problems, no preconditioner");
    t1->add_option("--sizes", sizes, "grid sizes")->delimiter(',')->capture_default_str();
    t1->add_option("--trace-dir", t1_trace_dir, "write per-method CSV traces here");
    add_common(t1, t1_args, false);

    CommonArgs t2_args;
    std::string t2_dir;
    std::vector<std::string> only;
    std::string t2_trace_dir;
    auto* t2 = bench->add_subcommand("table2", "Matrix Market problems with preconditioning");
    t2->add_option("--dir", t2_dir, "directory holding <name>.mtx files")
        ->required()
        ->check(CLI::ExistingDirectory);
    t2->add_option("--only", only, "restrict to these matrices")->delimiter(',');
    t2->add_option("--trace-dir", t2_trace_dir, "write per-method CSV traces here");
    add_common(t2, t2_args, false);

    CLI11_PARSE(app, argc, argv);

    try {
        bool failed = false;
        if (*solve) {
            if (!*src_mat && !*src_lap) {
                std::fprintf(stderr, "solve: one of --matrix or --laplacian is required\n");
                return 1;
            }
            ExperimentConfig cfg = base_config(solve_args);
            if (*src_mat) {
                cfg.problem = MatrixMarketProblem{matrix_path};
            } else {
                cfg.problem = LaplacianProblem{lapl[0], lapl[1]};
            }
            print_header(cfg);
            const ExperimentResult res = run_experiment(cfg);
            failed = report(res, *parse_table_format(solve_args.format));
            if (!trace_path.empty()) write_traces(res, trace_path);
        } else if (*t1) {
            ExperimentConfig cfg = base_config(t1_args);
            print_header(cfg);
            for (std::size_t s : sizes) {
                cfg.problem = LaplacianProblem{s, s};
                if (!t1_trace_dir.empty()) cfg.trace_dir = t1_trace_dir;
                failed |= report(run_experiment(cfg), *parse_table_format(t1_args.format));
            }
        } else if (*t2) {
            ExperimentConfig cfg = base_config(t2_args);
            print_header(cfg);
            std::size_t found = 0;
            for (const auto& entry : table2_entries()) {
                if (!only.empty() && std::find(only.begin(), only.end(), entry.name) == only.end()) {
                    continue;
                }
                const auto path = std::filesystem::path(t2_dir) / (entry.name + ".mtx");
                if (!std::filesystem::exists(path)) {
                    std::printf("## %s  (missing %s, skipped)\n", entry.name.c_str(),
                                path.string().c_str());
                    continue;
                }
                ++found;
                cfg.problem = MatrixMarketProblem{path.string()};
                cfg.prec = entry.prec;
                if (!t2_trace_dir.empty()) cfg.trace_dir = t2_trace_dir;
                std::printf("# prec %s shift %g\n", std::string(to_string(entry.prec.kind)).c_str(),
                            entry.prec.shift);
                failed |= report(run_experiment(cfg), *parse_table_format(t2_args.format));
            }
            if (found == 0) {
                std::fprintf(stderr, "table2: no matrix files found in %s\n", t2_dir.c_str());
                return 1;
            }
        }
        return failed ? 2 : 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
