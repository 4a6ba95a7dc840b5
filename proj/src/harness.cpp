#include "pcgrr/harness.hpp"

#include "pcgrr/errors.hpp"
#include "pcgrr/matrix_market.hpp"
#include "pcgrr/solvers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pcgrr {

std::string_view to_string(Method m) {
    switch (m) {
    case Method::cg: return "cg";
    case Method::cgcg: return "cgcg";
    case Method::pcg: return "pcg";
    case Method::pcgrr: return "pcgrr";
    }
    return "?";
}

std::string_view display_name(Method m) {
    switch (m) {
    case Method::cg: return "CG";
    case Method::cgcg: return "CG-CG";
    case Method::pcg: return "p-CG";
    case Method::pcgrr: return "p-CG-rr";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view s) {
    for (Method m : all_methods) {
        if (s == to_string(m) || s == display_name(m)) return m;
    }
    return std::nullopt;
}

SolveOptions experiment_options() {
    SolveOptions o;
    o.stop_rule = StopRule::stagnation;
    o.max_iter = 5000;
    return o;
}

std::vector<SummaryRow> ExperimentResult::rows() const {
    std::vector<SummaryRow> out;
    out.reserve(runs.size());
    for (const auto& r : runs) out.push_back(r.row);
    return out;
}

Vector seeded_uniform(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Vector v(n);
    for (auto& e : v) e = dist(gen);
    return v;
}

Vector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open vector file: " + path);
    Vector v;
    std::string line;
    bool header_seen = false;
    bool dims_seen = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.rfind("%%MatrixMarket", 0) == 0) {
            if (line.find("array") == std::string::npos) {
                throw ParseError("vector file must be a Matrix Market array", lineno);
            }
            header_seen = true;
            continue;
        }
        if (line.empty() || line[0] == '%') continue;
        std::istringstream ls(line);
        if (header_seen && !dims_seen) {
            dims_seen = true;
            continue;
        }
        std::string tok;
        while (ls >> tok) {
            for (auto& c : tok) {
                if (c == 'd' || c == 'D') c = 'e';
            }
            char* end = nullptr;
            const double val = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0') {
                throw ParseError("bad number '" + tok + "' in vector file", lineno);
            }
            v.push_back(val);
        }
    }
    return v;
}

ProblemData build_problem(const ExperimentConfig& cfg) {
    ProblemData pd{cfg.name, CsrMatrix::identity(1), {}, {}, std::nullopt};
    if (const auto* lp = std::get_if<LaplacianProblem>(&cfg.problem)) {
        pd.A = gen_laplacian_2d(lp->nx, lp->ny);
        if (pd.name.empty()) {
            pd.name = lp->nx == lp->ny ? "lapl" + std::to_string(lp->nx)
                                       : "lapl" + std::to_string(lp->nx) + "x" +
                                             std::to_string(lp->ny);
        }
    } else {
        const auto& mp = std::get<MatrixMarketProblem>(cfg.problem);
        pd.A = read_matrix_market_file(mp.path).matrix;
        if (pd.name.empty()) pd.name = std::filesystem::path(mp.path).stem().string();
    }
    const std::size_t n = pd.A.size();
    const double h = 1.0 / std::sqrt(static_cast<double>(n));
    switch (cfg.rhs_mode) {
    case RhsMode::from_exact_uniform:
        pd.x_exact = Vector(n, h);
        pd.b = spmv(pd.A, *pd.x_exact);
        break;
    case RhsMode::uniform:
        pd.b.assign(n, h);
        break;
    case RhsMode::from_file:
        pd.b = read_vector_file(cfg.rhs_path);
        if (pd.b.size() != n) {
            throw DimensionError("right-hand side has " + std::to_string(pd.b.size()) +
                                 " entries, matrix has " + std::to_string(n) + " rows");
        }
        break;
    }
    pd.x0 = cfg.x0_mode == X0Mode::zero ? Vector(n, 0.0) : seeded_uniform(n, cfg.seed);
    return pd;
}

SolveResult run_method(Method m, const CsrMatrix& A, const Preconditioner& M,
                       std::span<const double> b, std::span<const double> x0,
                       const SolveOptions& opts, const ReplacementPolicy& policy) {
    switch (m) {
    case Method::cg: return solve_cg(A, M, b, x0, opts);
    case Method::cgcg: return solve_cgcg(A, M, b, x0, opts);
    case Method::pcg: return solve_pcg_pipelined(A, M, b, x0, opts);
    case Method::pcgrr: return solve_pcg_rr(A, M, b, x0, opts, policy);
    }
    throw std::invalid_argument("unknown method");
}

double relative_error_anorm(const CsrMatrix& A, std::span<const double> x_exact,
                            std::span<const double> x) {
    Vector e(x_exact.begin(), x_exact.end());
    axpy(-1.0, x, e);
    const double num = dot(e, spmv(A, e));
    const double den = dot(x_exact, spmv(A, x_exact));
    return std::sqrt(std::max(num, 0.0)) / std::sqrt(den);
}

namespace {

Preconditioner make_preconditioner(const PrecSpec& spec, const CsrMatrix& A) {
    switch (spec.kind) {
    case PrecKind::identity: return Preconditioner::identity(A.size());
    case PrecKind::jacobi: return Preconditioner::jacobi(A);
    case PrecKind::icc0: return Preconditioner::icc0(A, spec.shift, spec.shift_mode);
    }
    throw std::invalid_argument("unknown preconditioner kind");
}

std::string fmt_g17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1e", v);
    return buf;
}

} // namespace

std::string trace_csv(const SolveResult& result) {
    std::string out = "iter,relres_rec,relres_true,gap_true,gap_est,replaced\n";
    const double bn = result.b_norm > 0.0 ? result.b_norm : 1.0;
    for (const auto& rec : result.iterations) {
        out += std::to_string(rec.iter);
        out += ',';
        out += fmt_g17(rec.recursive_residual_norm / bn);
        out += ',';
        if (rec.true_residual_norm) out += fmt_g17(*rec.true_residual_norm / bn);
        out += ',';
        if (rec.true_gap_norm) out += fmt_g17(*rec.true_gap_norm);
        out += ',';
        if (rec.estimated_gap_norm) out += fmt_g17(*rec.estimated_gap_norm);
        out += ',';
        out += rec.replaced ? '1' : '0';
        out += '\n';
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    const ProblemData pd = build_problem(cfg);
    ExperimentResult res;
    res.name = pd.name;
    res.n = pd.A.size();
    res.b_norm = norm2(pd.b);

    std::optional<Preconditioner> M;
    std::optional<std::string> prec_error;
    try {
        M = make_preconditioner(cfg.prec, pd.A);
    } catch (const FactorizationError& e) {
        prec_error = e.what();
    }

    for (Method m : cfg.methods) {
        MethodRun run;
        run.row.problem = pd.name;
        run.row.method = m;
        if (prec_error) {
            run.row.error = *prec_error;
            res.runs.push_back(std::move(run));
            continue;
        }
        try {
            SolveResult sr = run_method(m, pd.A, *M, pd.b, pd.x0, cfg.opts, cfg.policy);
            Vector rt(pd.A.size());
            residual(pd.A, pd.b, sr.x, rt);
            run.row.iter = sr.reported_iteration();
            run.row.relres = res.b_norm > 0.0 ? norm2(rt) / res.b_norm : norm2(rt);
            if (pd.x_exact) run.row.relerr = relative_error_anorm(pd.A, *pd.x_exact, sr.x);
            run.row.rr = sr.replacement_count;
            run.row.status = sr.status;
            run.csv = trace_csv(sr);
            run.result = std::move(sr);
        } catch (const BreakdownError& e) {
            run.row.error = e.what();
        }
        if (cfg.trace_dir && !run.csv.empty()) {
            std::filesystem::create_directories(*cfg.trace_dir);
            const auto path = std::filesystem::path(*cfg.trace_dir) /
                              (pd.name + "_" + std::string(to_string(m)) + ".csv");
            std::ofstream out(path);
            if (!out) throw std::runtime_error("cannot write trace file: " + path.string());
            out << run.csv;
        }
        res.runs.push_back(std::move(run));
    }
    return res;
}

std::optional<TableFormat> parse_table_format(std::string_view s) {
    if (s == "plain") return TableFormat::plain;
    if (s == "csv") return TableFormat::csv;
    if (s == "markdown" || s == "md") return TableFormat::markdown;
    return std::nullopt;
}

std::string emit_table(const std::vector<SummaryRow>& rows, TableFormat fmt) {
    std::vector<std::array<std::string, 5>> cells;
    cells.push_back({"method", "iter", "relres", "relerr", "rr"});
    for (const auto& r : rows) {
        std::array<std::string, 5> c;
        c[0] = display_name(r.method);
        if (r.error) {
            c[1] = c[2] = c[3] = c[4] = "-";
        } else {
            c[1] = std::to_string(r.iter);
            c[2] = fmt_sci(r.relres);
            c[3] = r.relerr ? fmt_sci(*r.relerr) : "-";
            c[4] = r.method == Method::pcgrr ? std::to_string(r.rr) : "-";
        }
        cells.push_back(std::move(c));
    }

    std::string out;
    if (fmt == TableFormat::csv) {
        for (const auto& c : cells) {
            out += c[0] + ',' + c[1] + ',' + c[2] + ',' + c[3] + ',' + c[4] + '\n';
        }
        return out;
    }
    std::array<std::size_t, 5> width{};
    for (const auto& c : cells) {
        for (std::size_t k = 0; k < 5; ++k) width[k] = std::max(width[k], c[k].size());
    }
    auto pad = [](const std::string& s, std::size_t w, bool left) {
        const std::string fill(w - s.size(), ' ');
        return left ? s + fill : fill + s;
    };
    for (std::size_t row = 0; row < cells.size(); ++row) {
        const auto& c = cells[row];
        if (fmt == TableFormat::markdown) {
            out += '|';
            for (std::size_t k = 0; k < 5; ++k) out += ' ' + pad(c[k], width[k], k == 0) + " |";
            out += '\n';
            if (row == 0) {
                out += '|';
                for (std::size_t k = 0; k < 5; ++k) {
                    out += k == 0 ? ' ' + std::string(width[k], '-') + " |"
                                  : ' ' + std::string(width[k] - 1, '-') + ": |";
                }
                out += '\n';
            }
        } else {
            for (std::size_t k = 0; k < 5; ++k) {
                if (k) out += "  ";
                out += pad(c[k], width[k], k == 0);
            }
            out += '\n';
        }
    }
    return out;
}

const std::vector<Table2Entry>& table2_entries() {
    static const std::vector<Table2Entry> entries = [] {
        const PrecSpec jac{PrecKind::jacobi, 0.0, ShiftMode::scaled_diagonal};
        const PrecSpec icc{PrecKind::icc0, 0.0, ShiftMode::scaled_diagonal};
        const PrecSpec icc_1{PrecKind::icc0, 0.1, ShiftMode::scaled_diagonal};
        const PrecSpec icc_5{PrecKind::icc0, 0.5, ShiftMode::scaled_diagonal};
        const PrecSpec none{};
        return std::vector<Table2Entry>{
            {"bcsstk14", jac}, {"bcsstk15", jac},   {"bcsstk16", jac},   {"bcsstk17", jac},
            {"bcsstk18", jac}, {"bcsstk27", jac},   {"gr_30_30", none},  {"nos1", icc_5},
            {"nos2", icc_5},   {"nos3", icc},       {"nos4", icc},       {"nos5", icc},
            {"nos6", icc},     {"nos7", icc},       {"s1rmq4m1", icc},   {"s1rmt3m1", icc},
            {"s2rmq4m1", icc_1}, {"s2rmt3m1", icc}, {"s3dkq4m2", icc_1}, {"s3dkt3m2", icc_1},
            {"s3rmq4m1", icc_1}, {"s3rmt3m1", icc_1}, {"s3rmt3m3", icc_1},
        };
    }();
    return entries;
}

} // namespace pcgrr
