#include "oracles.hpp"

#include "pcgrr/errors.hpp"
#include "pcgrr/replacement.hpp"
#include "pcgrr/solvers.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace pcgrr;

namespace {

using SolverFn = std::function<SolveResult(const CsrMatrix&, const Preconditioner&, std::span<const double>,
                                           std::span<const double>, const SolveOptions&)>;

struct Named {
    std::string name;
    SolverFn fn;
};

std::vector<Named> solvers() {
    return {
        {"cg", [](auto& A, auto& M, auto b, auto x0, auto& o) { return solve_cg(A, M, b, x0, o); }},
        {"cgcg", [](auto& A, auto& M, auto b, auto x0, auto& o) { return solve_cgcg(A, M, b, x0, o); }},
        {"pcg", [](auto& A, auto& M, auto b, auto x0, auto& o) { return solve_pcg_pipelined(A, M, b, x0, o); }},
        {"pcgrr", [](auto& A, auto& M, auto b, auto x0, auto& o) { return solve_pcg_rr(A, M, b, x0, o); }},
    };
}

SolveOptions fixed_steps(std::size_t k) {
    SolveOptions o;
    o.tol_rel = 0.0;
    o.max_iter = k;
    return o;
}

Vector uniform_b(std::size_t n) { return Vector(n, 1.0 / std::sqrt(static_cast<double>(n))); }

} // namespace

TEST_SUITE("solvers") {

TEST_CASE("identity operator converges in one step") {
    const CsrMatrix A = CsrMatrix::identity(6);
    const auto M = Preconditioner::identity(6);
    const Vector b = oracle::random_vector(6, 1);
    for (const auto& s : solvers()) {
        CAPTURE(s.name);
        const SolveResult res = s.fn(A, M, b, Vector(6, 0.0), SolveOptions{});
        CHECK(res.status == SolveStatus::converged);
        CHECK(res.iterations.back().iter == 1);
        for (std::size_t i = 0; i < 6; ++i) CHECK(res.x[i] == doctest::Approx(b[i]).epsilon(1e-15));
    }
}

TEST_CASE("zero right-hand side returns zero") {
    const CsrMatrix A = gen_laplacian_2d(3, 3);
    for (const auto& s : solvers()) {
        const SolveResult res = s.fn(A, Preconditioner::identity(9), Vector(9, 0.0), Vector(9, 1.0), SolveOptions{});
        CHECK(res.x == Vector(9, 0.0));
        CHECK(res.status == SolveStatus::converged);
    }
}

TEST_CASE("residual norms follow an extended-precision CG") {
    std::vector<std::size_t> rp{0}, ci;
    std::vector<double> va;
    for (std::size_t i = 0; i < 5; ++i) {
        if (i > 0) { ci.push_back(i - 1); va.push_back(-1.0); }
        ci.push_back(i); va.push_back(2.0);
        if (i < 4) { ci.push_back(i + 1); va.push_back(-1.0); }
        rp.push_back(ci.size());
    }
    const CsrMatrix A(5, rp, ci, va);
    const Vector b{1.0, 2.0, 3.0, 4.0, 5.0};
    const auto ref = oracle::cg_residuals_ld(oracle::dense(A), b, 5);
    for (const auto& s : solvers()) {
        CAPTURE(s.name);
        const SolveResult res = s.fn(A, Preconditioner::identity(5), b, Vector(5, 0.0), fixed_steps(5));
        REQUIRE(res.iterations.size() == 6);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(oracle::rel_diff(res.iterations[k].recursive_residual_norm, static_cast<double>(ref[k])) <= 1e-10);
        }
        // exact arithmetic terminates after n steps
        CHECK(res.iterations[5].recursive_residual_norm <= 1e-12 * norm2(b));
    }
}

TEST_CASE("variants agree with CG on random SPD systems") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CsrMatrix A = oracle::random_spd(8, 100.0, seed);
        const Vector b = oracle::random_vector(8, seed + 100);
        const auto M = Preconditioner::identity(8);
        const SolveResult ref = solve_cg(A, M, b, Vector(8, 0.0), fixed_steps(8));
        for (const auto& s : solvers()) {
            CAPTURE(s.name);
            const SolveResult res = s.fn(A, M, b, Vector(8, 0.0), fixed_steps(8));
            for (std::size_t k = 0; k <= 3; ++k) {
                CHECK(oracle::rel_diff(res.iterations[k].recursive_residual_norm,
                                       ref.iterations[k].recursive_residual_norm) <= 1e-10);
            }
            for (std::size_t k = 0; k < 8; ++k) {
                CHECK(std::abs(res.iterations[k].recursive_residual_norm - ref.iterations[k].recursive_residual_norm) <=
                      1e-8 * norm2(b));
            }
        }
    }
}

TEST_CASE("preconditioned variants agree with preconditioned CG") {
    const CsrMatrix A = oracle::random_sparse_spd(30, 0.2, 4);
    const Vector b = oracle::random_vector(30, 9);
    for (const auto& M : {Preconditioner::jacobi(A), Preconditioner::icc0(A)}) {
        const SolveResult ref = solve_cg(A, M, b, Vector(30, 0.0), fixed_steps(6));
        for (const auto& s : solvers()) {
            CAPTURE(s.name);
            const SolveResult res = s.fn(A, M, b, Vector(30, 0.0), fixed_steps(6));
            for (std::size_t k = 0; k <= 6; ++k) {
                CHECK(oracle::rel_diff(res.iterations[k].recursive_residual_norm,
                                       ref.iterations[k].recursive_residual_norm) <= 1e-8);
            }
        }
    }
}

TEST_CASE("A-norm error of CG decreases monotonically") {
    const CsrMatrix A = gen_laplacian_2d(12, 12);
    const std::size_t n = A.size();
    const Vector xhat = oracle::random_vector(n, 3);
    const Vector b = spmv(A, xhat);
    std::vector<double> errs;
    SolveOptions o;
    o.tol_rel = 1e-10;
    o.on_iterate = [&](std::size_t, std::span<const double> x) {
        Vector e(xhat);
        axpy(-1.0, x, e);
        errs.push_back(std::sqrt(dot(e, spmv(A, e))));
    };
    const SolveResult res = solve_cg(A, Preconditioner::identity(n), b, Vector(n, 0.0), o);
    CHECK(res.status == SolveStatus::converged);
    REQUIRE(errs.size() == res.iterations.size());
    for (std::size_t k = 1; k < errs.size(); ++k) CHECK(errs[k] <= errs[k - 1] * (1 + 1e-12));
}

TEST_CASE("pipelining amplifies the residual gap") {
    const CsrMatrix A = gen_laplacian_2d(50, 50);
    const std::size_t n = A.size();
    const Vector b = uniform_b(n);
    SolveOptions o;
    o.stop_rule = StopRule::stagnation;
    o.max_iter = 400;
    const SolveResult cg = solve_cg(A, Preconditioner::identity(n), b, Vector(n, 0.0), o);
    const SolveResult pcg = solve_pcg_pipelined(A, Preconditioner::identity(n), b, Vector(n, 0.0), o);
    CHECK(cg.status == SolveStatus::stagnated);
    CHECK(pcg.status == SolveStatus::stagnated);
    const double eps = 0x1p-52;
    // CG: the gap stays at the level of a single residual evaluation
    const double envelope = eps * (A.inf_norm() * norm2(cg.x) + norm2(b)) * std::sqrt(double(n));
    CHECK(*cg.iterations.back().true_gap_norm <= 100 * envelope);
    CHECK(*pcg.iterations.back().true_gap_norm >= 10 * *cg.iterations.back().true_gap_norm);
    CHECK(cg.argmin_true_residual->second < pcg.argmin_true_residual->second);
}

TEST_CASE("stagnation mode returns the best iterate") {
    const CsrMatrix A = gen_laplacian_2d(20, 20);
    const std::size_t n = A.size();
    SolveOptions o;
    o.stop_rule = StopRule::stagnation;
    for (const auto& s : solvers()) {
        CAPTURE(s.name);
        const SolveResult res = s.fn(A, Preconditioner::identity(n), uniform_b(n), Vector(n, 0.0), o);
        REQUIRE(res.argmin_true_residual);
        const auto [k, t] = *res.argmin_true_residual;
        CHECK(res.reported_iteration() == k);
        Vector r(n);
        residual(A, uniform_b(n), res.x, r);
        CHECK(norm2(r) == t);
        for (const auto& rec : res.iterations) CHECK(*rec.true_residual_norm >= t);
        if (res.status == SolveStatus::stagnated) CHECK(res.iterations.back().iter - k >= o.stagnation_window);
    }
}

TEST_CASE("runs are deterministic") {
    const CsrMatrix A = gen_laplacian_2d(15, 15);
    const std::size_t n = A.size();
    const Vector b = oracle::random_vector(n, 2);
    for (const auto& s : solvers()) {
        const SolveResult a = s.fn(A, Preconditioner::icc0(A), b, Vector(n, 0.0), SolveOptions{});
        const SolveResult c = s.fn(A, Preconditioner::icc0(A), b, Vector(n, 0.0), SolveOptions{});
        CHECK(a.x == c.x);
        REQUIRE(a.iterations.size() == c.iterations.size());
        for (std::size_t k = 0; k < a.iterations.size(); ++k) {
            CHECK(a.iterations[k].recursive_residual_norm == c.iterations[k].recursive_residual_norm);
        }
    }
}

TEST_CASE("operation counts") {
    const CsrMatrix A = gen_laplacian_2d(10, 10);
    const std::size_t n = A.size();
    const Vector b = uniform_b(n);
    const auto M = Preconditioner::identity(n);
    const std::size_t k = 20;
    const SolveResult cg = solve_cg(A, M, b, Vector(n, 0.0), fixed_steps(k));
    CHECK(cg.ops.iterations == k);
    CHECK(cg.ops.reduction_groups == 2 * k + 1);
    CHECK(cg.ops.spmv == k + 1);
    CHECK(cg.ops.prec_apply == k + 1);
    const SolveResult cgcg = solve_cgcg(A, M, b, Vector(n, 0.0), fixed_steps(k));
    CHECK(cgcg.ops.reduction_groups == k + 1);
    CHECK(cgcg.ops.spmv == k + 2);
    const SolveResult pcg = solve_pcg_pipelined(A, M, b, Vector(n, 0.0), fixed_steps(k));
    CHECK(pcg.ops.reduction_groups == k);
    CHECK(pcg.ops.spmv == k + 2);
    CHECK(pcg.ops.prec_apply == k + 1);
}

TEST_CASE("indefinite systems raise a breakdown") {
    const CsrMatrix A(2, {0, 1, 2}, {0, 1}, {1.0, -1.0});
    for (const auto& s : solvers()) {
        CAPTURE(s.name);
        CHECK_THROWS_AS(s.fn(A, Preconditioner::identity(2), Vector{1.0, 1.0}, Vector(2, 0.0), SolveOptions{}),
                        BreakdownError);
    }
}

TEST_CASE("size mismatches are rejected") {
    const CsrMatrix A = gen_laplacian_2d(3, 3);
    for (const auto& s : solvers()) {
        CHECK_THROWS_AS(s.fn(A, Preconditioner::identity(9), Vector(8, 1.0), Vector(9, 0.0), SolveOptions{}),
                        DimensionError);
        CHECK_THROWS_AS(s.fn(A, Preconditioner::identity(4), Vector(9, 1.0), Vector(9, 0.0), SolveOptions{}),
                        DimensionError);
    }
}

TEST_CASE("iteration counts on model problems") {
    SolveOptions o;
    o.stop_rule = StopRule::stagnation;
    o.max_iter = 5000;
    const CsrMatrix A50 = gen_laplacian_2d(50, 50);
    Vector xhat(A50.size(), 1.0 / 50.0);
    const SolveResult r50 = solve_cg(A50, Preconditioner::identity(A50.size()), spmv(A50, xhat),
                                     Vector(A50.size(), 0.0), o);
    CHECK(r50.reported_iteration() >= 100);
    CHECK(r50.reported_iteration() <= 155);
}

}
