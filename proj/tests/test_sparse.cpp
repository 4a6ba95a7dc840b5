#include "oracles.hpp"

#include "pcgrr/errors.hpp"
#include "pcgrr/sparse.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace pcgrr;

TEST_SUITE("sparse") {

TEST_CASE("spmv with the identity returns the input") {
    const CsrMatrix I = CsrMatrix::identity(3);
    const Vector y = spmv(I, Vector{1, 2, 3});
    CHECK(y == Vector{1, 2, 3});
}

TEST_CASE("spmv of the 3x3 grid Laplacian on ones gives boundary counts") {
    const CsrMatrix A = gen_laplacian_2d(3, 3);
    const Vector y = spmv(A, Vector(9, 1.0));
    // corners 4-2, edges 4-3, centre 4-4
    CHECK(y == Vector{2, 1, 2, 1, 0, 1, 2, 1, 2});
}

TEST_CASE("spmv matches a dense oracle") {
    for (std::size_t n : {1u, 2u, 10u, 25u, 50u}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const CsrMatrix A = n == 10 ? oracle::random_spd(n, 100.0, seed)
                                        : oracle::random_sparse_spd(n, 0.2, seed);
            const Vector x = oracle::random_vector(n, seed + 100);
            const Vector y = spmv(A, x);
            const Eigen::MatrixXd D = oracle::dense(A);
            for (std::size_t i = 0; i < n; ++i) {
                double ref = 0.0;
                double scale = 0.0;
                for (std::size_t j = 0; j < n; ++j) {
                    ref += D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j];
                    scale += std::abs(D(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * x[j]);
                }
                CHECK(std::abs(y[i] - ref) <= 1e-14 * std::max(scale, 1e-300));
            }
        }
    }
}

TEST_CASE("spmv rejects a length mismatch") {
    const CsrMatrix A = gen_laplacian_2d(2, 2);
    CHECK_THROWS_AS(spmv(A, Vector(3, 1.0)), DimensionError);
    Vector y(5);
    CHECK_THROWS_AS(spmv(A, Vector(4, 1.0), y), DimensionError);
}

TEST_CASE("laplacian generator") {
    SUBCASE("single point") {
        const CsrMatrix A = gen_laplacian_2d(1, 1);
        CHECK(A.size() == 1);
        CHECK(A.at(0, 0) == 4.0);
    }
    SUBCASE("50x50 grid size") {
        const CsrMatrix A = gen_laplacian_2d(50, 50);
        CHECK(A.size() == 2500);
        CHECK(A.nnz() == 5 * 2500 - 4 * 50);
        CHECK(A.mu() == 5);
    }
    SUBCASE("3x3 spectrum") {
        const Eigen::MatrixXd D = oracle::dense(gen_laplacian_2d(3, 3));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(D);
        const auto ev = es.eigenvalues();
        CHECK(ev.minCoeff() > 0.0);
        CHECK(ev.maxCoeff() < 8.0);
        CHECK(ev.minCoeff() == doctest::Approx(4.0 - 4.0 * std::cos(std::numbers::pi / 4)).epsilon(1e-12));
    }
    SUBCASE("rectangular grid ordering") {
        const CsrMatrix A = gen_laplacian_2d(3, 2);
        CHECK(A.at(0, 1) == -1.0);
        CHECK(A.at(0, 3) == -1.0);
        CHECK(A.at(2, 3) == 0.0);  // no wraparound between grid rows
    }
    SUBCASE("exact symmetry and diagonal dominance") {
        const CsrMatrix A = gen_laplacian_2d(7, 5);
        for (std::size_t i = 0; i < A.size(); ++i) {
            double off = 0.0;
            for (std::size_t j = 0; j < A.size(); ++j) {
                CHECK(A.at(i, j) == A.at(j, i));
                if (j != i) off += std::abs(A.at(i, j));
            }
            CHECK(A.at(i, i) >= off);
        }
    }
    SUBCASE("zero dimension") {
        CHECK_THROWS_AS(gen_laplacian_2d(0, 3), std::invalid_argument);
        CHECK_THROWS_AS(gen_laplacian_2d(3, 0), std::invalid_argument);
    }
}

TEST_CASE("vector kernels") {
    CHECK(dot(Vector{1, 2}, Vector{3, 4}) == 11.0);
    for (std::size_t k = 0; k < 5; ++k) {
        Vector e(5, 0.0);
        e[k] = 1.0;
        CHECK(norm2(e) == 1.0);
    }
    Vector y{1, 1};
    axpy(2.0, Vector{1, 2}, y);
    CHECK(y == Vector{3, 5});
    xpby(Vector{1, 1}, 0.5, y);
    CHECK(y == Vector{2.5, 3.5});
    CHECK_THROWS_AS(dot(Vector{1}, Vector{1, 2}), DimensionError);
    CHECK_THROWS_AS(axpy(1.0, Vector{1}, y), DimensionError);
    for (std::size_t m : {3u, 4u, 10u}) CHECK(norm_inf_matrix(gen_laplacian_2d(m, m)) == 8.0);
}

TEST_CASE("cached mu and inf_norm agree with the raw arrays") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const CsrMatrix A = oracle::random_sparse_spd(30, 0.15, seed);
        std::size_t mu = 0;
        double inf = 0.0;
        for (std::size_t i = 0; i < A.size(); ++i) {
            mu = std::max(mu, A.row_ptr()[i + 1] - A.row_ptr()[i]);
            double s = 0.0;
            for (std::size_t k = A.row_ptr()[i]; k < A.row_ptr()[i + 1]; ++k) s += std::abs(A.values()[k]);
            inf = std::max(inf, s);
        }
        CHECK(A.mu() == mu);
        CHECK(max_row_nnz(A) == mu);
        CHECK(A.inf_norm() == inf);
    }
}

TEST_CASE("constructor rejects invalid storage") {
    using V = std::vector<std::size_t>;
    using D = std::vector<double>;
    CHECK_THROWS_AS(CsrMatrix(2, V{0, 1}, V{0}, D{1}), std::invalid_argument);           // short row_ptr
    CHECK_THROWS_AS(CsrMatrix(2, V{0, 1, 2}, V{0, 2}, D{1, 1}), std::invalid_argument);  // column range
    CHECK_THROWS_AS(CsrMatrix(2, V{0, 2, 3}, V{1, 0, 1}, D{1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(CsrMatrix(2, V{0, 2, 3}, V{0, 1, 1}, D{1, 2, 1}), std::invalid_argument);  // structure
    CHECK_THROWS_AS(CsrMatrix(2, V{0, 2, 4}, V{0, 1, 0, 1}, D{1, 2, 3, 1}), std::invalid_argument);
    CHECK_NOTHROW(CsrMatrix(2, V{0, 2, 4}, V{0, 1, 0, 1}, D{1, 2, 2, 1}));
}

TEST_CASE("residual and kernels are bit-reproducible") {
    const CsrMatrix A = oracle::random_sparse_spd(40, 0.2, 9);
    const Vector x = oracle::random_vector(40, 1), b = oracle::random_vector(40, 2);
    Vector r1(40), r2(40);
    residual(A, b, x, r1);
    residual(A, b, x, r2);
    CHECK(r1 == r2);
    CHECK(norm2(r1) == norm2(r2));
}

}
