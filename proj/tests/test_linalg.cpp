#include "richards/linalg.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace richards;

namespace {

SparseMatrix laplacian_1d(std::size_t n)
{
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        if (i > 0) t.push_back({i, i - 1, -1.0});
        if (i + 1 < n) t.push_back({i, i + 1, -1.0});
    }
    return SparseMatrix::from_triplets(n, t);
}

// Thomas algorithm for the constant tridiagonal (-1, 2, -1) system.
Vector tridiagonal_oracle(std::size_t n, const Vector& rhs)
{
    Vector c(n), d(n), x(n);
    c[0] = -0.5;
    d[0] = rhs[0] / 2.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double m = 2.0 + c[i - 1];
        c[i] = -1.0 / m;
        d[i] = (rhs[i] + d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
    return x;
}

// Random nonsymmetric, diagonally dominant sparse matrix.
SparseMatrix random_matrix(std::size_t n, std::mt19937& g)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<std::size_t> col(0, n - 1);
    std::vector<Triplet> t;
    std::vector<double> rowsum(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < 4; ++k) {
            const std::size_t j = col(g);
            if (j == i) continue;
            const double v = u(g);
            t.push_back({i, j, v});
            rowsum[i] += std::abs(v);
        }
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, rowsum[i] + 0.5 + std::abs(u(g))});
    return SparseMatrix::from_triplets(n, t);
}

} // namespace

TEST(SparseMatrix, FromTripletsSumsDuplicatesAndSortsColumns)
{
    const SparseMatrix A = SparseMatrix::from_triplets(3, {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {2, 1, -1.0}});
    EXPECT_EQ(A(0, 2), 4.0);
    EXPECT_EQ(A(0, 0), 2.0);
    EXPECT_EQ(A(2, 1), -1.0);
    EXPECT_EQ(A(1, 0), 0.0);
    // structural diagonal present in every row, even when zero
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(A.col()[A.diagonal_index(i)], i);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = A.row_ptr()[i] + 1; k < A.row_ptr()[i + 1]; ++k) EXPECT_LT(A.col()[k - 1], A.col()[k]);
}

TEST(SparseMatrix, MultiplyMatchesDense)
{
    const SparseMatrix A = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 3.0}, {1, 1, 4.0}});
    const Vector y = A * Vector{1.0, -1.0};
    EXPECT_EQ(y, (Vector{-1.0, -1.0}));
}

TEST(LinearSolve, IdentityInOneIteration)
{
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < 7; ++i) t.push_back({i, i, 1.0});
    const SparseMatrix I = SparseMatrix::from_triplets(7, t);
    const Vector b{1, -2, 3, 0.5, 7, 0, -1};
    const auto [x, rep] = solve(I, b);
    EXPECT_TRUE(rep.converged);
    EXPECT_LE(rep.iterations, 1u);
    for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(x[i], b[i], 1e-14);
}

TEST(LinearSolve, Laplacian1dMatchesTridiagonalOracle)
{
    const std::size_t n = 10;
    const Vector b(n, 1.0);
    const Vector ref = tridiagonal_oracle(n, b);
    for (bool pre : {true, false}) {
        LinearSolverOptions opt;
        opt.precondition = pre;
        opt.allow_fallback = false;
        const auto [x, rep] = solve(laplacian_1d(n), b, opt);
        EXPECT_TRUE(rep.converged);
        EXPECT_EQ(rep.method, LinearMethod::BiCGStab);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-10);
    }
    // closed form: x_i = (i+1)(n-i)/2
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(ref[i], (i + 1.0) * (n - i) / 2.0, 1e-12);
}

TEST(LinearSolve, ZeroRowIsSingular)
{
    const SparseMatrix A = SparseMatrix::from_triplets(3, {{0, 0, 1.0}, {2, 2, 1.0}, {2, 0, 1.0}});
    EXPECT_THROW(solve(A, Vector{1.0, 1.0, 1.0}), SingularMatrixError);
}

TEST(LinearSolve, SingularDirectFactorisationThrows)
{
    // rank one, no empty row
    const SparseMatrix A = SparseMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 1, 1.0}, {1, 0, 1.0}, {1, 1, 1.0}});
    Vector x(2);
    EXPECT_THROW(dense_lu_solve(A, Vector{1.0, 2.0}, x), SingularMatrixError);
}

TEST(LinearSolve, PreconditionedAndPlainAgree)
{
    std::mt19937 g(3);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 20 + 10 * static_cast<std::size_t>(t);
        const SparseMatrix A = random_matrix(n, g);
        Vector b(n);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (double& v : b) v = u(g);
        LinearSolverOptions with, without;
        without.precondition = false;
        const auto [x1, r1] = solve(A, b, with);
        const auto [x2, r2] = solve(A, b, without);
        ASSERT_TRUE(r1.converged);
        ASSERT_TRUE(r2.converged);
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x1[i], x2[i], 1e-9 * (1.0 + norm_inf(x1)));
    }
}

TEST(LinearSolve, ReportedResidualIsTrueResidual)
{
    std::mt19937 g(9);
    for (int t = 0; t < 20; ++t) {
        const std::size_t n = 50;
        const SparseMatrix A = random_matrix(n, g);
        const Vector b(n, 1.0);
        LinearSolverOptions opt;
        opt.tol = 1e-10;
        const auto [x, rep] = solve(A, b, opt);
        const double actual = residual_norm(A, x, b) / norm2(b);
        EXPECT_DOUBLE_EQ(rep.relative_residual, actual);
        if (rep.converged) {
            EXPECT_LE(actual, 10.0 * opt.tol);
        }
    }
}

TEST(LinearSolve, DenseFallbackWhenKrylovStops)
{
    LinearSolverOptions opt;
    opt.maxit = 1;
    opt.precondition = false; // ILU(0) alone would solve a tridiagonal system
    const std::size_t n = 40;
    const auto [x, rep] = solve(laplacian_1d(n), Vector(n, 1.0), opt);
    EXPECT_TRUE(rep.converged);
    EXPECT_EQ(rep.method, LinearMethod::DenseLU);
    const Vector ref = tridiagonal_oracle(n, Vector(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-9);
}

TEST(LinearSolve, SparseFallbackAboveDenseLimit)
{
    LinearSolverOptions opt;
    opt.maxit = 1;
    opt.precondition = false; // ILU(0) alone would solve a tridiagonal system
    opt.dense_limit = 10;
    const std::size_t n = 40;
    const auto [x, rep] = solve(laplacian_1d(n), Vector(n, 1.0), opt);
    EXPECT_TRUE(rep.converged);
    EXPECT_EQ(rep.method, LinearMethod::SparseLU);
    const Vector ref = tridiagonal_oracle(n, Vector(n, 1.0));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(x[i], ref[i], 1e-9);
}

TEST(LinearSolve, NoFallbackReportsFailure)
{
    LinearSolverOptions opt;
    opt.maxit = 1;
    opt.precondition = false; // ILU(0) alone would solve a tridiagonal system
    opt.allow_fallback = false;
    const auto [x, rep] = solve(laplacian_1d(40), Vector(40, 1.0), opt);
    EXPECT_FALSE(rep.converged);
    EXPECT_GT(rep.relative_residual, opt.tol);
}

TEST(LinearSolve, ZeroRightHandSide)
{
    const auto [x, rep] = solve(laplacian_1d(5), Vector(5, 0.0));
    EXPECT_TRUE(rep.converged);
    EXPECT_EQ(x, Vector(5, 0.0));
}

TEST(Ilu0, ExactForTridiagonal)
{
    // ILU(0) of a tridiagonal matrix is its exact LU factorisation.
    const std::size_t n = 12;
    const SparseMatrix A = laplacian_1d(n);
    Ilu0 ilu(A);
    ASSERT_TRUE(ilu.ok());
    const Vector b(n, 1.0);
    Vector z(n);
    ilu.apply(b, z);
    const Vector ref = tridiagonal_oracle(n, b);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(z[i], ref[i], 1e-12);
}
