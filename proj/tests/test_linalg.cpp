#include "egfem/assembly.hpp"
#include "egfem/linalg.hpp"
#include "egfem/problems.hpp"
#include "egfem/sparse.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace egfem;

TEST(Sparse, DuplicatesAreSummedAndZerosDropped)
{
    const SparseMatrix m(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 1.0}, {1, 0, -1.0}, {1, 1, 4.0}});
    EXPECT_EQ(m(0, 0), 3.0);
    EXPECT_EQ(m(1, 0), 0.0);
    EXPECT_EQ(m.nonzeros(), 2u);
}

TEST(Sparse, KroneckerMatchesDense)
{
    Eigen::MatrixXd a(2, 2);
    a << 1, 2, 0, 3;
    Eigen::MatrixXd b(2, 3);
    b << 0, 1, 4, 5, 0, 6;
    const SparseMatrix k = kronecker(SparseMatrix::from_dense(a), SparseMatrix::from_dense(b));
    const Eigen::MatrixXd d = k.to_dense();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            EXPECT_TRUE(d.block(i * 2, j * 3, 2, 3).isApprox(a(i, j) * b) || a(i, j) == 0.0);
        }
    }
}

TEST(Sparse, OutOfRangeTriplet)
{
    EXPECT_THROW(SparseMatrix(2, 2, {{2, 0, 1.0}}), Error);
}

TEST(Pcg, IdentityInOneIteration)
{
    const SparseMatrix a = SparseMatrix::identity(5);
    const std::vector<double> b = {1, 2, 3, 4, 5};
    const SolveResult r = pcg(a, b);
    EXPECT_EQ(r.stats.iterations, 1);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(r.x[i], b[i], 1e-15);
    }
}

TEST(Pcg, DiagonalInOneIteration)
{
    std::vector<Triplet> t;
    for (int i = 0; i < 10; ++i) {
        t.push_back({i, i, i + 1.0});
    }
    const SparseMatrix a(10, 10, t);
    const std::vector<double> b(10, 1.0);
    const SolveResult r = pcg(a, b);
    EXPECT_EQ(r.stats.iterations, 1);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(r.x[i], 1.0 / (i + 1.0), 1e-15);
    }
}

TEST(Pcg, Problem41FiniteTermination)
{
    const ProblemSpec pr = problem_4_1();
    const LinearSystem sys = assemble(pr, make_space(pr, 32, 1));
    const SolveResult r = pcg(sys.A, sys.b, 1e-12);
    EXPECT_LE(r.stats.relative_residual, 1e-12);
    // finite termination, plus one step lost to rounding
    EXPECT_LE(r.stats.iterations, sys.A.rows() + 1);
}

TEST(Pcg, RejectsNonPositiveDiagonal)
{
    const SparseMatrix a(2, 2, {{0, 0, 1.0}, {1, 1, -1.0}});
    const std::vector<double> b = {1.0, 1.0};
    try {
        (void)pcg(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonpositiveDiagonal);
    }
}

TEST(Pcg, IterationLimit)
{
    const ProblemSpec pr = problem_4_1();
    const LinearSystem sys = assemble(pr, make_space(pr, 32, 2));
    try {
        (void)pcg(sys.A, sys.b, 1e-12, 2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MaxIterations);
    }
}

TEST(Pcg, ZeroRightHandSide)
{
    const SparseMatrix a = SparseMatrix::identity(3);
    const std::vector<double> b(3, 0.0);
    const SolveResult r = pcg(a, b);
    EXPECT_EQ(r.stats.iterations, 0);
    EXPECT_EQ(r.x, b);
}

TEST(Scn, IdentityAndDiagonal)
{
    EXPECT_NEAR(scn(SparseMatrix::identity(7)).value, 1.0, 1e-14);
    std::vector<Triplet> t;
    for (int i = 0; i < 9; ++i) {
        t.push_back({i, i, std::pow(10.0, i)});
    }
    EXPECT_NEAR(scn(SparseMatrix(9, 9, t)).value, 1.0, 1e-12);
}

TEST(Scn, Problem41Coarse)
{
    const ProblemSpec pr = problem_4_1();
    const LinearSystem sys = assemble(pr, make_space(pr, 8, 1));
    const double v = scn(sys.A).value;
    EXPECT_GE(v, 2.15e3 / 10.0);
    EXPECT_LE(v, 2.15e3 * 10.0);
}

TEST(Scn, InvariantUnderDiagonalScaling)
{
    const ProblemSpec pr = problem_4_1();
    const LinearSystem sys = assemble(pr, make_space(pr, 8, 2));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    std::vector<double> e(sys.A.rows());
    for (auto& v : e) {
        v = u(rng);
    }
    auto t = sys.A.triplets();
    for (auto& x : t) {
        x.value *= e[x.row] * e[x.col];
    }
    const double a = scn(sys.A).value;
    const double b = scn(SparseMatrix(sys.A.rows(), sys.A.cols(), t)).value;
    EXPECT_NEAR(b / a, 1.0, 1e-6);
}

TEST(Scn, LanczosAgreesWithDense)
{
    // 1D Laplacian above the dense limit, compared against the closed-form spectrum
    const int n = dense_scn_limit + 50;
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 2.0});
        if (i > 0) {
            t.push_back({i, i - 1, -1.0});
            t.push_back({i - 1, i, -1.0});
        }
    }
    const double pi = std::acos(-1.0);
    const double lmax = 1.0 - std::cos(n * pi / (n + 1.0));
    const double lmin = 1.0 - std::cos(pi / (n + 1.0));
    const ScnResult r = scn(SparseMatrix(n, n, t));
    EXPECT_NEAR(r.value / (lmax / lmin), 1.0, 1e-4);
}

TEST(Scn, IndefiniteIsFlagged)
{
    const SparseMatrix a(2, 2, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 2.0}, {1, 1, 1.0}});
    EXPECT_TRUE(scn(a).indefinite);
}

TEST(Direct, OneByOne)
{
    const SparseMatrix a(1, 1, {{0, 0, 2.0}});
    const std::vector<double> b = {4.0};
    EXPECT_NEAR(direct_solve(a, b).x[0], 2.0, 1e-15);
}

TEST(Direct, RandomWellConditionedSystem)
{
    const int n = 50;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> col(0, n - 1);
    std::vector<Triplet> t;
    for (int i = 0; i < n; ++i) {
        t.push_back({i, i, 10.0});
        for (int k = 0; k < 4; ++k) {
            t.push_back({i, col(rng), u(rng)});
        }
    }
    const SparseMatrix a(n, n, t);
    std::vector<double> b(n);
    for (auto& v : b) {
        v = u(rng);
    }
    const SolveResult r = direct_solve(a, b);
    const auto ax = a * r.x;
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
        res = std::max(res, std::abs(ax[i] - b[i]));
    }
    EXPECT_LE(res / norm_inf(b), 1e-10);
}

TEST(Direct, SingularMatrix)
{
    const SparseMatrix a(3, 3, {{0, 0, 1.0}, {0, 1, 2.0}, {1, 0, 1.0}, {1, 1, 2.0}, {2, 2, 1.0}});
    const std::vector<double> b = {1.0, 2.0, 3.0};
    try {
        (void)direct_solve(a, b);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::SingularMatrix);
    }
}
