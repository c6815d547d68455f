#include "egfem/problems.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace egfem;

namespace {

const double kPi = std::acos(-1.0);

} // namespace

TEST(Problem41, ExactSolutionSatisfiesItsProblem)
{
    const ProblemSpec pr = problem_4_1();
    const ExactCheck c = check_exact(pr);
    EXPECT_LE(c.strong, 1e-10);
    EXPECT_LE(c.jump, 1e-12);
    EXPECT_LE(c.flux, 1e-12);
    EXPECT_EQ(pr.exact->operator()(0.0), 0.0);
    EXPECT_EQ(pr.exact->operator()(1.0), 0.0);
}

TEST(Problem41, ConstantsAgreeWithClosedForm)
{
    // gamma = -lambda beta+ beta- / [beta]; c2 from eliminating the flux condition
    for (const Params41 q : {Params41{}, Params41{3, 2.0, 5.0, 0.6, 0.25}}) {
        const auto [c1, c2] = p41_constants(q);
        const double m = q.m;
        const double a = q.alpha;
        const double k = (m + 1) * (m + 2);
        // flux continuity: beta- u'(a-) = beta+ u'(a+)
        const double fl = -std::pow(a, m + 1) / (m + 1) + q.beta_minus * c1;
        const double fr = -std::pow(a - 1, m + 1) / (m + 1) + q.beta_plus * c2;
        EXPECT_NEAR(fl, fr, 1e-12);
        // implicit jump: u(a+) - u(a-) = lambda beta- u'(a-)
        const double ul = -std::pow(a, m + 2) / (k * q.beta_minus) + c1 * a;
        const double ur = -std::pow(a - 1, m + 2) / (k * q.beta_plus) + c2 * (a - 1);
        EXPECT_NEAR(ur - ul, q.lambda * fl, 1e-12);
    }
}

TEST(Problem41, RejectsBadParameters)
{
    Params41 q;
    q.beta_minus = -1.0;
    EXPECT_THROW((void)problem_4_1(q), Error);
    q = Params41{};
    q.lambda = 0.0;
    EXPECT_THROW((void)problem_4_1(q), Error);
}

TEST(Problem42, GammaAtOneThird)
{
    EXPECT_NEAR(p42_gamma(1.0 / 3.0), -std::sqrt(3.0) / kPi, 1e-14);
}

TEST(Problem42, FluxContinuityAndJump)
{
    const Problem2D pr = problem_4_2();
    const double a = pr.alpha;
    for (double y : {0.2, 0.5, 0.9}) {
        const Exact2D l = pr.exact(a, y, Side::Left);
        const Exact2D r = pr.exact(a, y, Side::Right);
        EXPECT_NEAR(100.0 * l.ux, 1.0 * r.ux, 1e-12);
        EXPECT_NEAR(r.u - l.u, pr.lambda * 100.0 * l.ux, 1e-12);
    }
    EXPECT_GT(pr.lambda, 0.0);
}

TEST(Problem42, SourceAtCentre)
{
    const Problem2D pr = problem_4_2();
    EXPECT_NEAR(pr.source(0.5, 0.5, Side::Right), 100.0 * (kPi * kPi * (-0.25) - 2.0), 1e-12);
}

TEST(Problem42, SourceMatchesStrongForm)
{
    const Problem2D pr = problem_4_2();
    const double h = 1e-4;
    for (double x : {0.1, 0.6}) {
        for (double y : {0.3, 0.7}) {
            const Side s = x < pr.alpha ? Side::Left : Side::Right;
            const double beta = pr.beta(x, s);
            auto u = [&](double xx, double yy) { return pr.exact(xx, yy, s).u; };
            const double lap = (u(x + h, y) + u(x - h, y) + u(x, y + h) + u(x, y - h) - 4 * u(x, y)) / (h * h);
            EXPECT_NEAR(-beta * lap, pr.source(x, y, s), 1e-4 * std::abs(pr.source(x, y, s)) + 1e-3);
        }
    }
}

TEST(Problem42, SingularAlpha)
{
    Params42 q;
    q.alpha = 0.5;
    try {
        (void)problem_4_2(q);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InterfaceAtSingularAlpha);
    }
}

TEST(Wall, CoefficientsForFourthPower)
{
    const WallCoefficients w = wall_coefficients(4);
    EXPECT_NEAR(w.d1, 27.0 / 20.0, 1e-15);
    EXPECT_NEAR(w.delta1, 12.15, 1e-13);
    EXPECT_NEAR(w.lambda, 1.0 / 243.0, 1e-17);
}

TEST(Wall, ImplicitJumpAtOneNinth)
{
    const ProblemSpec pr = wall_problem(1);
    const double a = 1.0 / 9.0;
    const PiecewiseField& u = *pr.exact;
    const double jump = u(a, Side::Right) - u(a, Side::Left);
    EXPECT_NEAR(jump, std::pow(9.0, -3) / 270.0, 1e-15);
    EXPECT_NEAR(1.0 * u.derivative(a, Side::Left), std::pow(9.0, -2) / 10.0, 1e-15);
    EXPECT_NEAR(jump / u.derivative(a, Side::Left), 1.0 / 243.0, 1e-14);
    EXPECT_NEAR(pr.flux(u, a, Side::Left), -1.0 / 810.0, 1e-15);
    EXPECT_NEAR(pr.flux(u, a, Side::Right), -1.0 / 810.0, 1e-14);
}

TEST(Wall, ContinuityAtOneThird)
{
    const ProblemSpec pr = wall_problem(2);
    const PiecewiseField& u = *pr.exact;
    EXPECT_NEAR(u(1.0 / 3.0, Side::Left), 1.0 / 243.0, 1e-15);
    EXPECT_NEAR(u(1.0 / 3.0, Side::Right), 1.0 / 243.0, 1e-15);
}

TEST(Wall, AllExactSolutionsSelfConsistent)
{
    for (int id = 1; id <= 3; ++id) {
        const ExactCheck c = check_exact(wall_problem(id));
        EXPECT_LE(c.worst(), 1e-10) << "wall" << id;
    }
    for (int n = 3; n <= 6; ++n) {
        EXPECT_NO_THROW((void)wall_problem(3, n));
    }
}

TEST(Wall, ThirdProblemCombinesTheOthers)
{
    const ProblemSpec w1 = wall_problem(1);
    const ProblemSpec w2 = wall_problem(2);
    const ProblemSpec w3 = wall_problem(3);
    for (int k = 0; k < 50; ++k) {
        const double x = (k + 0.5) / 50.0;
        const ProblemSpec& ref = x < 1.0 / 9.0 ? w1 : w2;
        EXPECT_DOUBLE_EQ(w3.diffusion(x), ref.diffusion(x));
        EXPECT_DOUBLE_EQ(w3.convection(x), ref.convection(x));
        if (x > 1.0 / 9.0 && x < 1.0 / 3.0) {
            EXPECT_DOUBLE_EQ(w3.diffusion(x), w1.diffusion(x));
        }
    }
}

TEST(Wall, UnknownId)
{
    EXPECT_THROW((void)wall_problem(4), Error);
}

TEST(Green, KernelIsIdentityForUnitCoefficient)
{
    const GreenFunction g(0.3, 1.0, 1.0, 0.6, 0.5);
    for (double x : {0.0, 0.2, 0.6, 0.9}) {
        EXPECT_NEAR(g.K(x), x, 1e-15);
    }
}

TEST(Green, ClassicalLimit)
{
    for (double xi : {0.2, 0.7}) {
        const GreenFunction g(xi, 1.0, 1.0, 1.0 / kPi, 0.0);
        EXPECT_NEAR(g(xi), xi * (1.0 - xi), 1e-14);
        for (double x : {0.1, 0.5, 0.9}) {
            const double classical = x < xi ? x * (1.0 - xi) : xi * (1.0 - x);
            EXPECT_NEAR(g(x), classical, 1e-14);
        }
    }
}

TEST(Green, ReproducingProperty)
{
    for (double bm : {1.0, 100.0}) {
        for (double xi : {0.2, 0.7}) {
            const GreenFunction g(xi, bm, 1.0, 1.0 / kPi, 1.0);
            EXPECT_LE(g.reproducing_defect(), 1e-8);
            EXPECT_NEAR(g.jump(), 1.0 * g.flux(1.0 / kPi, Side::Left), 1e-12);
        }
    }
}

TEST(Green, ClosedFormConstantsLeftOfInterface)
{
    const double alpha = 1.0 / kPi;
    const GreenFunction g(0.2, 100.0, 1.0, alpha, 1.0);
    const double c3 = g.K(0.2) / (-g.Kc(alpha) - g.K(alpha) - 1.0);
    EXPECT_NEAR(g.c3(), c3, 1e-15);
    EXPECT_NEAR(g.c2(), c3, 1e-15);
    EXPECT_NEAR(g.c1(), 1.0 + c3, 1e-15);
}

TEST(Green, RejectsXiOnInterface)
{
    EXPECT_THROW(GreenFunction(0.5, 1.0, 1.0, 0.5, 1.0), Error);
}

TEST(DiagonalClosedForm, InteriorAndInterfaceRows)
{
    const Mesh1D mesh = build_mesh(0.0, 1.0, 8, {1.0 / kPi});
    const AppendixReport rep = appendix_diag_check(mesh, 1, 100.0, 1.0, 1.0);
    EXPECT_LE(rep.max_relative_mismatch, 1e-12);
    EXPECT_NEAR(rep.stiffness[0].computed, 2.0 * 100.0 * 8.0, 1e-10);
}

TEST(DiagonalClosedForm, MidpointInterfaceUnitCoefficient)
{
    const int n = 8;
    const double h = 1.0 / n;
    const Mesh1D mesh = build_mesh(0.0, 1.0, n, {2.5 * h});
    const AppendixReport rep = appendix_diag_check(mesh, 1, 1.0, 1.0, 1.0);
    // node k = 2 sits at the left end of the interface element
    EXPECT_NEAR(rep.stiffness[1].computed, 1.0 / h + 1.0 / (2 * h) + 1.0 / (2 * h), 1e-12);
}

TEST(DiagonalClosedForm, HigherOrderRejected)
{
    const Mesh1D mesh = build_mesh(0.0, 1.0, 8, {1.0 / kPi});
    try {
        (void)appendix_diag_check(mesh, 2, 100.0, 1.0, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnsupportedOrder);
    }
}
