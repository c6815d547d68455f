#include "egfem/problems.hpp"
#include "egfem/tensor2d.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace egfem;

namespace {

const double kPi = std::acos(-1.0);

// Direct 2D quadrature of beta grad U . grad V + w U V plus the interface line term,
// on the free DOFs in the operator's ordering.
Eigen::MatrixXd brute_force(const Assembly2D& as, const PiecewiseField& beta, const PiecewiseField& w, double lambda)
{
    const EnrichedSpace& xs = as.xspace;
    const EnrichedSpace& ys = as.yspace;
    const int tx = xs.total_dofs();
    const int ty = ys.total_dofs();
    Eigen::MatrixXd full = Eigen::MatrixXd::Zero(tx * ty, tx * ty);
    const int n = xs.order() + 3;
    std::vector<double> vx, dx, vy, dy;
    for (int ex = 0; ex < xs.elements(); ++ex) {
        const ElementDofs& elx = xs.element(ex);
        const QuadRule rx = element_rule(xs, ex, n);
        vx.resize(elx.fns.size());
        dx.resize(elx.fns.size());
        for (int ey = 0; ey < ys.elements(); ++ey) {
            const ElementDofs& ely = ys.element(ey);
            const QuadRule ry = element_rule(ys, ey, n);
            vy.resize(ely.fns.size());
            dy.resize(ely.fns.size());
            for (std::size_t qx = 0; qx < rx.size(); ++qx) {
                xs.eval_local(ex, rx.points[qx], rx.sides[qx], vx, dx);
                const double b = beta(rx.points[qx], rx.sides[qx]);
                const double r = w(rx.points[qx], rx.sides[qx]);
                for (std::size_t qy = 0; qy < ry.size(); ++qy) {
                    ys.eval_local(ey, ry.points[qy], Side::Left, vy, dy);
                    const double wt = rx.weights[qx] * ry.weights[qy];
                    for (std::size_t i = 0; i < elx.fns.size(); ++i) {
                        for (std::size_t a = 0; a < ely.fns.size(); ++a) {
                            const int row = elx.dofs[i] * ty + ely.dofs[a];
                            for (std::size_t j = 0; j < elx.fns.size(); ++j) {
                                for (std::size_t c = 0; c < ely.fns.size(); ++c) {
                                    const int col = elx.dofs[j] * ty + ely.dofs[c];
                                    full(row, col) += wt * (b * (dx[i] * vy[a] * dx[j] * vy[c] +
                                                                 vx[i] * dy[a] * vx[j] * dy[c]) +
                                                            r * vx[i] * vy[a] * vx[j] * vy[c]);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    if (!xs.mesh().interfaces().empty()) {
        const auto jv = jump_vector(xs, 0);
        for (int ey = 0; ey < ys.elements(); ++ey) {
            const ElementDofs& ely = ys.element(ey);
            const QuadRule ry = element_rule(ys, ey, n);
            vy.resize(ely.fns.size());
            dy.resize(ely.fns.size());
            for (std::size_t qy = 0; qy < ry.size(); ++qy) {
                ys.eval_local(ey, ry.points[qy], Side::Left, vy, dy);
                for (const auto& [ix, ji] : jv) {
                    for (std::size_t a = 0; a < ely.fns.size(); ++a) {
                        for (const auto& [jx, jj] : jv) {
                            for (std::size_t c = 0; c < ely.fns.size(); ++c) {
                                full(ix * ty + ely.dofs[a], jx * ty + ely.dofs[c]) +=
                                    ry.weights[qy] * ji * vy[a] * jj * vy[c] / lambda;
                            }
                        }
                    }
                }
            }
        }
    }
    const auto fx = xs.free_dofs();
    const auto fy = ys.free_dofs();
    const int n_free = static_cast<int>(fx.size() * fy.size());
    Eigen::MatrixXd out(n_free, n_free);
    for (std::size_t i = 0; i < fx.size(); ++i) {
        for (std::size_t a = 0; a < fy.size(); ++a) {
            for (std::size_t j = 0; j < fx.size(); ++j) {
                for (std::size_t c = 0; c < fy.size(); ++c) {
                    out(i * fy.size() + a, j * fy.size() + c) = full(fx[i] * ty + fy[a], fx[j] * ty + fy[c]);
                }
            }
        }
    }
    return out;
}

Problem2D reproduction_problem()
{
    Params41 q;
    q.m = 0;
    const ProblemSpec one_d = problem_4_1(q);
    const PiecewiseField u = *one_d.exact;
    Problem2D pr;
    pr.name = "reproduction";
    pr.alpha = q.alpha;
    pr.lambda = q.lambda;
    pr.beta = one_d.diffusion;
    pr.reaction = PiecewiseField::uniform(0.0);
    const PiecewiseField beta = one_d.diffusion;
    pr.source = [u, beta](double x, double y, Side s) {
        return y * (1.0 - y) + 2.0 * beta(x, s) * u(x, s);
    };
    pr.exact = [u](double x, double y, Side s) {
        const Jet j = u.jet(x, s);
        return Exact2D{j.value * y * (1.0 - y), j.d1 * y * (1.0 - y), j.value * (1.0 - 2.0 * y)};
    };
    return pr;
}

} // namespace

TEST(Tensor2D, DimensionFormula)
{
    const Assembly2D as = assemble_2d(problem_4_2(), 1, 8, 8);
    EXPECT_EQ(as.op.dim(), (1 * 9 + 2) * (1 * 8 - 1));
    EXPECT_EQ(as.op.dim(), 77);
}

TEST(Tensor2D, ZeroInZeroOut)
{
    const Assembly2D as = assemble_2d(problem_4_2(), 2, 4, 4);
    const std::vector<double> u(as.op.dim(), 0.0);
    for (double v : as.op(u)) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(Tensor2D, MatvecMatchesExplicitKronecker)
{
    for (int p = 1; p <= 3; ++p) {
        const Assembly2D as = assemble_2d(problem_4_2(), p, 4, 4);
        const SparseMatrix k = as.op.explicit_matrix();
        std::mt19937_64 rng(p);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<double> x(as.op.dim());
        for (auto& v : x) {
            v = u(rng);
        }
        const auto y1 = as.op(x);
        const auto y2 = k * x;
        const double scale = k.max_abs();
        for (std::size_t i = 0; i < x.size(); ++i) {
            EXPECT_NEAR(y1[i], y2[i], 1e-13 * scale);
        }
    }
}

TEST(Tensor2D, OperatorIsSymmetric)
{
    const Assembly2D as = assemble_2d(problem_4_2(), 2, 6, 5);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(as.op.dim());
    std::vector<double> b(as.op.dim());
    for (auto& v : a) {
        v = u(rng);
    }
    for (auto& v : b) {
        v = u(rng);
    }
    const double lhs = dot(as.op(a), b);
    const double rhs = dot(a, as.op(b));
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::abs(lhs));
}

TEST(Tensor2D, DiagonalMatchesExplicit)
{
    const Assembly2D as = assemble_2d(problem_4_2(), 2, 4, 4);
    const auto d1 = as.op.diagonal();
    const auto d2 = as.op.explicit_matrix().diagonal();
    for (std::size_t i = 0; i < d1.size(); ++i) {
        EXPECT_NEAR(d1[i], d2[i], 1e-12 * std::abs(d2[i]));
    }
}

TEST(Tensor2D, JumpFactorIsRankOneOuterProduct)
{
    const Problem2D pr = problem_4_2();
    const Assembly2D as = assemble_2d(pr, 2, 8, 8);
    const auto fx = as.xspace.free_dofs();
    std::vector<double> jump(as.xspace.total_dofs(), 0.0);
    for (const auto& [dof, v] : jump_vector(as.xspace, 0)) {
        jump[dof] = v;
    }
    for (std::size_t i = 0; i < fx.size(); ++i) {
        for (std::size_t j = 0; j < fx.size(); ++j) {
            EXPECT_NEAR(as.op.jx()(static_cast<int>(i), static_cast<int>(j)), jump[fx[i]] * jump[fx[j]] / pr.lambda,
                        1e-12);
        }
    }
}

TEST(Tensor2D, PlainLaplacianAgainstDirectAssembly)
{
    // no interface: build the factors from unenriched spaces and compare
    for (int p = 1; p <= 2; ++p) {
        const EnrichedSpace xs = build_space(build_mesh(0.0, 1.0, 3, {}), p, {});
        const EnrichedSpace ys = build_space(build_mesh(0.0, 1.0, 3, {}), p, {});
        const auto fx = xs.free_dofs();
        const auto fy = ys.free_dofs();
        const PiecewiseField one = PiecewiseField::uniform(1.0);
        const PiecewiseField zero = PiecewiseField::uniform(0.0);
        const KroneckerOperator op(assemble_form(xs, Form::Stiffness, one).submatrix(fx, fx),
                                   assemble_form(xs, Form::Mass, one).submatrix(fx, fx),
                                   assemble_form(xs, Form::Mass, zero).submatrix(fx, fx),
                                   SparseMatrix(static_cast<int>(fx.size()), static_cast<int>(fx.size()), {}),
                                   assemble_form(ys, Form::Stiffness, one).submatrix(fy, fy),
                                   assemble_form(ys, Form::Mass, one).submatrix(fy, fy));
        const Assembly2D as{xs, ys, op, {}};
        const Eigen::MatrixXd ref = brute_force(as, one, zero, 1.0);
        const Eigen::MatrixXd got = op.explicit_matrix().to_dense();
        EXPECT_LE((ref - got).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff()) << "p=" << p;
    }
}

TEST(Tensor2D, InterfaceOperatorAgainstDirectAssembly)
{
    const Problem2D pr = problem_4_2();
    for (int p = 1; p <= 2; ++p) {
        const Assembly2D as = assemble_2d(pr, p, 3, 3);
        const Eigen::MatrixXd ref = brute_force(as, pr.beta, pr.reaction, pr.lambda);
        const Eigen::MatrixXd got = as.op.explicit_matrix().to_dense();
        EXPECT_LE((ref - got).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff()) << "p=" << p;
    }
}

TEST(Tensor2D, DiscreteSolutionIsReproduced)
{
    const Problem2D pr = reproduction_problem();
    const Result2D r = solve_2d(pr, 2, 8, 8, false, 1e-12);
    EXPECT_LE(r.report.l2, 1e-10);
    EXPECT_LE(r.report.nodal, 1e-10);
}

TEST(Tensor2D, Problem42CoarseNodalError)
{
    const Result2D r = solve_2d(problem_4_2(), 1, 8, 8);
    EXPECT_GE(r.report.nodal, 6.54e-1 / 3.0);
    EXPECT_LE(r.report.nodal, 6.54e-1 * 3.0);
}

TEST(Tensor2D, Problem42L2Rates)
{
    for (int p = 1; p <= 2; ++p) {
        const double e1 = solve_2d(problem_4_2(), p, 8, 8).report.l2;
        const double e2 = solve_2d(problem_4_2(), p, 16, 16).report.l2;
        const double e3 = solve_2d(problem_4_2(), p, 32, 32).report.l2;
        (void)e1;
        EXPECT_NEAR(std::log2(e2 / e3), p + 1.0, 0.25) << "p=" << p;
    }
}

TEST(Tensor2D, MissingExactAndBadLambda)
{
    Problem2D pr = problem_4_2();
    pr.lambda = -1.0;
    EXPECT_THROW((void)assemble_2d(pr, 1, 4, 4), Error);
    Problem2D q = problem_4_2();
    const Assembly2D as = assemble_2d(q, 1, 4, 4);
    q.exact = nullptr;
    const std::vector<double> full(static_cast<std::size_t>(as.xspace.total_dofs()) * as.yspace.total_dofs(), 0.0);
    try {
        (void)error_norms_2d(q, as, full);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingExact);
    }
}
