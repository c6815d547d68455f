#pragma once

#include "egfem/assembly.hpp"
#include "egfem/error.hpp"
#include "egfem/linalg.hpp"
#include "egfem/norms.hpp"
#include "egfem/problem.hpp"
#include "egfem/report.hpp"
#include "egfem/space.hpp"
#include "egfem/sparse.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <chrono>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace egfem {

struct Exact2D {
    double u{0.0};
    double ux{0.0};
    double uy{0.0};
};

/// -div(beta grad U) + w U = F on [a,b]x[c,d], U = 0 on the boundary, vertical
/// interface x = alpha with [U] = lambda (beta U_x)(alpha-) and [beta U_x] = 0.
struct Problem2D {
    std::string name;
    double a{0.0};
    double b{1.0};
    double c{0.0};
    double d{1.0};
    double alpha{0.5};
    double lambda{1.0};
    PiecewiseField beta;
    PiecewiseField reaction;
    std::function<double(double, double, Side)> source;
    std::function<Exact2D(double, double, Side)> exact; // may be empty
};

/// (Kx (x) My + Mx (x) Ky + Mxw (x) My + Jx (x) My) on the free DOFs; unknowns are
/// ordered i_x * dim_y + i_y.
class KroneckerOperator {
public:
    KroneckerOperator(SparseMatrix kx, SparseMatrix mx, SparseMatrix mxw, SparseMatrix jx, SparseMatrix ky,
                      SparseMatrix my)
        : kx_(std::move(kx)), mx_(std::move(mx)), mxw_(std::move(mxw)), jx_(std::move(jx)), ky_(std::move(ky)),
          my_(std::move(my))
    {
        ax_ = (kx_ + mxw_ + jx_).to_eigen();
        bx_ = mx_.to_eigen();
        my_e_ = my_.to_eigen();
        ky_e_ = ky_.to_eigen();
    }

    [[nodiscard]] int dim_x() const { return kx_.rows(); }
    [[nodiscard]] int dim_y() const { return ky_.rows(); }
    [[nodiscard]] int dim() const { return dim_x() * dim_y(); }
    [[nodiscard]] const SparseMatrix& kx() const { return kx_; }
    [[nodiscard]] const SparseMatrix& mx() const { return mx_; }
    [[nodiscard]] const SparseMatrix& mxw() const { return mxw_; }
    [[nodiscard]] const SparseMatrix& jx() const { return jx_; }
    [[nodiscard]] const SparseMatrix& ky() const { return ky_; }
    [[nodiscard]] const SparseMatrix& my() const { return my_; }

    /// Y = (Kx + Mxw + Jx) U My^T + Mx U Ky^T with U viewed as a dim_x x dim_y matrix.
    void apply(std::span<const double> u, std::span<double> y) const
    {
        require(static_cast<int>(u.size()) == dim() && static_cast<int>(y.size()) == dim(),
                ErrorCode::DimensionMismatch, "matvec: vector length does not match the operator");
        using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Eigen::Map<const RowMat> um(u.data(), dim_x(), dim_y());
        Eigen::Map<RowMat> ym(y.data(), dim_x(), dim_y());
        const RowMat t1 = um * my_e_.transpose();
        const RowMat t2 = um * ky_e_.transpose();
        ym = ax_ * t1;
        ym += bx_ * t2;
    }

    [[nodiscard]] std::vector<double> operator()(std::span<const double> u) const
    {
        std::vector<double> y(u.size());
        apply(u, y);
        return y;
    }

    [[nodiscard]] std::vector<double> diagonal() const
    {
        const auto ax = (kx_ + mxw_ + jx_).diagonal();
        const auto bx = mx_.diagonal();
        const auto my = my_.diagonal();
        const auto ky = ky_.diagonal();
        std::vector<double> d(dim());
        for (int i = 0; i < dim_x(); ++i) {
            for (int j = 0; j < dim_y(); ++j) {
                d[i * dim_y() + j] = ax[i] * my[j] + bx[i] * ky[j];
            }
        }
        return d;
    }

    [[nodiscard]] SparseMatrix explicit_matrix() const
    {
        return kronecker(kx_, my_) + kronecker(mx_, ky_) + kronecker(mxw_, my_) + kronecker(jx_, my_);
    }

private:
    SparseMatrix kx_, mx_, mxw_, jx_, ky_, my_;
    Eigen::SparseMatrix<double> ax_, bx_, my_e_, ky_e_;
};

struct Assembly2D {
    EnrichedSpace xspace;
    EnrichedSpace yspace;
    KroneckerOperator op;
    std::vector<double> rhs;
};

inline Assembly2D assemble_2d(const Problem2D& pr, int p, int nx, int ny)
{
    require(pr.lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
    require(static_cast<bool>(pr.source), ErrorCode::InvalidArgument, "2D problem needs a source");
    EnrichedSpace xs = build_space(build_mesh(pr.a, pr.b, nx, {pr.alpha}), p,
                                   {InterfaceKind::discontinuous(pr.lambda)});
    EnrichedSpace ys = build_space(build_mesh(pr.c, pr.d, ny, std::span<const double>{}), p, {});
    const auto fx = xs.free_dofs();
    const auto fy = ys.free_dofs();
    const PiecewiseField one = PiecewiseField::uniform(1.0);
    const PiecewiseField reaction = pr.reaction.empty() ? PiecewiseField::uniform(0.0) : pr.reaction;
    KroneckerOperator op(assemble_form(xs, Form::Stiffness, pr.beta).submatrix(fx, fx),
                         assemble_form(xs, Form::Mass, pr.beta).submatrix(fx, fx),
                         assemble_form(xs, Form::Mass, reaction).submatrix(fx, fx),
                         penalty_matrix(xs).submatrix(fx, fx),
                         assemble_form(ys, Form::Stiffness, one).submatrix(fy, fy),
                         assemble_form(ys, Form::Mass, one).submatrix(fy, fy));

    // tensor quadrature of F, split in x at alpha
    const int nq = default_load_points(xs);
    const int tx = xs.total_dofs();
    const int ty = ys.total_dofs();
    std::vector<double> full(static_cast<std::size_t>(tx) * ty, 0.0);
    std::vector<double> vx, dx, vy, dy;
    for (int ex = 0; ex < xs.elements(); ++ex) {
        const ElementDofs& elx = xs.element(ex);
        const QuadRule rx = element_rule(xs, ex, nq);
        vx.resize(elx.fns.size());
        dx.resize(elx.fns.size());
        for (int ey = 0; ey < ys.elements(); ++ey) {
            const ElementDofs& ely = ys.element(ey);
            const QuadRule ry = element_rule(ys, ey, nq);
            vy.resize(ely.fns.size());
            dy.resize(ely.fns.size());
            for (std::size_t qx = 0; qx < rx.size(); ++qx) {
                xs.eval_local(ex, rx.points[qx], rx.sides[qx], vx, dx);
                for (std::size_t qy = 0; qy < ry.size(); ++qy) {
                    ys.eval_local(ey, ry.points[qy], Side::Left, vy, dy);
                    const double w = rx.weights[qx] * ry.weights[qy] *
                                     pr.source(rx.points[qx], ry.points[qy], rx.sides[qx]);
                    for (std::size_t i = 0; i < elx.fns.size(); ++i) {
                        const std::size_t row = static_cast<std::size_t>(elx.dofs[i]) * ty;
                        for (std::size_t j = 0; j < ely.fns.size(); ++j) {
                            full[row + ely.dofs[j]] += w * vx[i] * vy[j];
                        }
                    }
                }
            }
        }
    }
    std::vector<double> rhs(static_cast<std::size_t>(fx.size()) * fy.size());
    for (std::size_t i = 0; i < fx.size(); ++i) {
        for (std::size_t j = 0; j < fy.size(); ++j) {
            rhs[i * fy.size() + j] = full[static_cast<std::size_t>(fx[i]) * ty + fy[j]];
        }
    }
    return {std::move(xs), std::move(ys), std::move(op), std::move(rhs)};
}

/// Free-DOF 2D vector to a full tx x ty coefficient grid (zero on the boundary).
inline std::vector<double> expand_2d(const Assembly2D& as, std::span<const double> u)
{
    const auto fx = as.xspace.free_dofs();
    const auto fy = as.yspace.free_dofs();
    require(u.size() == fx.size() * fy.size(), ErrorCode::DimensionMismatch, "expand_2d: wrong vector length");
    const int ty = as.yspace.total_dofs();
    std::vector<double> full(static_cast<std::size_t>(as.xspace.total_dofs()) * ty, 0.0);
    for (std::size_t i = 0; i < fx.size(); ++i) {
        for (std::size_t j = 0; j < fy.size(); ++j) {
            full[static_cast<std::size_t>(fx[i]) * ty + fy[j]] = u[i * fy.size() + j];
        }
    }
    return full;
}

namespace detail {

// Values of all global basis functions of a 1D space at x.
inline std::vector<double> global_values(const EnrichedSpace& s, double x, Side side)
{
    std::vector<double> g(s.total_dofs(), 0.0);
    const int e = s.mesh().locate(x);
    const ElementDofs& el = s.element(e);
    std::vector<double> v(el.fns.size());
    std::vector<double> d(el.fns.size());
    s.eval_local(e, x, side, v, d);
    for (std::size_t k = 0; k < el.fns.size(); ++k) {
        g[el.dofs[k]] = v[k];
    }
    return g;
}

} // namespace detail

/// L2, broken H1 and max tensor-grid-point errors against the exact solution.
inline ErrorNorms error_norms_2d(const Problem2D& pr, const Assembly2D& as, std::span<const double> full, int n = 10)
{
    if (!pr.exact) {
        throw Error(ErrorCode::MissingExact, "problem " + pr.name + " has no exact solution");
    }
    const EnrichedSpace& xs = as.xspace;
    const EnrichedSpace& ys = as.yspace;
    const int ty = ys.total_dofs();
    double l2 = 0.0;
    double semi = 0.0;
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
                for (std::size_t qy = 0; qy < ry.size(); ++qy) {
                    ys.eval_local(ey, ry.points[qy], Side::Left, vy, dy);
                    double u = 0.0, ux = 0.0, uy = 0.0;
                    for (std::size_t i = 0; i < elx.fns.size(); ++i) {
                        const std::size_t row = static_cast<std::size_t>(elx.dofs[i]) * ty;
                        for (std::size_t j = 0; j < ely.fns.size(); ++j) {
                            const double c = full[row + ely.dofs[j]];
                            u += c * vx[i] * vy[j];
                            ux += c * dx[i] * vy[j];
                            uy += c * vx[i] * dy[j];
                        }
                    }
                    const Exact2D ex2 = pr.exact(rx.points[qx], ry.points[qy], rx.sides[qx]);
                    const double w = rx.weights[qx] * ry.weights[qy];
                    l2 += w * (ex2.u - u) * (ex2.u - u);
                    semi += w * ((ex2.ux - ux) * (ex2.ux - ux) + (ex2.uy - uy) * (ex2.uy - uy));
                }
            }
        }
    }
    ErrorNorms out;
    out.l2 = std::sqrt(l2);
    out.h1 = std::sqrt(l2 + semi);
    const auto xb = xs.mesh().breakpoints();
    const auto yb = ys.mesh().breakpoints();
    for (double x : xb) {
        const auto gx = detail::global_values(xs, x, Side::Left);
        for (double y : yb) {
            const auto gy = detail::global_values(ys, y, Side::Left);
            double u = 0.0;
            for (int i = 0; i < xs.total_dofs(); ++i) {
                if (gx[i] == 0.0) {
                    continue;
                }
                for (int j = 0; j < ty; ++j) {
                    u += full[static_cast<std::size_t>(i) * ty + j] * gx[i] * gy[j];
                }
            }
            out.nodal = std::max(out.nodal, std::abs(pr.exact(x, y, Side::Left).u - u));
        }
    }
    return out;
}

struct Result2D {
    std::vector<double> coeffs; // full grid
    SolveReport report;
    SolveStats stats;
};

/// PCG on the Kronecker operator with its diagonal as preconditioner.
inline Result2D solve_2d(const Problem2D& pr, int p, int nx, int ny, bool with_scn = false, double tol = 1e-10)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Assembly2D as = assemble_2d(pr, p, nx, ny);
    const auto diag = as.op.diagonal();
    const int maxit = std::max(2000, 20 * static_cast<int>(std::sqrt(static_cast<double>(as.op.dim()))) * 10);
    const SolveResult sol = pcg([&as](std::span<const double> x, std::span<double> y) { as.op.apply(x, y); }, diag,
                                as.rhs, tol, maxit);
    Result2D out;
    out.coeffs = expand_2d(as, sol.x);
    out.stats = sol.stats;
    out.report.p = p;
    out.report.n_elems = nx;
    out.report.h = (pr.b - pr.a) / nx;
    out.report.dof = as.op.dim();
    out.report.iterations = sol.stats.iterations;
    if (pr.exact) {
        const ErrorNorms e = error_norms_2d(pr, as, out.coeffs);
        out.report.l2 = e.l2;
        out.report.h1 = e.h1;
        out.report.nodal = e.nodal;
    }
    out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (with_scn) {
        out.report.scn = scn(as.op.explicit_matrix()).value;
    }
    return out;
}

} // namespace egfem
