#pragma once

#include "egfem/error.hpp"
#include "egfem/linalg.hpp"
#include "egfem/problem.hpp"
#include "egfem/quadrature.hpp"
#include "egfem/space.hpp"
#include "egfem/sparse.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace egfem {

enum class Form {
    Stiffness,  // int w phi_j' phi_i'
    Mass,       // int w phi_j phi_i
    Convection, // -int 2 w phi_j phi_i'
};

inline QuadRule element_rule(const EnrichedSpace& space, int e, int n)
{
    const ElementDofs& el = space.element(e);
    if (el.iface >= 0) {
        return split_rule(el.x0, el.x1, space.mesh().interfaces()[el.iface].alpha, n);
    }
    return gauss_rule(n, el.x0, el.x1);
}

inline int default_matrix_points(const EnrichedSpace& space) { return space.order() + 3; }
inline int default_load_points(const EnrichedSpace& space) { return space.order() + 5; }

/// Weighted bilinear form over all DOFs (constrained ones included); row = test function.
inline SparseMatrix assemble_form(const EnrichedSpace& space, Form form, const PiecewiseField& w, int n = 0)
{
    if (n <= 0) {
        n = default_matrix_points(space);
    }
    std::vector<Triplet> t;
    std::vector<double> v;
    std::vector<double> d;
    for (int e = 0; e < space.elements(); ++e) {
        const ElementDofs& el = space.element(e);
        const std::size_t m = el.fns.size();
        v.resize(m);
        d.resize(m);
        std::vector<double> local(m * m, 0.0);
        const QuadRule rule = element_rule(space, e, n);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double x = rule.points[q];
            const Side s = rule.sides[q];
            space.eval_local(e, x, s, v, d);
            const double c = rule.weights[q] * w(x, s);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < m; ++j) {
                    double val = 0.0;
                    switch (form) {
                    case Form::Stiffness:
                        val = d[j] * d[i];
                        break;
                    case Form::Mass:
                        val = v[j] * v[i];
                        break;
                    case Form::Convection:
                        val = -2.0 * v[j] * d[i];
                        break;
                    }
                    local[i * m + j] += c * val;
                }
            }
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                t.push_back({el.dofs[i], el.dofs[j], local[i * m + j]});
            }
        }
    }
    return {space.total_dofs(), space.total_dofs(), std::move(t)};
}

/// Sum over discontinuous interfaces of (1/lambda) J J^T.
inline SparseMatrix penalty_matrix(const EnrichedSpace& space)
{
    std::vector<Triplet> t;
    for (std::size_t j = 0; j < space.kinds().size(); ++j) {
        const InterfaceKind& kind = space.kinds()[j];
        if (!kind.is_discontinuous()) {
            continue;
        }
        const auto jv = jump_vector(space, static_cast<int>(j));
        for (const auto& [r, a] : jv) {
            for (const auto& [c, b] : jv) {
                t.push_back({r, c, a * b / kind.lambda});
            }
        }
    }
    return {space.total_dofs(), space.total_dofs(), std::move(t)};
}

inline std::vector<double> load_vector(const EnrichedSpace& space, const SidedFunction& f, int n = 0)
{
    if (n <= 0) {
        n = default_load_points(space);
    }
    std::vector<double> b(space.total_dofs(), 0.0);
    std::vector<double> v;
    std::vector<double> d;
    for (int e = 0; e < space.elements(); ++e) {
        const ElementDofs& el = space.element(e);
        v.resize(el.fns.size());
        d.resize(el.fns.size());
        const QuadRule rule = element_rule(space, e, n);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            space.eval_local(e, rule.points[q], rule.sides[q], v, d);
            const double c = rule.weights[q] * f(rule.points[q], rule.sides[q]);
            for (std::size_t i = 0; i < el.fns.size(); ++i) {
                b[el.dofs[i]] += c * v[i];
            }
        }
    }
    return b;
}

/// Reduced system on the free DOFs after Dirichlet elimination.
struct LinearSystem {
    SparseMatrix A;
    std::vector<double> b;
    SparseMatrix full; // all DOFs, before elimination
    std::vector<double> full_rhs;
    std::vector<double> boundary_values; // full-length, Dirichlet values at constrained DOFs
    std::vector<int> free;
    bool symmetric{true};

    /// Free-DOF vector to full coefficient vector.
    [[nodiscard]] std::vector<double> expand(std::span<const double> x) const
    {
        require(x.size() == free.size(), ErrorCode::DimensionMismatch, "expand: wrong vector length");
        std::vector<double> c = boundary_values;
        for (std::size_t i = 0; i < free.size(); ++i) {
            c[free[i]] = x[i];
        }
        return c;
    }
};

inline SpaceOptions space_options_for(const ProblemSpec& pr, SlopeConvention convention = SlopeConvention::Slopes)
{
    return {convention, pr.left.is_dirichlet(), pr.right.is_dirichlet()};
}

inline EnrichedSpace make_space(const ProblemSpec& pr, int n_elements, int p,
                                SlopeConvention convention = SlopeConvention::Slopes)
{
    return build_space(build_mesh(pr.a, pr.b, n_elements, std::span<const double>(pr.interfaces)), p, pr.kinds,
                       space_options_for(pr, convention));
}

inline LinearSystem assemble(const ProblemSpec& pr, const EnrichedSpace& space)
{
    const auto ifs = space.mesh().interfaces();
    require(ifs.size() == pr.interfaces.size(), ErrorCode::DimensionMismatch,
            "space and problem disagree on the interfaces");
    for (std::size_t j = 0; j < ifs.size(); ++j) {
        require(ifs[j].alpha == pr.interfaces[j], ErrorCode::DimensionMismatch,
                "space and problem disagree on the interfaces");
    }
    const int nq = default_matrix_points(space);
    for (int e = 0; e < space.elements(); ++e) {
        const QuadRule rule = element_rule(space, e, nq);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            if (!(pr.diffusion(rule.points[q], rule.sides[q]) > 0.0)) {
                throw Error(ErrorCode::NonPositiveDiffusivity,
                            "diffusivity not positive at x = " + std::to_string(rule.points[q]));
            }
        }
    }
    SparseMatrix k = assemble_form(space, Form::Stiffness, pr.diffusion) +
                     assemble_form(space, Form::Mass, pr.reaction) + penalty_matrix(space);
    if (pr.convective) {
        k = k + assemble_form(space, Form::Convection, pr.convection);
    }
    std::vector<double> rhs = load_vector(space, pr.source.as_function());
    // a(u,v) = (f,v) + q(a) v(a) - q(b) v(b)
    if (!pr.left.is_dirichlet()) {
        rhs[space.left_boundary_dof()] += pr.left.value;
    }
    if (!pr.right.is_dirichlet()) {
        rhs[space.right_boundary_dof()] -= pr.right.value;
    }

    LinearSystem sys;
    sys.symmetric = !pr.convective;
    sys.free.assign(space.free_dofs().begin(), space.free_dofs().end());
    sys.boundary_values.assign(space.total_dofs(), 0.0);
    std::vector<int> constrained;
    if (pr.left.is_dirichlet()) {
        sys.boundary_values[space.left_boundary_dof()] = pr.left.value;
        constrained.push_back(space.left_boundary_dof());
    }
    if (pr.right.is_dirichlet()) {
        sys.boundary_values[space.right_boundary_dof()] = pr.right.value;
        constrained.push_back(space.right_boundary_dof());
    }
    sys.A = k.submatrix(sys.free, sys.free);
    sys.b.resize(sys.free.size());
    const auto lift = k * sys.boundary_values;
    for (std::size_t i = 0; i < sys.free.size(); ++i) {
        sys.b[i] = rhs[sys.free[i]] - lift[sys.free[i]];
    }
    sys.full = std::move(k);
    sys.full_rhs = std::move(rhs);
    return sys;
}

/// ||A x - b||_inf / ||b||_inf on the reduced system.
inline double residual_check(const LinearSystem& sys, std::span<const double> x)
{
    const auto ax = sys.A * x;
    double r = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        r = std::max(r, std::abs(ax[i] - sys.b[i]));
    }
    const double bn = norm_inf(sys.b);
    return bn > 0.0 ? r / bn : r;
}

/// PCG for symmetric systems, sparse LU otherwise.
inline SolveResult solve(const LinearSystem& sys, double tol = 1e-12)
{
    if (sys.symmetric) {
        return pcg(sys.A, sys.b, tol);
    }
    return direct_solve(sys.A, sys.b);
}

} // namespace egfem
