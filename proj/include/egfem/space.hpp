#pragma once

#include "egfem/basis.hpp"
#include "egfem/error.hpp"
#include "egfem/mesh.hpp"
#include "egfem/quadrature.hpp"
#include "egfem/sparse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace egfem {

struct InterfaceKind {
    enum class Type { Discontinuous, Continuous };

    Type type{Type::Continuous};
    double lambda{0.0};

    static InterfaceKind discontinuous(double lambda)
    {
        require(lambda > 0.0, ErrorCode::InvalidArgument, "discontinuous interface needs lambda > 0");
        return {Type::Discontinuous, lambda};
    }
    static InterfaceKind continuous() { return {Type::Continuous, 0.0}; }

    [[nodiscard]] bool is_discontinuous() const { return type == Type::Discontinuous; }
};

enum class LocalKind { Lagrange, Left, Right, Hat };

/// One local shape function: q_index, or q_index times an enrichment function.
struct LocalFn {
    LocalKind kind;
    int index;
};

struct ElementDofs {
    double x0{0.0};
    double x1{0.0};
    int iface{-1};
    std::vector<LocalFn> fns;
    std::vector<int> dofs;
    EnrichmentFn left;  // q_i psi_0 factor
    EnrichmentFn right; // q_i psi_1 factor
    EnrichmentFn hat;   // continuous kink factor
};

struct SpaceOptions {
    SlopeConvention convention{SlopeConvention::Slopes};
    bool dirichlet_left{true};
    bool dirichlet_right{true};
};

/// Global enriched DOF map. On a discontinuous-interface element the bubbles
/// are removed and {q_i psi_0, q_i psi_1} (or the SlopesC pair) added; on a
/// continuous-interface element the full Lagrange set is kept and {q_i psi~} added.
/// Coefficient vectors always span all DOFs, constrained boundary ones included.
class EnrichedSpace {
public:
    EnrichedSpace(Mesh1D mesh, int p, std::vector<InterfaceKind> kinds, SpaceOptions options)
        : mesh_(std::move(mesh)), basis_(p), kinds_(std::move(kinds)), options_(options)
    {
        require(kinds_.size() == mesh_.interfaces().size(), ErrorCode::DimensionMismatch,
                "one InterfaceKind per interface required");
        const int n = mesh_.elements();
        std::vector<int> node_dof(static_cast<std::size_t>(p) * n + 1, -1);
        std::vector<bool> removed(node_dof.size(), false);
        for (int e = 0; e < n; ++e) {
            const int j = mesh_.interface_in(e);
            if (j >= 0 && kinds_[j].is_discontinuous()) {
                for (int i = 1; i < p; ++i) {
                    removed[static_cast<std::size_t>(e) * p + i] = true;
                }
            }
        }
        int next = 0;
        for (std::size_t g = 0; g < node_dof.size(); ++g) {
            if (!removed[g]) {
                node_dof[g] = next++;
            }
        }
        elements_.resize(n);
        for (int e = 0; e < n; ++e) {
            ElementDofs& el = elements_[e];
            el.x0 = mesh_.breakpoints()[e];
            el.x1 = mesh_.breakpoints()[e + 1];
            el.iface = mesh_.interface_in(e);
            const bool disc = el.iface >= 0 && kinds_[el.iface].is_discontinuous();
            for (int i = 0; i <= p; ++i) {
                const int dof = node_dof[static_cast<std::size_t>(e) * p + i];
                if (dof >= 0) {
                    el.fns.push_back({LocalKind::Lagrange, i});
                    el.dofs.push_back(dof);
                }
            }
            if (el.iface < 0) {
                continue;
            }
            const double alpha = mesh_.interfaces()[el.iface].alpha;
            el.left = EnrichmentFn::one_sided_left(el.x0, el.x1, alpha, options_.convention);
            el.right = EnrichmentFn::one_sided_right(el.x0, el.x1, alpha, options_.convention);
            el.hat = EnrichmentFn::hat(el.x0, el.x1, alpha);
            const int first = next;
            if (disc) {
                const LocalKind first_kind =
                    options_.convention == SlopeConvention::Slopes ? LocalKind::Left : LocalKind::Hat;
                for (int i = 0; i <= p; ++i) {
                    el.fns.push_back({first_kind, i});
                    el.dofs.push_back(next++);
                }
                for (int i = 0; i <= p; ++i) {
                    el.fns.push_back({LocalKind::Right, i});
                    el.dofs.push_back(next++);
                }
            } else {
                for (int i = 0; i <= p; ++i) {
                    el.fns.push_back({LocalKind::Hat, i});
                    el.dofs.push_back(next++);
                }
            }
            enriched_.push_back({el.iface, first, next});
        }
        total_ = next;
        left_dof_ = node_dof.front();
        right_dof_ = node_dof.back();
        constrained_.assign(total_, false);
        if (options_.dirichlet_left) {
            constrained_[left_dof_] = true;
        }
        if (options_.dirichlet_right) {
            constrained_[right_dof_] = true;
        }
        for (int i = 0; i < total_; ++i) {
            if (!constrained_[i]) {
                free_.push_back(i);
            }
        }
        check_local_rank();
    }

    [[nodiscard]] const Mesh1D& mesh() const { return mesh_; }
    [[nodiscard]] int order() const { return basis_.order(); }
    [[nodiscard]] const LagrangeBasis& lagrange() const { return basis_; }
    [[nodiscard]] std::span<const InterfaceKind> kinds() const { return kinds_; }
    [[nodiscard]] const SpaceOptions& options() const { return options_; }
    [[nodiscard]] int total_dofs() const { return total_; }
    /// Number of unconstrained DOFs, i.e. the size of the linear system.
    [[nodiscard]] int dim() const { return static_cast<int>(free_.size()); }
    [[nodiscard]] std::span<const int> free_dofs() const { return free_; }
    [[nodiscard]] bool is_constrained(int dof) const { return constrained_[dof]; }
    [[nodiscard]] int left_boundary_dof() const { return left_dof_; }
    [[nodiscard]] int right_boundary_dof() const { return right_dof_; }
    [[nodiscard]] int elements() const { return static_cast<int>(elements_.size()); }
    [[nodiscard]] const ElementDofs& element(int e) const { return elements_[e]; }

    /// [first, last) enriched DOF range of interface j.
    [[nodiscard]] std::pair<int, int> enriched_range(int j) const
    {
        for (const auto& r : enriched_) {
            if (r.iface == j) {
                return {r.first, r.last};
            }
        }
        return {0, 0};
    }

    /// Values and x-derivatives of all local functions of element e at x.
    void eval_local(int e, double x, Side side, std::span<double> val, std::span<double> der) const
    {
        const ElementDofs& el = elements_[e];
        const int np = basis_.size();
        const double h = el.x1 - el.x0;
        const double xhat = (x - el.x0) / h;
        double q[11];
        double dq[11];
        basis_.values(xhat, std::span<double>(q, np));
        basis_.derivatives(xhat, std::span<double>(dq, np));
        for (std::size_t k = 0; k < el.fns.size(); ++k) {
            const LocalFn& f = el.fns[k];
            const double qi = q[f.index];
            const double dqi = dq[f.index] / h;
            if (f.kind == LocalKind::Lagrange) {
                val[k] = qi;
                der[k] = dqi;
                continue;
            }
            const EnrichmentFn& ef = f.kind == LocalKind::Left ? el.left : f.kind == LocalKind::Right ? el.right : el.hat;
            const ValueDeriv psi = eval_enrichment(ef, x, side);
            val[k] = qi * psi.value;
            der[k] = dqi * psi.value + qi * psi.derivative;
        }
    }

    [[nodiscard]] ValueDeriv eval_with_derivative(std::span<const double> coeffs, double x, Side side = Side::Left) const
    {
        require(static_cast<int>(coeffs.size()) == total_, ErrorCode::DimensionMismatch,
                "coefficient vector must span all DOFs");
        const double tol = 1e-14 * (mesh_.b() - mesh_.a());
        if (x < mesh_.a() - tol || x > mesh_.b() + tol) {
            throw Error(ErrorCode::OutOfDomain, "evaluation point " + std::to_string(x) + " outside the mesh");
        }
        x = std::clamp(x, mesh_.a(), mesh_.b());
        const int e = mesh_.locate(x);
        const ElementDofs& el = elements_[e];
        double val[64];
        double der[64];
        eval_local(e, x, side, std::span<double>(val, el.fns.size()), std::span<double>(der, el.fns.size()));
        ValueDeriv out;
        for (std::size_t k = 0; k < el.fns.size(); ++k) {
            out.value += coeffs[el.dofs[k]] * val[k];
            out.derivative += coeffs[el.dofs[k]] * der[k];
        }
        return out;
    }

    [[nodiscard]] double eval(std::span<const double> coeffs, double x, Side side = Side::Left) const
    {
        return eval_with_derivative(coeffs, x, side).value;
    }

private:
    struct EnrichedRange {
        int iface;
        int first;
        int last;
    };

    // Diagonally scaled local mass matrix must have full rank on interface elements.
    void check_local_rank() const
    {
        for (int e = 0; e < elements(); ++e) {
            const ElementDofs& el = elements_[e];
            if (el.iface < 0) {
                continue;
            }
            const int m = static_cast<int>(el.fns.size());
            Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(m, m);
            const QuadRule rule = split_rule(el.x0, el.x1, mesh_.interfaces()[el.iface].alpha, order() + 3);
            std::vector<double> v(m);
            std::vector<double> d(m);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                eval_local(e, rule.points[q], rule.sides[q], v, d);
                for (int i = 0; i < m; ++i) {
                    for (int j = 0; j < m; ++j) {
                        mass(i, j) += rule.weights[q] * v[i] * v[j];
                    }
                }
            }
            const Eigen::VectorXd s = mass.diagonal().cwiseSqrt().cwiseInverse();
            const Eigen::MatrixXd scaled = s.asDiagonal() * mass * s.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled, Eigen::EigenvaluesOnly);
            const double lo = es.eigenvalues()(0);
            const double hi = es.eigenvalues()(m - 1);
            if (!(lo >= 1e-10 * hi)) {
                throw Error(ErrorCode::LinearDependence,
                            "local basis on interface element " + std::to_string(e) + " is rank deficient");
            }
        }
    }

    Mesh1D mesh_;
    LagrangeBasis basis_;
    std::vector<InterfaceKind> kinds_;
    SpaceOptions options_;
    std::vector<ElementDofs> elements_;
    std::vector<EnrichedRange> enriched_;
    std::vector<bool> constrained_;
    std::vector<int> free_;
    int total_{0};
    int left_dof_{0};
    int right_dof_{0};
};

inline EnrichedSpace build_space(Mesh1D mesh, int p, std::vector<InterfaceKind> kinds, SpaceOptions options = {})
{
    require(p >= 1, ErrorCode::UnsupportedOrder, "order must be >= 1");
    return {std::move(mesh), p, std::move(kinds), options};
}

/// Side-aware scalar function g(x, side).
using SidedFunction = std::function<double(double, Side)>;

/// Global one-sided interpolant: Lagrange interpolation on regular elements,
/// separate (p+1)-node interpolation on [x_k, alpha] and [alpha, x_{k+1}] on
/// interface elements, re-expressed in the enriched local basis.
inline std::vector<double> interpolate(const EnrichedSpace& space, const SidedFunction& g)
{
    const int p = space.order();
    std::vector<double> c(space.total_dofs(), 0.0);
    auto sample = [&g](double x, Side side) {
        const double v = g(x, side);
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::EvaluationFailure, "function not finite at x = " + std::to_string(x));
        }
        return v;
    };
    for (int e = 0; e < space.elements(); ++e) {
        const ElementDofs& el = space.element(e);
        const double h = el.x1 - el.x0;
        for (std::size_t k = 0; k < el.fns.size(); ++k) {
            if (el.fns[k].kind == LocalKind::Lagrange) {
                const double x = el.x0 + h * el.fns[k].index / p;
                Side side = Side::Left;
                if (el.iface >= 0 && x >= space.mesh().interfaces()[el.iface].alpha) {
                    side = Side::Right;
                }
                c[el.dofs[k]] = sample(x, side);
            }
        }
    }
    const LagrangeBasis& basis = space.lagrange();
    for (int e = 0; e < space.elements(); ++e) {
        const ElementDofs& el = space.element(e);
        if (el.iface < 0) {
            continue;
        }
        const double alpha = space.mesh().interfaces()[el.iface].alpha;
        // nodal values of the two one-sided interpolants
        std::vector<double> left_vals(p + 1);
        std::vector<double> right_vals(p + 1);
        for (int i = 0; i <= p; ++i) {
            left_vals[i] = sample(el.x0 + (alpha - el.x0) * i / p, Side::Left);
            right_vals[i] = sample(alpha + (el.x1 - alpha) * i / p, Side::Right);
        }
        auto piecewise_target = [&](double x, Side side) {
            std::vector<double> q(p + 1);
            if (on_left_of(x, alpha, side)) {
                basis.values((x - el.x0) / (alpha - el.x0), q);
                return dot(q, left_vals);
            }
            basis.values((x - alpha) / (el.x1 - alpha), q);
            return dot(q, right_vals);
        };

        // Unknowns: every local function except the endpoint Lagrange ones, whose
        // coefficients are the shared vertex values.
        std::vector<int> unknown;
        std::vector<int> fixed;
        for (std::size_t k = 0; k < el.fns.size(); ++k) {
            const LocalFn& f = el.fns[k];
            if (f.kind == LocalKind::Lagrange && (f.index == 0 || f.index == p)) {
                fixed.push_back(static_cast<int>(k));
            } else {
                unknown.push_back(static_cast<int>(k));
            }
        }
        const int per_side = p + 3;
        const int rows = 2 * per_side;
        Eigen::MatrixXd a(rows, static_cast<Eigen::Index>(unknown.size()));
        Eigen::VectorXd rhs(rows);
        std::vector<double> val(el.fns.size());
        std::vector<double> der(el.fns.size());
        const QuadRule pts = split_rule(el.x0, el.x1, alpha, per_side);
        for (int r = 0; r < rows; ++r) {
            space.eval_local(e, pts.points[r], pts.sides[r], val, der);
            double t = piecewise_target(pts.points[r], pts.sides[r]);
            for (int k : fixed) {
                t -= c[el.dofs[k]] * val[k];
            }
            rhs(r) = t;
            for (std::size_t u = 0; u < unknown.size(); ++u) {
                a(r, static_cast<Eigen::Index>(u)) = val[unknown[u]];
            }
        }
        const Eigen::VectorXd scale = a.colwise().norm().cwiseInverse().transpose();
        const Eigen::VectorXd y = (a * scale.asDiagonal()).colPivHouseholderQr().solve(rhs);
        for (std::size_t u = 0; u < unknown.size(); ++u) {
            c[el.dofs[unknown[u]]] = y(static_cast<Eigen::Index>(u)) * scale(static_cast<Eigen::Index>(u));
        }
    }
    return c;
}

/// Jump [phi_i]_alpha = phi_i(alpha+) - phi_i(alpha-) of every DOF supported on
/// the element of interface j, as (dof, value) pairs.
inline std::vector<std::pair<int, double>> jump_vector(const EnrichedSpace& space, int j)
{
    const Interface& itf = space.mesh().interfaces()[j];
    const ElementDofs& el = space.element(itf.element);
    std::vector<double> vl(el.fns.size());
    std::vector<double> vr(el.fns.size());
    std::vector<double> d(el.fns.size());
    space.eval_local(itf.element, itf.alpha, Side::Left, vl, d);
    space.eval_local(itf.element, itf.alpha, Side::Right, vr, d);
    std::vector<std::pair<int, double>> out;
    for (std::size_t k = 0; k < el.fns.size(); ++k) {
        out.emplace_back(el.dofs[k], vr[k] - vl[k]);
    }
    return out;
}

} // namespace egfem
