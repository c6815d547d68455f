#pragma once

#include "egfem/assembly.hpp"
#include "egfem/error.hpp"
#include "egfem/problem.hpp"
#include "egfem/quadrature.hpp"
#include "egfem/space.hpp"
#include "egfem/tensor2d.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace egfem {

namespace detail {

// Monomial coefficients of -D u'' + 2 delta u' + eta u for constant D, delta, eta.
inline std::vector<double> manufactured_source(std::span<const double> u, double d, double delta, double eta)
{
    std::vector<double> f(u.size(), 0.0);
    for (std::size_t k = 0; k < u.size(); ++k) {
        f[k] += eta * u[k];
        if (k >= 1) {
            f[k - 1] += 2.0 * delta * k * u[k];
        }
        if (k >= 2) {
            f[k - 2] -= d * k * (k - 1.0) * u[k];
        }
    }
    return f;
}

// t^m with derivatives; negative powers never appear.
inline Jet power_jet(double t, int m)
{
    auto pw = [t](int k) { return k < 0 ? 0.0 : std::pow(t, k); };
    return {pw(m), m * pw(m - 1), m * (m - 1.0) * pw(m - 2)};
}

inline std::vector<double> monomial(int degree, double c)
{
    std::vector<double> v(degree + 1, 0.0);
    v[degree] = c;
    return v;
}

} // namespace detail

struct Params41 {
    int m{6};
    double beta_minus{100.0};
    double beta_plus{1.0};
    double alpha{1.0 / std::numbers::pi};
    double lambda{1.0};
};

/// Coefficients (c1, c2) of the reference exact solution, from flux continuity
/// and the implicit jump law.
inline std::pair<double, double> p41_constants(const Params41& q)
{
    const double m = q.m;
    const double a = q.alpha;
    const double k = (m + 1.0) * (m + 2.0);
    Eigen::Matrix2d mat;
    Eigen::Vector2d rhs;
    mat << q.beta_minus, -q.beta_plus, -a - q.lambda * q.beta_minus, a - 1.0;
    rhs << (std::pow(a, m + 1) - std::pow(a - 1.0, m + 1)) / (m + 1.0),
        -std::pow(a, m + 2) / (k * q.beta_minus) + std::pow(a - 1.0, m + 2) / (k * q.beta_plus) -
            q.lambda * std::pow(a, m + 1) / (m + 1.0);
    const Eigen::Vector2d c = mat.fullPivLu().solve(rhs);
    return {c(0), c(1)};
}

inline ProblemSpec problem_4_1(const Params41& q = {})
{
    require(q.beta_minus > 0.0 && q.beta_plus > 0.0, ErrorCode::NonPositiveDiffusivity, "beta must be positive");
    require(q.lambda > 0.0, ErrorCode::InvalidArgument, "lambda must be positive");
    require(q.alpha > 0.0 && q.alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
    require(q.m >= 0, ErrorCode::InvalidArgument, "m must be nonnegative");
    const auto [c1, c2] = p41_constants(q);
    const double m = q.m;
    const double k = (m + 1.0) * (m + 2.0);
    ProblemSpec pr;
    pr.name = "p41";
    pr.interfaces = {q.alpha};
    pr.kinds = {InterfaceKind::discontinuous(q.lambda)};
    const double bm = q.beta_minus;
    const double bp = q.beta_plus;
    pr.diffusion = PiecewiseField::constant({q.alpha}, std::vector<double>{bm, bp});
    pr.convection = PiecewiseField::uniform(0.0);
    pr.reaction = PiecewiseField::uniform(0.0);
    pr.source = PiecewiseField({q.alpha}, {[q](double x) { return detail::power_jet(x, q.m); },
                                           [q](double x) { return detail::power_jet(x - 1.0, q.m); }});
    pr.left = BoundaryCondition::dirichlet(0.0);
    pr.right = BoundaryCondition::dirichlet(0.0);
    pr.exact = PiecewiseField(
        {q.alpha},
        {[=](double x) {
             return Jet{-std::pow(x, m + 2) / (k * bm) + c1 * x, -std::pow(x, m + 1) / ((m + 1) * bm) + c1,
                        -std::pow(x, m) / bm};
         },
         [=](double x) {
             const double t = x - 1.0;
             return Jet{-std::pow(t, m + 2) / (k * bp) + c2 * t, -std::pow(t, m + 1) / ((m + 1) * bp) + c2,
                        -std::pow(t, m) / bp};
         }});
    return pr;
}

/// Coefficients of the multi-layer wall model for exponent n.
struct WallCoefficients {
    double d0{1.0};
    double d1, d2, d3;
    double delta1, delta2, delta3;
    double lambda;
};

inline WallCoefficients wall_coefficients(int n)
{
    require(n >= 3, ErrorCode::InvalidArgument, "wall model needs n >= 3");
    WallCoefficients w{};
    w.d0 = 1.0;
    w.d1 = 18.0 * (n - 1) / (10.0 * n);
    w.delta1 = 0.5 * (9.0 * n * w.d1 - 8.1 * (n - 1));
    w.d2 = (6.0 * n * w.d1 - 2.0 * w.delta1) / (3.0 * (n + 1));
    w.delta2 = 0.5 * (3.0 * (n + 1) * w.d2 - 3.0 * n * w.d1 + 2.0 * w.delta1);
    w.d3 = (8.0 * w.delta2 - 3.0 * (n + 1) * w.d2) / (3.0 * (n + 5));
    w.delta3 = 0.25 * (3.0 * (n - 1) * w.d3 - 3.0 * (n + 1) * w.d2 + 4.0 * w.delta2);
    w.lambda = 1.0 / (81.0 * (n - 1) * w.d0);
    return w;
}

/// Wall model problems 1 (implicit jump at 1/9), 2 (continuous interfaces at 1/3, 2/3)
/// and 3 (all three).
inline ProblemSpec wall_problem(int id, int n = 4)
{
    require(id >= 1 && id <= 3, ErrorCode::UnknownProblem, "wall problem id must be 1, 2 or 3");
    const WallCoefficients w = wall_coefficients(n);
    struct Layer {
        double d, delta, eta;
        std::vector<double> u;
    };
    const Layer l0{w.d0, 0.0, 0.0, detail::monomial(n - 1, 1.0 / 30.0)};
    std::vector<double> u3(n + 3, 0.0);
    u3[n + 1] = 3.0;
    u3[n + 2] = -3.0;
    std::vector<Layer> layers;
    std::vector<double> breaks;
    std::vector<InterfaceKind> kinds;
    ProblemSpec pr;
    if (id == 1) {
        layers = {l0, {w.d1, w.delta1, 0.0, detail::monomial(n, 1.0 / 3.0)}};
        breaks = {1.0 / 9.0};
        kinds = {InterfaceKind::discontinuous(w.lambda)};
    } else {
        std::vector<Layer> outer = {{w.d1, w.delta1, 10.0, detail::monomial(n, 1.0 / 3.0)},
                                    {w.d2, w.delta2, 1.0, detail::monomial(n + 1, 1.0)},
                                    {w.d3, w.delta3, 0.1, u3}};
        breaks = {1.0 / 3.0, 2.0 / 3.0};
        kinds = {InterfaceKind::continuous(), InterfaceKind::continuous()};
        if (id == 3) {
            outer.insert(outer.begin(), l0);
            breaks.insert(breaks.begin(), 1.0 / 9.0);
            kinds.insert(kinds.begin(), InterfaceKind::discontinuous(w.lambda));
        }
        layers = std::move(outer);
    }
    std::vector<double> d;
    std::vector<double> delta;
    std::vector<double> eta;
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> f;
    for (const Layer& l : layers) {
        d.push_back(l.d);
        delta.push_back(l.delta);
        eta.push_back(l.eta);
        u.push_back(l.u);
        f.push_back(detail::manufactured_source(l.u, l.d, l.delta, l.eta));
    }
    pr.name = "wall" + std::to_string(id);
    pr.interfaces = breaks;
    pr.kinds = kinds;
    pr.diffusion = PiecewiseField::constant(breaks, d);
    pr.convection = PiecewiseField::constant(breaks, delta);
    pr.reaction = PiecewiseField::constant(breaks, eta);
    pr.source = PiecewiseField::polynomial(breaks, f);
    pr.exact = PiecewiseField::polynomial(breaks, u);
    pr.convective = true;
    pr.left = BoundaryCondition::flux(0.0);
    pr.right = BoundaryCondition::dirichlet(id == 1 ? 1.0 / 3.0 : 0.0);
    const ExactCheck chk = check_exact(pr);
    if (chk.worst() > 1e-10) {
        throw Error(ErrorCode::InvalidArgument,
                    "wall problem with n = " + std::to_string(n) + " is not self-consistent (residual " +
                        std::to_string(chk.worst()) + ")");
    }
    return pr;
}

/// Green's function of -(beta g')' = delta_xi on (0,1) with g(0) = g(1) = 0,
/// piecewise-constant beta and the implicit jump [g] = lambda (beta g')(alpha).
class GreenFunction {
public:
    GreenFunction(double xi, double beta_minus, double beta_plus, double alpha, double lambda)
        : xi_(xi), bm_(beta_minus), bp_(beta_plus), alpha_(alpha), lambda_(lambda)
    {
        require(bm_ > 0.0 && bp_ > 0.0, ErrorCode::NonPositiveDiffusivity, "beta must be positive");
        require(lambda_ >= 0.0, ErrorCode::InvalidArgument, "lambda must be nonnegative");
        require(alpha_ > 0.0 && alpha_ < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
        require(xi_ > 0.0 && xi_ < 1.0 && xi_ != alpha_, ErrorCode::InvalidArgument,
                "xi must lie in (0,1) away from alpha");
        const double k1 = K(1.0);
        if (xi_ < alpha_) {
            c3_ = K(xi_) / (-Kc(alpha_) - K(alpha_) - lambda_);
            c2_ = c3_;
            c1_ = 1.0 + c3_;
        } else {
            // mirror case: flux s left of xi, s - 1 right of it, jump lambda*s at alpha
            c1_ = (k1 - K(xi_)) / (k1 + lambda_);
            c3_ = c1_ - 1.0;
            c2_ = c3_;
        }
        const double worst = reproducing_defect();
        if (!(worst <= 1e-8)) {
            throw Error(ErrorCode::ReproducingPropertyFailed,
                        "Green's function reproducing defect " + std::to_string(worst));
        }
    }

    [[nodiscard]] double xi() const { return xi_; }
    [[nodiscard]] double c1() const { return c1_; }
    [[nodiscard]] double c2() const { return c2_; }
    [[nodiscard]] double c3() const { return c3_; }

    /// K(x) = int_0^x 1/beta
    [[nodiscard]] double K(double x) const
    {
        return x <= alpha_ ? x / bm_ : alpha_ / bm_ + (x - alpha_) / bp_;
    }
    /// K^c(x) = int_x^1 1/beta
    [[nodiscard]] double Kc(double x) const { return K(1.0) - K(x); }

    /// Flux beta g' on either side of xi.
    [[nodiscard]] double flux(double x, Side side = Side::Left) const
    {
        return on_left_of(x, xi_, side) ? c1_ : c3_;
    }

    [[nodiscard]] double operator()(double x, Side side = Side::Left) const
    {
        const bool left_of_alpha = on_left_of(x, alpha_, side);
        if (xi_ < alpha_) {
            if (!left_of_alpha) {
                return -c2_ * Kc(x);
            }
            return x <= xi_ ? c1_ * K(x) : c3_ * (K(x) - K(xi_)) + c1_ * K(xi_);
        }
        if (left_of_alpha) {
            return c1_ * K(x);
        }
        if (x >= xi_) {
            return -c2_ * Kc(x);
        }
        return c1_ * K(x) + lambda_ * c1_;
    }

    [[nodiscard]] double jump() const { return (*this)(alpha_, Side::Right) - (*this)(alpha_, Side::Left); }

    /// max over built-in test functions of |a(G, v) - v(xi)|
    [[nodiscard]] double reproducing_defect() const
    {
        double worst = 0.0;
        for (int t = 0; t < 5; ++t) {
            if (lambda_ == 0.0 && (t == 2 || t == 4)) {
                continue; // no jump allowed without a penalty
            }
            worst = std::max(worst, std::abs(bilinear_with(t) - test_function(t, xi_, Side::Left).value));
        }
        return worst;
    }

    /// Test functions vanishing at 0 and 1; 2 and 4 jump at alpha.
    [[nodiscard]] ValueDeriv test_function(int t, double x, Side side) const
    {
        const double pi = std::numbers::pi;
        const bool left = on_left_of(x, alpha_, side);
        switch (t) {
        case 0:
            return {std::sin(pi * x), pi * std::cos(pi * x)};
        case 1:
            return {x * (1.0 - x), 1.0 - 2.0 * x};
        case 2:
            return left ? ValueDeriv{x, 1.0} : ValueDeriv{x - 1.0, 1.0};
        case 3:
            return {x * x * (1.0 - x) * std::exp(x), (2.0 * x - 3.0 * x * x) * std::exp(x) + x * x * (1.0 - x) * std::exp(x)};
        default: {
            const double s = left ? 1.0 : 3.0;
            return {s * std::sin(pi * x), s * pi * std::cos(pi * x)};
        }
        }
    }

    /// a(G, v) = int beta G' v' + [G][v]/lambda, by Gauss quadrature on smooth pieces.
    [[nodiscard]] double bilinear_with(int t) const
    {
        std::vector<double> cuts = {0.0, std::min(xi_, alpha_), std::max(xi_, alpha_), 1.0};
        double sum = 0.0;
        for (int piece = 0; piece < 3; ++piece) {
            const QuadRule rule = gauss_rule(20, cuts[piece], cuts[piece + 1]);
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double x = rule.points[q];
                sum += rule.weights[q] * flux(x) * test_function(t, x, Side::Left).derivative;
            }
        }
        if (lambda_ > 0.0) {
            const double jv = test_function(t, alpha_, Side::Right).value - test_function(t, alpha_, Side::Left).value;
            sum += jump() * jv / lambda_;
        }
        return sum;
    }

private:
    double xi_;
    double bm_;
    double bp_;
    double alpha_;
    double lambda_;
    double c1_{0.0};
    double c2_{0.0};
    double c3_{0.0};
};

/// Assembled vs closed-form diagonal entries of the p = 1 system.
struct AppendixReport {
    struct Row {
        std::string label;
        double computed;
        double closed_form;
    };
    std::vector<Row> stiffness;
    std::vector<Row> penalty;
    double max_relative_mismatch{0.0};
};

inline AppendixReport appendix_diag_check(const Mesh1D& mesh, int p, double beta_minus, double beta_plus,
                                          double lambda, double tol = 1e-12)
{
    if (p != 1) {
        throw Error(ErrorCode::UnsupportedOrder, "the diagonal closed forms cover p = 1 only");
    }
    require(mesh.interfaces().size() == 1, ErrorCode::InvalidArgument, "exactly one interface expected");
    const Interface itf = mesh.interfaces()[0];
    const int k = itf.element;
    const int nel = mesh.elements();
    const auto x = mesh.breakpoints();
    const double h = mesh.h(k);
    for (int e = 0; e < nel; ++e) {
        require(std::abs(mesh.h(e) - h) <= 1e-12 * h, ErrorCode::InvalidArgument, "uniform mesh required");
    }
    const EnrichedSpace space = build_space(mesh, 1, {InterfaceKind::discontinuous(lambda)});
    const PiecewiseField beta = PiecewiseField::constant({itf.alpha}, std::vector<double>{beta_minus, beta_plus});
    const SparseMatrix stiff = assemble_form(space, Form::Stiffness, beta);
    const SparseMatrix pen = penalty_matrix(space);
    const double d = itf.alpha - x[k];
    const double e = x[k + 1] - itf.alpha;
    const double m1 = 1.0 / d;
    const double m2 = -1.0 / e;
    AppendixReport rep;
    auto add = [&](std::vector<AppendixReport::Row>& rows, std::string label, double computed, double exact) {
        const double rel = std::abs(computed - exact) / std::max(std::abs(exact), 1e-300);
        rep.max_relative_mismatch = std::max(rep.max_relative_mismatch, rel);
        rows.push_back({std::move(label), computed, exact});
    };
    for (int i = 1; i < nel; ++i) {
        double exact = 0.0;
        if (i < k) {
            exact = 2.0 * beta_minus / h;
        } else if (i == k) {
            exact = beta_minus / h + beta_minus * d / (h * h) + beta_plus * e / (h * h);
        } else if (i == k + 1) {
            exact = beta_plus / h + beta_minus * d / (h * h) + beta_plus * e / (h * h);
        } else {
            exact = 2.0 * beta_plus / h;
        }
        add(rep.stiffness, "node " + std::to_string(i), stiff(i, i), exact);
    }
    const auto [first, last] = space.enriched_range(0);
    const double h2 = h * h;
    const double a_enr[4] = {
        beta_minus * m1 * m1 * (std::pow(2.0 * d - h, 3) + h * h2) / (6.0 * h2),
        beta_minus * m1 * m1 * 4.0 * d * d * d / (3.0 * h2),
        beta_plus * m2 * m2 * 4.0 * e * e * e / (3.0 * h2),
        beta_plus * m2 * m2 * (std::pow(h - 2.0 * d, 3) + h * h2) / (6.0 * h2),
    };
    const double r_enr[4] = {
        std::pow(m1 * d * e / h, 2) / lambda,
        std::pow(m1 * d * d / h, 2) / lambda,
        std::pow(m2 * e * e / h, 2) / lambda,
        std::pow(m2 * d * e / h, 2) / lambda,
    };
    for (int j = 0; j < 4; ++j) {
        add(rep.stiffness, "enriched " + std::to_string(j), stiff(first + j, first + j), a_enr[j]);
        add(rep.penalty, "enriched " + std::to_string(j), pen(first + j, first + j), r_enr[j]);
    }
    (void)last;
    if (rep.max_relative_mismatch > tol) {
        throw Error(ErrorCode::MismatchBeyondTolerance,
                    "diagonal entries differ from the closed forms by " + std::to_string(rep.max_relative_mismatch));
    }
    return rep;
}

struct Params42 {
    double beta_minus{100.0};
    double beta_plus{1.0};
    double alpha{1.0 / std::numbers::pi};
};

/// gamma = -tan(pi alpha)/pi
inline double p42_gamma(double alpha) { return -std::tan(std::numbers::pi * alpha) / std::numbers::pi; }

/// lambda making u = beta^+ sin(pi x) | beta^- sin(pi x) satisfy [u] = lambda (beta u')(alpha-).
inline double p42_lambda(const Params42& q)
{
    const double pi = std::numbers::pi;
    return (q.beta_minus - q.beta_plus) * std::tan(pi * q.alpha) / (pi * q.beta_minus * q.beta_plus);
}

inline Problem2D problem_4_2(const Params42& q = {})
{
    const double pi = std::numbers::pi;
    require(q.beta_minus > 0.0 && q.beta_plus > 0.0, ErrorCode::NonPositiveDiffusivity, "beta must be positive");
    require(q.alpha > 0.0 && q.alpha < 1.0, ErrorCode::InvalidArgument, "alpha must lie in (0,1)");
    if (std::abs(std::cos(pi * q.alpha)) < 1e-8) {
        throw Error(ErrorCode::InterfaceAtSingularAlpha, "tan(pi alpha) is unbounded at this alpha");
    }
    const double lambda = p42_lambda(q);
    require(lambda > 0.0, ErrorCode::InvalidArgument,
            "these parameters give a nonpositive jump coefficient lambda = " + std::to_string(lambda));
    Problem2D pr;
    pr.name = "p42";
    pr.alpha = q.alpha;
    pr.lambda = lambda;
    pr.beta = PiecewiseField::constant({q.alpha}, std::vector<double>{q.beta_minus, q.beta_plus});
    pr.reaction = PiecewiseField::uniform(0.0);
    const double bm = q.beta_minus;
    const double bp = q.beta_plus;
    pr.source = [bm, bp, pi](double x, double y, Side) {
        return bp * bm * std::sin(pi * x) * (pi * pi * y * (y - 1.0) - 2.0);
    };
    pr.exact = [bm, bp, pi, alpha = q.alpha](double x, double y, Side side) {
        const double amp = on_left_of(x, alpha, side) ? bp : bm;
        const double yy = y * (y - 1.0);
        return Exact2D{amp * std::sin(pi * x) * yy, amp * pi * std::cos(pi * x) * yy,
                       amp * std::sin(pi * x) * (2.0 * y - 1.0)};
    };
    return pr;
}

} // namespace egfem
