#pragma once

#include "egfem/error.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace egfem {

/// Which one-sided limit to take when a point coincides with an interface.
enum class Side { Left, Right };

struct QuadRule {
    std::vector<double> points;
    std::vector<double> weights;
    std::vector<Side> sides; // side tag per point; Left everywhere for plain rules

    [[nodiscard]] std::size_t size() const { return points.size(); }

    template <typename F>
    [[nodiscard]] double integrate(F&& f) const
    {
        double sum = 0.0;
        for (std::size_t q = 0; q < points.size(); ++q) {
            sum += weights[q] * f(points[q], sides[q]);
        }
        return sum;
    }
};

namespace detail {

// Legendre P_n and P_n' at x by the three-term recurrence.
inline void legendre(int n, double x, double& p, double& dp)
{
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

// Nodes/weights on [-1,1]; nodes found by Newton on P_n from Chebyshev guesses.
inline void gauss_reference(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p = 0.0;
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            legendre(n, z, p, dp);
            const double dz = p / dp;
            z -= dz;
            if (std::abs(dz) < 1e-15) {
                break;
            }
        }
        legendre(n, z, p, dp);
        const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if (n % 2 == 1) {
        x[n / 2] = 0.0;
    }
}

} // namespace detail

inline constexpr int max_gauss_points = 30;

/// n-point Gauss–Legendre rule mapped onto [c, d].
inline QuadRule gauss_rule(int n, double c, double d, Side side = Side::Left)
{
    require(n >= 1 && n <= max_gauss_points, ErrorCode::UnsupportedOrder,
            "gauss_rule supports 1..30 points, got " + std::to_string(n));
    std::vector<double> xr;
    std::vector<double> wr;
    if (n == 1) {
        xr = {0.0};
        wr = {2.0};
    } else {
        detail::gauss_reference(n, xr, wr);
    }
    QuadRule rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    rule.sides.assign(n, side);
    const double half = 0.5 * (d - c);
    const double mid = 0.5 * (c + d);
    for (int i = 0; i < n; ++i) {
        rule.points[i] = mid + half * xr[i];
        rule.weights[i] = half * wr[i];
    }
    return rule;
}

/// Composite rule on [xk, xk1] split at alpha; left points are tagged Side::Left,
/// right points Side::Right so integrands can be evaluated one-sidedly.
inline QuadRule split_rule(double xk, double xk1, double alpha, int n)
{
    require(xk < alpha && alpha < xk1, ErrorCode::InvalidArgument, "split point must lie inside the element");
    const double h = xk1 - xk;
    require(std::min(alpha - xk, xk1 - alpha) >= 1e-13 * h, ErrorCode::DegenerateSubinterval,
            "interface too close to an element endpoint");
    QuadRule rule = gauss_rule(n, xk, alpha, Side::Left);
    const QuadRule right = gauss_rule(n, alpha, xk1, Side::Right);
    rule.points.insert(rule.points.end(), right.points.begin(), right.points.end());
    rule.weights.insert(rule.weights.end(), right.weights.begin(), right.weights.end());
    rule.sides.insert(rule.sides.end(), right.sides.begin(), right.sides.end());
    return rule;
}

} // namespace egfem
