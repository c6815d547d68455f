#pragma once

#include "egfem/error.hpp"
#include "egfem/quadrature.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace egfem {

/// Equispaced Lagrange basis q_0..q_p on the reference element [0,1].
///
/// Values use the barycentric form; derivatives use the product-sum form,
/// which stays exact at the nodes themselves.
class LagrangeBasis {
public:
    explicit LagrangeBasis(int order) : p_(order)
    {
        require(order >= 1 && order <= 10, ErrorCode::UnsupportedOrder,
                "Lagrange order must be in 1..10, got " + std::to_string(order));
        nodes_.resize(p_ + 1);
        weights_.resize(p_ + 1);
        for (int i = 0; i <= p_; ++i) {
            nodes_[i] = static_cast<double>(i) / p_;
        }
        for (int i = 0; i <= p_; ++i) {
            double prod = 1.0;
            for (int j = 0; j <= p_; ++j) {
                if (j != i) {
                    prod *= nodes_[i] - nodes_[j];
                }
            }
            weights_[i] = 1.0 / prod;
        }
    }

    [[nodiscard]] int order() const { return p_; }
    [[nodiscard]] int size() const { return p_ + 1; }
    [[nodiscard]] std::span<const double> nodes() const { return nodes_; }

    void values(double x, std::span<double> out) const
    {
        for (int i = 0; i <= p_; ++i) {
            if (x == nodes_[i]) {
                for (int j = 0; j <= p_; ++j) {
                    out[j] = (i == j) ? 1.0 : 0.0;
                }
                return;
            }
        }
        double denom = 0.0;
        for (int i = 0; i <= p_; ++i) {
            out[i] = weights_[i] / (x - nodes_[i]);
            denom += out[i];
        }
        for (int i = 0; i <= p_; ++i) {
            out[i] /= denom;
        }
    }

    void derivatives(double x, std::span<double> out) const
    {
        for (int i = 0; i <= p_; ++i) {
            double sum = 0.0;
            for (int m = 0; m <= p_; ++m) {
                if (m == i) {
                    continue;
                }
                double prod = 1.0 / (nodes_[i] - nodes_[m]);
                for (int k = 0; k <= p_; ++k) {
                    if (k != i && k != m) {
                        prod *= (x - nodes_[k]) / (nodes_[i] - nodes_[k]);
                    }
                }
                sum += prod;
            }
            out[i] = sum;
        }
    }

    [[nodiscard]] double value(int i, double x) const
    {
        std::vector<double> v(p_ + 1);
        values(x, v);
        return v[i];
    }

    [[nodiscard]] double derivative(int i, double x) const
    {
        std::vector<double> d(p_ + 1);
        derivatives(x, d);
        return d[i];
    }

    /// Monomial coefficients c_k of q_i(x) = sum_k c_k x^k.
    [[nodiscard]] std::vector<double> monomial(int i) const
    {
        std::vector<double> c{weights_[i]};
        for (int j = 0; j <= p_; ++j) {
            if (j == i) {
                continue;
            }
            std::vector<double> next(c.size() + 1, 0.0);
            for (std::size_t k = 0; k < c.size(); ++k) {
                next[k + 1] += c[k];
                next[k] -= nodes_[j] * c[k];
            }
            c = std::move(next);
        }
        return c;
    }

    /// Taylor coefficients q_i^{(l)}(t)/l!, l = 0..p.
    [[nodiscard]] std::vector<double> taylor(int i, double t) const
    {
        const std::vector<double> c = monomial(i);
        std::vector<double> out(p_ + 1, 0.0);
        for (int l = 0; l <= p_; ++l) {
            double binom = 1.0; // C(k, l), starting from k = l
            double tpow = 1.0;
            for (int k = l; k <= p_; ++k) {
                out[l] += c[k] * binom * tpow;
                binom = binom * (k + 1) / (k + 1 - l);
                tpow *= t;
            }
        }
        return out;
    }

private:
    int p_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Which pair of enrichment functions spans the discontinuous enrichment space.
///
/// Slopes: one-sided psi_0, psi_1 with m1 = 1/(alpha-x_k), m2 = 1/(alpha-x_{k+1}).
/// SlopesC: continuous hat psi~_0 with bounded slopes plus a one-sided right
/// function with the bounded slope (alpha-x_k)/h.
enum class SlopeConvention { Slopes, SlopesC };

enum class EnrichmentKind { OneSidedLeft, OneSidedRight, Hat };

struct EnrichmentFn {
    EnrichmentKind kind{EnrichmentKind::OneSidedLeft};
    double xk{0.0};
    double xk1{1.0};
    double alpha{0.5};
    double slope_left{0.0};  // active on [xk, alpha)
    double slope_right{0.0}; // active on (alpha, xk1]

    static EnrichmentFn one_sided_left(double xk, double xk1, double alpha,
                                       SlopeConvention c = SlopeConvention::Slopes)
    {
        const double m = (c == SlopeConvention::Slopes) ? 1.0 / (alpha - xk) : (alpha - xk1) / (xk1 - xk);
        return {EnrichmentKind::OneSidedLeft, xk, xk1, alpha, m, 0.0};
    }

    static EnrichmentFn one_sided_right(double xk, double xk1, double alpha,
                                        SlopeConvention c = SlopeConvention::Slopes)
    {
        const double m = (c == SlopeConvention::Slopes) ? 1.0 / (alpha - xk1) : (alpha - xk) / (xk1 - xk);
        return {EnrichmentKind::OneSidedRight, xk, xk1, alpha, 0.0, m};
    }

    /// Continuous kink function; identical for the SlopesC pair and the
    /// continuous-interface enrichment.
    static EnrichmentFn hat(double xk, double xk1, double alpha)
    {
        const double h = xk1 - xk;
        return {EnrichmentKind::Hat, xk, xk1, alpha, (alpha - xk1) / h, (alpha - xk) / h};
    }
};

struct ValueDeriv {
    double value{0.0};
    double derivative{0.0};
};

inline bool on_left_of(double x, double alpha, Side side)
{
    return x < alpha || (x == alpha && side == Side::Left);
}

inline ValueDeriv eval_enrichment(const EnrichmentFn& f, double x, Side side = Side::Left)
{
    if (x < f.xk || x > f.xk1) {
        return {};
    }
    const bool left = on_left_of(x, f.alpha, side);
    switch (f.kind) {
    case EnrichmentKind::OneSidedLeft:
        if (left) {
            return {f.slope_left * (x - f.xk), f.slope_left};
        }
        return {};
    case EnrichmentKind::OneSidedRight:
        if (!left) {
            return {f.slope_right * (x - f.xk1), f.slope_right};
        }
        return {};
    case EnrichmentKind::Hat:
        if (left) {
            return {f.slope_left * (x - f.xk), f.slope_left};
        }
        return {f.slope_right * (x - f.xk1), f.slope_right};
    }
    return {};
}

/// Coefficients expressing each bubble q_i (1 <= i <= p-1) in span{q_l psi_0, q_l psi_1}
/// on the reference element, with the Slopes convention.
struct BubbleDependence {
    int order{1};
    double alpha_hat{0.5};
    // coefficients[b][j][l]: bubble b+1, enrichment j (0 left, 1 right), Lagrange index l.
    std::vector<std::array<std::vector<double>, 2>> coefficients;
    double residual{0.0};
    bool least_squares_fallback{false};
};

namespace detail {

inline double condition_number(const Eigen::MatrixXd& m)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s(s.size() - 1) == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / s(s.size() - 1);
}

} // namespace detail

inline BubbleDependence bubble_dependence(int p, double alpha_hat)
{
    require(p >= 1, ErrorCode::UnsupportedOrder, "order must be >= 1");
    require(alpha_hat > 0.0 && alpha_hat < 1.0, ErrorCode::InvalidArgument, "alpha_hat must lie in (0,1)");
    const LagrangeBasis basis(p);
    BubbleDependence out;
    out.order = p;
    out.alpha_hat = alpha_hat;
    if (p == 1) {
        return out;
    }
    const double m1 = 1.0 / alpha_hat;
    const double m2 = 1.0 / (alpha_hat - 1.0);
    const int n = p + 1;

    // Taylor data at both endpoints; the unit-slope problem x*S(x) = q_i(x)
    // (resp. (x-1)*S(x) = q_i(x)) reduces to a Wronskian system.
    std::array<std::vector<std::vector<double>>, 2> taylor;
    for (int side = 0; side < 2; ++side) {
        for (int l = 0; l <= p; ++l) {
            taylor[side].push_back(basis.taylor(l, side == 0 ? 0.0 : 1.0));
        }
    }

    for (int bubble = 1; bubble < p; ++bubble) {
        std::array<std::vector<double>, 2> coeffs;
        for (int side = 0; side < 2; ++side) {
            Eigen::MatrixXd w(n, n);
            Eigen::VectorXd r(n);
            for (int j = 0; j <= p; ++j) {
                for (int l = 0; l <= p; ++l) {
                    w(j, l) = taylor[side][l][j];
                }
                r(j) = (j + 1 <= p) ? taylor[side][bubble][j + 1] : 0.0;
            }
            Eigen::VectorXd s;
            if (detail::condition_number(w) <= 1e12) {
                s = w.fullPivLu().solve(r);
            } else {
                out.least_squares_fallback = true;
                const int ns = 4 * n;
                Eigen::MatrixXd a(ns, n);
                Eigen::VectorXd rhs(ns);
                std::vector<double> q(n);
                for (int k = 0; k < ns; ++k) {
                    const double x = (side == 0) ? alpha_hat * (k + 1.0) / (ns + 1.0)
                                                 : alpha_hat + (1.0 - alpha_hat) * (k + 1.0) / (ns + 1.0);
                    basis.values(x, q);
                    const double psi = (side == 0) ? x : x - 1.0;
                    for (int l = 0; l <= p; ++l) {
                        a(k, l) = psi * q[l];
                    }
                    rhs(k) = q[bubble];
                }
                s = a.colPivHouseholderQr().solve(rhs);
            }
            if (!s.allFinite()) {
                throw Error(ErrorCode::SingularSystem, "bubble dependence system is singular");
            }
            const double m = (side == 0) ? m1 : m2;
            coeffs[side].resize(n);
            for (int l = 0; l <= p; ++l) {
                coeffs[side][l] = s(l) / m;
            }
        }
        out.coefficients.push_back(std::move(coeffs));
    }

    const EnrichmentFn psi0 = EnrichmentFn::one_sided_left(0.0, 1.0, alpha_hat);
    const EnrichmentFn psi1 = EnrichmentFn::one_sided_right(0.0, 1.0, alpha_hat);
    std::vector<double> q(n);
    for (int k = 0; k < 200; ++k) {
        const double x = k / 199.0;
        basis.values(x, q);
        const double e0 = eval_enrichment(psi0, x).value;
        const double e1 = eval_enrichment(psi1, x).value;
        for (int bubble = 1; bubble < p; ++bubble) {
            const auto& c = out.coefficients[bubble - 1];
            double sum = 0.0;
            for (int l = 0; l <= p; ++l) {
                sum += (c[0][l] * e0 + c[1][l] * e1) * q[l];
            }
            out.residual = std::max(out.residual, std::abs(q[bubble] - sum));
        }
    }
    return out;
}

/// Unique coefficients zeta_j (j = 0..3p+2, bubble slots 1..p-1 unused and zero)
/// such that zeta_0 q_0 + zeta_p q_p + sum_j zeta_{j+p+1} q_j psi_0 + sum_j zeta_{j+2p+2} q_j psi_1
/// equals u1 on [0, alpha_hat) and u2 on (alpha_hat, 1], with the Slopes convention.
///
/// u1 is given by monomial coefficients in x, u2 by monomial coefficients in (x-1).
inline std::vector<double> represent_piecewise(int p, double alpha_hat, std::span<const double> u1,
                                               std::span<const double> u2)
{
    require(alpha_hat > 0.0 && alpha_hat < 1.0, ErrorCode::InvalidArgument, "alpha_hat must lie in (0,1)");
    require(static_cast<int>(u1.size()) == p + 1 && static_cast<int>(u2.size()) == p + 1,
            ErrorCode::DimensionMismatch, "piece coefficient vectors must have length p+1");
    const LagrangeBasis basis(p);
    const int nu = 2 * p + 4;
    // Unknown ordering: [zeta_0, zeta_p, zeta_{p+1..2p+1}, zeta_{2p+2..3p+2}].
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(nu, nu);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nu);
    for (int side = 0; side < 2; ++side) {
        const double t = (side == 0) ? 0.0 : 1.0;
        std::vector<std::vector<double>> tay;
        for (int i = 0; i <= p; ++i) {
            tay.push_back(basis.taylor(i, t));
        }
        const int row0 = side * (p + 2);
        const int col_enr = 2 + side * (p + 1);
        // leading coefficient (power p+1) must vanish
        for (int i = 0; i <= p; ++i) {
            a(row0, col_enr + i) = tay[i][p];
        }
        for (int l = 0; l <= p; ++l) {
            const int row = row0 + 1 + l;
            a(row, 0) = tay[0][l];
            a(row, 1) = tay[p][l];
            if (l >= 1) {
                for (int i = 0; i <= p; ++i) {
                    a(row, col_enr + i) = tay[i][l - 1];
                }
            }
            rhs(row) = (side == 0) ? u1[l] : u2[l];
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
        throw Error(ErrorCode::SingularSystem, "piecewise representation system is singular");
    }
    const Eigen::VectorXd z = lu.solve(rhs);
    const double m1 = 1.0 / alpha_hat;
    const double m2 = 1.0 / (alpha_hat - 1.0);
    std::vector<double> zeta(3 * p + 3, 0.0);
    zeta[0] = z(0);
    zeta[p] = z(1);
    for (int i = 0; i <= p; ++i) {
        zeta[p + 1 + i] = z(2 + i) / m1;
        zeta[2 * p + 2 + i] = z(2 + p + 1 + i) / m2;
    }
    return zeta;
}

/// Evaluates the reference-element combination described by represent_piecewise.
inline double reconstruct_piecewise(int p, double alpha_hat, std::span<const double> zeta, double x,
                                    Side side = Side::Left)
{
    const LagrangeBasis basis(p);
    std::vector<double> q(p + 1);
    basis.values(x, q);
    const double e0 = eval_enrichment(EnrichmentFn::one_sided_left(0.0, 1.0, alpha_hat), x, side).value;
    const double e1 = eval_enrichment(EnrichmentFn::one_sided_right(0.0, 1.0, alpha_hat), x, side).value;
    double sum = zeta[0] * q[0] + zeta[p] * q[p];
    for (int i = 0; i <= p; ++i) {
        sum += zeta[p + 1 + i] * q[i] * e0 + zeta[2 * p + 2 + i] * q[i] * e1;
    }
    return sum;
}

} // namespace egfem
