#pragma once

#include "egfem/error.hpp"
#include "egfem/quadrature.hpp"
#include "egfem/space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace egfem {

/// Value and first two derivatives of a smooth piece.
struct Jet {
    double value{0.0};
    double d1{0.0};
    double d2{0.0};
};

/// Closed-form pieces separated by the interface points; evaluation at an
/// interface is one-sided.
class PiecewiseField {
public:
    using Piece = std::function<Jet(double)>;

    PiecewiseField() = default;

    PiecewiseField(std::vector<double> breaks, std::vector<Piece> pieces)
        : breaks_(std::move(breaks)), pieces_(std::move(pieces))
    {
        require(pieces_.size() == breaks_.size() + 1, ErrorCode::DimensionMismatch,
                "a field needs one piece more than it has breaks");
        require(std::is_sorted(breaks_.begin(), breaks_.end()), ErrorCode::InvalidArgument,
                "field breaks must be sorted");
    }

    static PiecewiseField constant(std::vector<double> breaks, std::span<const double> values)
    {
        std::vector<Piece> pieces;
        for (double v : values) {
            pieces.push_back([v](double) { return Jet{v, 0.0, 0.0}; });
        }
        return {std::move(breaks), std::move(pieces)};
    }

    static PiecewiseField uniform(double v)
    {
        return {{}, {[v](double) { return Jet{v, 0.0, 0.0}; }}};
    }

    /// Polynomial pieces given by monomial coefficients in x.
    static PiecewiseField polynomial(std::vector<double> breaks, std::vector<std::vector<double>> coeffs)
    {
        std::vector<Piece> pieces;
        for (auto& c : coeffs) {
            pieces.push_back([c = std::move(c)](double x) {
                Jet j;
                for (std::size_t k = c.size(); k-- > 0;) {
                    j.d2 = j.d2 * x + 2.0 * j.d1;
                    j.d1 = j.d1 * x + j.value;
                    j.value = j.value * x + c[k];
                }
                return j;
            });
        }
        return {std::move(breaks), std::move(pieces)};
    }

    [[nodiscard]] int piece_index(double x, Side side = Side::Left) const
    {
        int i = 0;
        for (double br : breaks_) {
            if (x > br || (x == br && side == Side::Right)) {
                ++i;
            }
        }
        return i;
    }

    [[nodiscard]] Jet jet(double x, Side side = Side::Left) const { return pieces_[piece_index(x, side)](x); }
    [[nodiscard]] double operator()(double x, Side side = Side::Left) const { return jet(x, side).value; }
    [[nodiscard]] double derivative(double x, Side side = Side::Left) const { return jet(x, side).d1; }
    [[nodiscard]] std::span<const double> breaks() const { return breaks_; }
    [[nodiscard]] int pieces() const { return static_cast<int>(pieces_.size()); }
    [[nodiscard]] bool empty() const { return pieces_.empty(); }

    [[nodiscard]] SidedFunction as_function() const
    {
        return [f = *this](double x, Side s) { return f(x, s); };
    }

private:
    std::vector<double> breaks_;
    std::vector<Piece> pieces_;
};

struct BoundaryCondition {
    enum class Type { Dirichlet, NeumannFlux };

    Type type{Type::Dirichlet};
    double value{0.0}; // u for Dirichlet, q = -D u' + 2 delta u for flux

    static BoundaryCondition dirichlet(double v) { return {Type::Dirichlet, v}; }
    static BoundaryCondition flux(double v) { return {Type::NeumannFlux, v}; }
    [[nodiscard]] bool is_dirichlet() const { return type == Type::Dirichlet; }
};

/// -(D u')' + (2 delta u)' + eta u = f on each piece, flux q = -D u' + 2 delta u,
/// [q] = 0 at every interface, [u] = -lambda q(alpha) on discontinuous ones and
/// [u] = 0 on continuous ones.
struct ProblemSpec {
    std::string name;
    double a{0.0};
    double b{1.0};
    std::vector<double> interfaces;
    std::vector<InterfaceKind> kinds;
    PiecewiseField diffusion;
    PiecewiseField convection;
    PiecewiseField reaction;
    PiecewiseField source;
    BoundaryCondition left;
    BoundaryCondition right;
    bool convective{false};
    std::optional<PiecewiseField> exact;

    [[nodiscard]] double flux(const PiecewiseField& u, double x, Side side) const
    {
        return -diffusion(x, side) * u.derivative(x, side) + 2.0 * convection(x, side) * u(x, side);
    }
};

/// Residuals of an exact solution against its own problem.
struct ExactCheck {
    double strong{0.0};   // max |strong residual| / max(1, max |f|)
    double jump{0.0};     // max jump-law residual over interfaces
    double flux{0.0};     // max |[q]|
    double boundary{0.0}; // max boundary residual
    [[nodiscard]] double worst() const { return std::max({strong, jump, flux, boundary}); }
};

inline ExactCheck check_exact(const ProblemSpec& pr, int samples = 200)
{
    if (!pr.exact) {
        throw Error(ErrorCode::MissingExact, "problem " + pr.name + " has no exact solution");
    }
    const PiecewiseField& u = *pr.exact;
    ExactCheck out;
    double fmax = 1.0;
    for (int i = 0; i <= samples; ++i) {
        const double x = pr.a + (pr.b - pr.a) * (i + 0.5) / (samples + 1.0);
        const Jet uj = u.jet(x);
        const Jet d = pr.diffusion.jet(x);
        const Jet c = pr.convection.jet(x);
        const double lhs = -(d.d1 * uj.d1 + d.value * uj.d2) + 2.0 * (c.d1 * uj.value + c.value * uj.d1) +
                           pr.reaction(x) * uj.value;
        const double f = pr.source(x);
        fmax = std::max(fmax, std::abs(f));
        out.strong = std::max(out.strong, std::abs(lhs - f));
    }
    out.strong /= fmax;
    for (std::size_t j = 0; j < pr.interfaces.size(); ++j) {
        const double al = pr.interfaces[j];
        const double ql = pr.flux(u, al, Side::Left);
        const double qr = pr.flux(u, al, Side::Right);
        const double jump = u(al, Side::Right) - u(al, Side::Left);
        out.flux = std::max(out.flux, std::abs(qr - ql));
        const double law = pr.kinds[j].is_discontinuous() ? jump + pr.kinds[j].lambda * ql : jump;
        out.jump = std::max(out.jump, std::abs(law));
    }
    auto bc = [&](const BoundaryCondition& c, double x, Side s) {
        return c.is_dirichlet() ? std::abs(u(x, s) - c.value) : std::abs(pr.flux(u, x, s) - c.value);
    };
    out.boundary = std::max(bc(pr.left, pr.a, Side::Right), bc(pr.right, pr.b, Side::Left));
    return out;
}

} // namespace egfem
