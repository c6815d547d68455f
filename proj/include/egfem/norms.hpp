#pragma once

#include "egfem/problem.hpp"
#include "egfem/space.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace egfem {

struct ErrorNorms {
    double l2{0.0};
    double h1{0.0}; // full broken H1 norm
    double nodal{0.0};
};

/// L2, broken H1 and max interior-breakpoint errors of u_h against exact u.
inline ErrorNorms error_norms(const EnrichedSpace& space, std::span<const double> coeffs, const PiecewiseField* exact,
                              int n = 12)
{
    if (exact == nullptr || exact->empty()) {
        throw Error(ErrorCode::MissingExact, "error norms need an exact solution");
    }
    require(static_cast<int>(coeffs.size()) == space.total_dofs(), ErrorCode::DimensionMismatch,
            "coefficient vector must span all DOFs");
    ErrorNorms out;
    double l2 = 0.0;
    double semi = 0.0;
    std::vector<double> v;
    std::vector<double> d;
    for (int e = 0; e < space.elements(); ++e) {
        const ElementDofs& el = space.element(e);
        v.resize(el.fns.size());
        d.resize(el.fns.size());
        const QuadRule rule = el.iface >= 0
                                  ? split_rule(el.x0, el.x1, space.mesh().interfaces()[el.iface].alpha, n)
                                  : gauss_rule(n, el.x0, el.x1);
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double x = rule.points[q];
            const Side s = rule.sides[q];
            space.eval_local(e, x, s, v, d);
            double uh = 0.0;
            double duh = 0.0;
            for (std::size_t i = 0; i < el.fns.size(); ++i) {
                uh += coeffs[el.dofs[i]] * v[i];
                duh += coeffs[el.dofs[i]] * d[i];
            }
            const Jet u = exact->jet(x, s);
            l2 += rule.weights[q] * (u.value - uh) * (u.value - uh);
            semi += rule.weights[q] * (u.d1 - duh) * (u.d1 - duh);
        }
    }
    out.l2 = std::sqrt(l2);
    out.h1 = std::sqrt(l2 + semi);
    const auto x = space.mesh().breakpoints();
    for (std::size_t i = 1; i + 1 < x.size(); ++i) {
        out.nodal = std::max(out.nodal, std::abs((*exact)(x[i]) - space.eval(coeffs, x[i])));
    }
    return out;
}

inline ErrorNorms error_norms(const EnrichedSpace& space, std::span<const double> coeffs, const PiecewiseField& exact,
                              int n = 12)
{
    return error_norms(space, coeffs, &exact, n);
}

} // namespace egfem
