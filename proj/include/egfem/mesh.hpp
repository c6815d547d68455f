#pragma once

#include "egfem/error.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace egfem {

struct Interface {
    double alpha;
    int element; // x_element < alpha < x_{element+1}
};

/// Ordered breakpoints x_0 < ... < x_N with interface points strictly inside elements,
/// at most one per element.
class Mesh1D {
public:
    Mesh1D(std::vector<double> breakpoints, std::span<const double> interfaces) : x_(std::move(breakpoints))
    {
        require(x_.size() >= 3, ErrorCode::InvalidArgument, "mesh needs at least two elements");
        for (std::size_t i = 1; i < x_.size(); ++i) {
            require(x_[i] > x_[i - 1], ErrorCode::InvalidArgument, "breakpoints must be strictly increasing");
        }
        const double length = x_.back() - x_.front();
        for (double alpha : interfaces) {
            require(alpha > x_.front() && alpha < x_.back(), ErrorCode::InvalidArgument,
                    "interface " + std::to_string(alpha) + " outside the domain");
            for (double xi : x_) {
                require(std::abs(alpha - xi) >= 1e-14 * length, ErrorCode::InterfaceOnNode,
                        "interface " + std::to_string(alpha) + " coincides with a breakpoint");
            }
            const auto it = std::upper_bound(x_.begin(), x_.end(), alpha);
            const int element = static_cast<int>(it - x_.begin()) - 1;
            for (const auto& other : interfaces_) {
                require(other.element != element, ErrorCode::TwoInterfacesOneElement,
                        "two interfaces in element " + std::to_string(element));
            }
            interfaces_.push_back({alpha, element});
        }
        std::sort(interfaces_.begin(), interfaces_.end(),
                  [](const Interface& a, const Interface& b) { return a.alpha < b.alpha; });
    }

    [[nodiscard]] std::span<const double> breakpoints() const { return x_; }
    [[nodiscard]] std::span<const Interface> interfaces() const { return interfaces_; }
    [[nodiscard]] int elements() const { return static_cast<int>(x_.size()) - 1; }
    [[nodiscard]] double a() const { return x_.front(); }
    [[nodiscard]] double b() const { return x_.back(); }
    [[nodiscard]] double h(int i) const { return x_[i + 1] - x_[i]; }

    [[nodiscard]] double max_h() const
    {
        double m = 0.0;
        for (int i = 0; i < elements(); ++i) {
            m = std::max(m, h(i));
        }
        return m;
    }

    /// Interface index living in element e, or -1.
    [[nodiscard]] int interface_in(int e) const
    {
        for (std::size_t j = 0; j < interfaces_.size(); ++j) {
            if (interfaces_[j].element == e) {
                return static_cast<int>(j);
            }
        }
        return -1;
    }

    /// Element containing x; breakpoints resolve to the element on their right
    /// except at b.
    [[nodiscard]] int locate(double x) const
    {
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const int e = static_cast<int>(it - x_.begin()) - 1;
        return std::clamp(e, 0, elements() - 1);
    }

private:
    std::vector<double> x_;
    std::vector<Interface> interfaces_;
};

/// Uniform partition of [a,b] into n elements with the given interface points located.
inline Mesh1D build_mesh(double a, double b, int n_elements, std::span<const double> interfaces)
{
    require(a < b, ErrorCode::InvalidArgument, "need a < b");
    require(n_elements >= 2, ErrorCode::InvalidArgument, "need at least two elements");
    std::vector<double> x(n_elements + 1);
    for (int i = 0; i <= n_elements; ++i) {
        x[i] = a + (b - a) * static_cast<double>(i) / n_elements;
    }
    x.back() = b;
    return {std::move(x), interfaces};
}

inline Mesh1D build_mesh(double a, double b, int n_elements, std::initializer_list<double> interfaces)
{
    const std::vector<double> v(interfaces);
    return build_mesh(a, b, n_elements, std::span<const double>(v));
}

} // namespace egfem
