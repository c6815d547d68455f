#pragma once

#include <optional>

namespace egfem {

/// One solve at one mesh level.
struct SolveReport {
    int p{1};
    int n_elems{0};
    double h{0.0};
    int dof{0};
    double l2{0.0};
    double h1{0.0};
    double nodal{0.0};
    std::optional<double> scn; // absent when not computed
    int iterations{0};
    double seconds{0.0};
};

} // namespace egfem
