// Solve an implicit-jump interface problem, print errors, then run a small sweep.
#include "egfem/egfem.hpp"

#include <cstdio>
#include <iostream>

int main()
{
    using namespace egfem;

    // -(beta u')' = f on (0,1), beta = 100 | 1, [u] = lambda (beta u')(alpha-)
    const ProblemSpec pr = problem_4_1();
    const EnrichedSpace space = make_space(pr, 16, 2);
    const LinearSystem sys = assemble(pr, space);
    const SolveResult sol = solve(sys, 1e-10);
    const std::vector<double> u = sys.expand(sol.x);
    const ErrorNorms e = error_norms(space, u, *pr.exact);

    const double alpha = pr.interfaces[0];
    std::printf("dof %d, pcg iterations %d\n", space.dim(), sol.stats.iterations);
    std::printf("u_h(alpha-) = %.10f  u_h(alpha+) = %.10f\n", space.eval(u, alpha, Side::Left),
                space.eval(u, alpha, Side::Right));
    std::printf("L2 %.3e  H1 %.3e  nodal %.3e\n", e.l2, e.h1, e.nodal);

    const RateTable t = run_convergence("wall3", {2}, {8, 16, 32}, {}, false);
    std::cout << to_csv(t);
    return 0;
}
