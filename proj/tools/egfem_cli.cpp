#include "egfem/egfem.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

using namespace egfem;

namespace {

void print_report(const std::string& id, const SolveReport& r)
{
    std::printf("problem %s  p=%d  N=%d  h=%.5e  dof=%d\n", id.c_str(), r.p, r.n_elems, r.h, r.dof);
    std::printf("  l2 %.5e  h1 %.5e  nodal %.5e\n", r.l2, r.h1, r.nodal);
    if (r.scn) {
        std::printf("  scn %.5e%s\n", *r.scn, is_2d(id) || !make_problem(id).convective ? "" : " (symmetric part)");
    }
    std::printf("  iterations %d  seconds %.3f\n", r.iterations, r.seconds);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"High-order enriched finite elements for elliptic interface problems"};
    app.require_subcommand(1);
    std::vector<std::string> overrides;
    app.add_option("--set", overrides, "Parameter override key=value (repeatable)")->take_all();

    std::string problem = "p41";
    int order = 1;
    int elements = 8;
    std::string out;
    auto* solve = app.add_subcommand("solve", "Solve one problem at one mesh level");
    solve->add_option("--problem", problem, "p41, p42, wall1, wall2 or wall3")->required();
    solve->add_option("--p", order, "Polynomial order")->required();
    solve->add_option("--n", elements, "Number of elements per direction")->required();
    solve->add_option("--out", out, "Write a one-row CSV here");

    std::vector<int> orders;
    std::vector<int> levels;
    bool no_scn = false;
    auto* conv = app.add_subcommand("convergence", "Run a convergence sweep and write CSV");
    conv->add_option("--problem", problem)->required();
    conv->add_option("--p", orders, "Orders, comma separated")->required()->delimiter(',');
    conv->add_option("--levels", levels, "Element counts, comma separated")->required()->delimiter(',');
    conv->add_option("--out", out, "CSV path (stdout if omitted)");
    conv->add_flag("--no-scn", no_scn, "Skip condition numbers");

    auto* scn_cmd = app.add_subcommand("scn", "Scaled condition number of the system");
    scn_cmd->add_option("--problem", problem)->required();
    scn_cmd->add_option("--p", order)->required();
    scn_cmd->add_option("--n", elements)->required();

    std::string suite = "all";
    auto* ver = app.add_subcommand("verify", "Run structural verification suites");
    ver->add_option("--suite", suite, "lemmas, appendix, greens or all")->required();
    ver->add_option("--p", order, "Order for the appendix suite");

    CLI11_PARSE(app, argc, argv);

    try {
        Settings settings;
        for (const auto& o : overrides) {
            settings.set(o);
        }
        if (*solve) {
            const SolveReport r = solve_report(problem, order, elements, settings, true);
            print_report(problem, r);
            if (!out.empty()) {
                RateTable t;
                t.rows.push_back({r, {}, {}, {}});
                emit_csv(t, out);
            }
            return 0;
        }
        if (*conv) {
            const RateTable t = run_convergence(problem, orders, levels, settings, !no_scn);
            if (out.empty()) {
                std::cout << to_csv(t);
            } else {
                emit_csv(t, out);
                std::printf("wrote %zu rows to %s\n", t.rows.size(), out.c_str());
            }
            return 0;
        }
        if (*scn_cmd) {
            const SolveReport r = solve_report(problem, order, elements, settings, true);
            if (!r.scn) {
                std::printf("scn unavailable (system too large for the dense 2D estimate or indefinite)\n");
                return 1;
            }
            std::printf("%.6e\n", *r.scn);
            return 0;
        }
        if (*ver) {
            const VerifyReport rep = verify(suite, order, settings);
            for (const auto& c : rep.checks) {
                std::printf("%s %s  %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
            }
            return rep.all_passed() ? 0 : 1;
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
