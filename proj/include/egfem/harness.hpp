#pragma once

#include "egfem/assembly.hpp"
#include "egfem/basis.hpp"
#include "egfem/error.hpp"
#include "egfem/linalg.hpp"
#include "egfem/norms.hpp"
#include "egfem/problems.hpp"
#include "egfem/report.hpp"
#include "egfem/tensor2d.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace egfem {

/// Problem parameter overrides given as key=value pairs.
struct Settings {
    std::optional<double> beta_minus;
    std::optional<double> beta_plus;
    std::optional<double> alpha;
    std::optional<double> lambda;
    std::optional<int> m;
    std::optional<int> wall_n;
    SlopeConvention convention{SlopeConvention::Slopes};
    double tol{1e-10};

    void set(const std::string& assignment)
    {
        const auto eq = assignment.find('=');
        require(eq != std::string::npos && eq > 0, ErrorCode::InvalidArgument,
                "expected key=value, got '" + assignment + "'");
        const std::string key = assignment.substr(0, eq);
        const std::string value = assignment.substr(eq + 1);
        auto number = [&]() {
            try {
                std::size_t used = 0;
                const double v = std::stod(value, &used);
                require(used == value.size(), ErrorCode::InvalidArgument, "trailing characters");
                return v;
            } catch (const std::logic_error&) {
                throw Error(ErrorCode::InvalidArgument, "value for " + key + " is not a number: '" + value + "'");
            }
        };
        auto integer = [&]() {
            const double v = number();
            require(v == std::floor(v), ErrorCode::InvalidArgument, key + " must be an integer");
            return static_cast<int>(v);
        };
        if (key == "beta_minus") {
            beta_minus = number();
        } else if (key == "beta_plus") {
            beta_plus = number();
        } else if (key == "alpha") {
            alpha = number();
        } else if (key == "lambda") {
            lambda = number();
        } else if (key == "m") {
            m = integer();
        } else if (key == "wall_n") {
            wall_n = integer();
        } else if (key == "tol") {
            tol = number();
            require(tol > 0.0, ErrorCode::InvalidArgument, "tol must be positive");
        } else if (key == "enrichment") {
            if (value == "slopes") {
                convention = SlopeConvention::Slopes;
            } else if (value == "slopesC") {
                convention = SlopeConvention::SlopesC;
            } else {
                throw Error(ErrorCode::InvalidArgument, "enrichment must be slopes or slopesC");
            }
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown setting '" + key + "'");
        }
    }

    [[nodiscard]] Params41 p41() const
    {
        Params41 q;
        q.m = m.value_or(q.m);
        q.beta_minus = beta_minus.value_or(q.beta_minus);
        q.beta_plus = beta_plus.value_or(q.beta_plus);
        q.alpha = alpha.value_or(q.alpha);
        q.lambda = lambda.value_or(q.lambda);
        return q;
    }

    [[nodiscard]] Params42 p42() const
    {
        Params42 q;
        q.beta_minus = beta_minus.value_or(q.beta_minus);
        q.beta_plus = beta_plus.value_or(q.beta_plus);
        q.alpha = alpha.value_or(q.alpha);
        return q;
    }
};

inline const std::vector<std::string>& problem_ids()
{
    static const std::vector<std::string> ids = {"p41", "p42", "wall1", "wall2", "wall3"};
    return ids;
}

inline bool is_2d(const std::string& id) { return id == "p42"; }

inline ProblemSpec make_problem(const std::string& id, const Settings& s = {})
{
    if (id == "p41") {
        return problem_4_1(s.p41());
    }
    if (id == "wall1" || id == "wall2" || id == "wall3") {
        return wall_problem(id.back() - '0', s.wall_n.value_or(4));
    }
    if (id == "p42") {
        throw Error(ErrorCode::InvalidArgument, "p42 is a 2D problem");
    }
    throw Error(ErrorCode::UnknownProblem, "unknown problem '" + id + "'");
}

struct Solution1D {
    std::vector<double> coeffs;
    SolveReport report;
    SolveStats stats;
    double residual{0.0};
};

/// Scaled condition number of the system matrix; nonsymmetric matrices use their
/// symmetric part.
inline ScnResult system_scn(const LinearSystem& sys)
{
    if (sys.symmetric) {
        return scn(sys.A);
    }
    return scn((sys.A + sys.A.transpose()).scaled(0.5));
}

inline Solution1D solve_problem(const ProblemSpec& pr, int p, int n, const Settings& s = {}, bool with_scn = true)
{
    const auto t0 = std::chrono::steady_clock::now();
    const EnrichedSpace space = make_space(pr, n, p, s.convention);
    const LinearSystem sys = assemble(pr, space);
    const SolveResult sol = solve(sys, s.tol);
    Solution1D out;
    out.coeffs = sys.expand(sol.x);
    out.stats = sol.stats;
    out.residual = residual_check(sys, sol.x);
    out.report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.report.p = p;
    out.report.n_elems = n;
    out.report.h = (pr.b - pr.a) / n;
    out.report.dof = space.dim();
    out.report.iterations = sol.stats.iterations;
    if (pr.exact) {
        const ErrorNorms e = error_norms(space, out.coeffs, *pr.exact);
        out.report.l2 = e.l2;
        out.report.h1 = e.h1;
        out.report.nodal = e.nodal;
    }
    if (with_scn) {
        const ScnResult r = system_scn(sys);
        if (!r.indefinite) {
            out.report.scn = r.value;
        }
    }
    return out;
}

inline SolveReport solve_report(const std::string& id, int p, int n, const Settings& s = {}, bool with_scn = true)
{
    if (is_2d(id)) {
        const Problem2D pr = problem_4_2(s.p42());
        const bool small = (p * n + 3) * (p * n) <= 20000;
        return solve_2d(pr, p, n, n, with_scn && small, s.tol).report;
    }
    return solve_problem(make_problem(id, s), p, n, s, with_scn).report;
}

/// Observed rate log(e_coarse/e_fine)/log(h_coarse/h_fine).
inline std::optional<double> observed_rate(double e_coarse, double e_fine, double h_coarse, double h_fine,
                                           double floor = 0.0)
{
    if (!(e_coarse > floor) || !(e_fine > floor) || h_coarse == h_fine) {
        return std::nullopt;
    }
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

struct RateRow {
    SolveReport report;
    std::optional<double> l2_rate;
    std::optional<double> h1_rate;
    std::optional<double> nodal_rate;
};

struct RateTable {
    std::vector<RateRow> rows;

    /// Rows for one order, in table order.
    [[nodiscard]] std::vector<RateRow> for_order(int p) const
    {
        std::vector<RateRow> out;
        for (const auto& r : rows) {
            if (r.report.p == p) {
                out.push_back(r);
            }
        }
        return out;
    }
};

inline constexpr double nodal_rate_floor = 1e-12;

/// Pairwise rates between consecutive rows of the same order.
inline void fill_rates(RateTable& t)
{
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        RateRow& row = t.rows[i];
        row.l2_rate.reset();
        row.h1_rate.reset();
        row.nodal_rate.reset();
        for (std::size_t j = i; j-- > 0;) {
            const SolveReport& prev = t.rows[j].report;
            if (prev.p != row.report.p) {
                continue;
            }
            const SolveReport& cur = row.report;
            row.l2_rate = observed_rate(prev.l2, cur.l2, prev.h, cur.h);
            row.h1_rate = observed_rate(prev.h1, cur.h1, prev.h, cur.h);
            row.nodal_rate = observed_rate(prev.nodal, cur.nodal, prev.h, cur.h, nodal_rate_floor);
            break;
        }
    }
}

inline RateTable run_convergence(const std::string& id, const std::vector<int>& orders, const std::vector<int>& levels,
                                 const Settings& s = {}, bool with_scn = true)
{
    require(!orders.empty() && !levels.empty(), ErrorCode::InvalidArgument, "need at least one order and level");
    RateTable t;
    for (int p : orders) {
        for (int n : levels) {
            t.rows.push_back({solve_report(id, p, n, s, with_scn), {}, {}, {}});
        }
    }
    fill_rates(t);
    return t;
}

inline const char* csv_header = "p,n_elems,h,dof,l2,l2_rate,h1,h1_rate,nodal,nodal_rate,scn,iters,seconds";

namespace detail {

inline std::string sci(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5e", v);
    return buf;
}

inline std::string sci(const std::optional<double>& v) { return v ? sci(*v) : std::string(); }

inline std::optional<double> parse_optional(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    require(used == s.size(), ErrorCode::InvalidArgument, "bad number '" + s + "'");
    return v;
}

} // namespace detail

inline std::string to_csv(const RateTable& t)
{
    std::ostringstream os;
    os << csv_header << '\n';
    for (const auto& row : t.rows) {
        const SolveReport& r = row.report;
        os << r.p << ',' << r.n_elems << ',' << detail::sci(r.h) << ',' << r.dof << ',' << detail::sci(r.l2) << ','
           << detail::sci(row.l2_rate) << ',' << detail::sci(r.h1) << ',' << detail::sci(row.h1_rate) << ','
           << detail::sci(r.nodal) << ',' << detail::sci(row.nodal_rate) << ',' << detail::sci(r.scn) << ','
           << r.iterations << ',' << detail::sci(r.seconds) << '\n';
    }
    return os.str();
}

inline void emit_csv(const RateTable& t, const std::string& path)
{
    require(!t.rows.empty(), ErrorCode::InvalidArgument, "refusing to write an empty table");
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "' for writing");
    }
    out << to_csv(t);
    out.flush();
    if (!out) {
        throw Error(ErrorCode::IoFailure, "failed writing '" + path + "'");
    }
}

inline RateTable parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != csv_header) {
        throw Error(ErrorCode::InvalidArgument, "missing or unexpected CSV header");
    }
    RateTable t;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) {
            f.push_back(cell);
        }
        if (!line.empty() && line.back() == ',') {
            f.emplace_back();
        }
        require(f.size() == 13, ErrorCode::InvalidArgument, "CSV row needs 13 fields: " + line);
        try {
            RateRow row;
            row.report.p = std::stoi(f[0]);
            row.report.n_elems = std::stoi(f[1]);
            row.report.h = std::stod(f[2]);
            row.report.dof = std::stoi(f[3]);
            row.report.l2 = std::stod(f[4]);
            row.l2_rate = detail::parse_optional(f[5]);
            row.report.h1 = std::stod(f[6]);
            row.h1_rate = detail::parse_optional(f[7]);
            row.report.nodal = std::stod(f[8]);
            row.nodal_rate = detail::parse_optional(f[9]);
            row.report.scn = detail::parse_optional(f[10]);
            row.report.iterations = std::stoi(f[11]);
            row.report.seconds = std::stod(f[12]);
            t.rows.push_back(row);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::InvalidArgument, "unparsable CSV row: " + line);
        }
    }
    return t;
}

inline RateTable read_csv(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoFailure, "cannot open '" + path + "'");
    }
    std::ostringstream os;
    os << in.rdbuf();
    return parse_csv(os.str());
}

struct Check {
    std::string name;
    bool passed{false};
    std::string detail;
};

struct VerifyReport {
    std::vector<Check> checks;

    [[nodiscard]] bool all_passed() const
    {
        for (const auto& c : checks) {
            if (!c.passed) {
                return false;
            }
        }
        return !checks.empty();
    }
};

namespace detail {

inline std::string fmt_value(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

inline void add_check(VerifyReport& rep, std::string name, double value, double limit)
{
    rep.checks.push_back({std::move(name), value <= limit, fmt_value(value) + " <= " + fmt_value(limit)});
}

// Horner evaluation of monomial coefficients.
inline double horner(std::span<const double> c, double x)
{
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        v = v * x + c[k];
    }
    return v;
}

} // namespace detail

inline void verify_lemmas(VerifyReport& rep)
{
    const double alphas[] = {0.1, 0.37, 0.5, 0.9};
    for (int p = 2; p <= 4; ++p) {
        for (double ah : alphas) {
            const BubbleDependence bd = bubble_dependence(p, ah);
            detail::add_check(rep, "bubble dependence p=" + std::to_string(p) + " alpha=" + detail::fmt_value(ah),
                              bd.residual, 1e-10);
        }
    }
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    for (int p = 1; p <= 4; ++p) {
        for (double ah : alphas) {
            double worst = 0.0;
            for (int trial = 0; trial < 100; ++trial) {
                std::vector<double> u1(p + 1);
                std::vector<double> u2(p + 1);
                for (auto& c : u1) {
                    c = coef(rng);
                }
                for (auto& c : u2) {
                    c = coef(rng);
                }
                const auto zeta = represent_piecewise(p, ah, u1, u2);
                for (int k = 0; k < 100; ++k) {
                    const double x = (k + 0.5) / 100.0;
                    const bool left = x < ah;
                    const double target = left ? detail::horner(u1, x) : detail::horner(u2, x - 1.0);
                    worst = std::max(worst, std::abs(reconstruct_piecewise(p, ah, zeta, x) - target));
                }
            }
            detail::add_check(rep, "piecewise representation p=" + std::to_string(p) + " alpha=" + detail::fmt_value(ah),
                              worst, 1e-9);
        }
    }
}

/// Largest over smallest interface-block SCN as alpha - x_k sweeps {1e-1..1e-6} h.
inline double interface_block_scn_ratio(const Params41& q, int n = 8)
{
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    const double h = 1.0 / n;
    const int k = static_cast<int>(std::floor(q.alpha * n));
    for (int e = 1; e <= 6; ++e) {
        Params41 r = q;
        r.alpha = k * h + std::pow(10.0, -e) * h;
        const ProblemSpec pr = problem_4_1(r);
        const EnrichedSpace space = make_space(pr, n, 1);
        const LinearSystem sys = assemble(pr, space);
        const ElementDofs& el = space.element(k);
        std::vector<int> block;
        for (int dof : el.dofs) {
            const auto it = std::find(sys.free.begin(), sys.free.end(), dof);
            if (it != sys.free.end()) {
                block.push_back(static_cast<int>(it - sys.free.begin()));
            }
        }
        const double v = scn(sys.A.submatrix(block, block)).value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return hi / lo;
}

inline void verify_appendix(VerifyReport& rep, int p, const Settings& s)
{
    if (p != 1) {
        throw Error(ErrorCode::UnsupportedOrder, "the appendix suite covers p = 1 only");
    }
    const Params41 q = s.p41();
    for (int n : {8, 16, 32}) {
        const Mesh1D mesh = build_mesh(0.0, 1.0, n, {q.alpha});
        double mismatch = 0.0;
        try {
            mismatch = appendix_diag_check(mesh, 1, q.beta_minus, q.beta_plus, q.lambda).max_relative_mismatch;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MismatchBeyondTolerance) {
                throw;
            }
            mismatch = 1.0;
        }
        detail::add_check(rep, "appendix diagonal N=" + std::to_string(n), mismatch, 1e-12);
    }
    detail::add_check(rep, "interface block scn ratio", interface_block_scn_ratio(q), 100.0);
}

inline void verify_greens(VerifyReport& rep, const Settings& s)
{
    const Params41 q = s.p41();
    std::vector<std::pair<double, double>> betas = {{1.0, 1.0}, {100.0, 1.0}};
    if (s.beta_minus || s.beta_plus) {
        betas = {{q.beta_minus, q.beta_plus}};
    }
    for (const auto& [bm, bp] : betas) {
        for (double xi : {0.2, 0.7}) {
            const std::string tag = "beta=" + detail::fmt_value(bm) + "/" + detail::fmt_value(bp) +
                                    " xi=" + detail::fmt_value(xi);
            try {
                const GreenFunction g(xi, bm, bp, q.alpha, q.lambda);
                detail::add_check(rep, "green reproducing " + tag, g.reproducing_defect(), 1e-8);
            } catch (const Error& e) {
                rep.checks.push_back({"green reproducing " + tag, false, e.what()});
            }
        }
        if (bm == bp) {
            for (double xi : {0.2, 0.7}) {
                const GreenFunction g(xi, bm, bp, q.alpha, 0.0);
                const double classical = xi * (1.0 - xi) / bm;
                detail::add_check(rep, "green classical xi=" + detail::fmt_value(xi), std::abs(g(xi) - classical),
                                  1e-14);
            }
        }
    }
}

inline VerifyReport verify(const std::string& suite, int p = 1, const Settings& s = {})
{
    VerifyReport rep;
    if (suite == "lemmas" || suite == "all") {
        verify_lemmas(rep);
    }
    if (suite == "appendix" || suite == "all") {
        verify_appendix(rep, p, s);
    }
    if (suite == "greens" || suite == "all") {
        verify_greens(rep, s);
    }
    if (rep.checks.empty()) {
        throw Error(ErrorCode::InvalidArgument, "unknown verify suite '" + suite + "'");
    }
    return rep;
}

} // namespace egfem
