#pragma once

#include "egfem/error.hpp"
#include "egfem/sparse.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace egfem {

enum class SolveMethod { Pcg, Direct };

inline std::string_view to_string(SolveMethod m)
{
    return m == SolveMethod::Pcg ? "pcg" : "direct";
}

struct SolveStats {
    int iterations{0};
    double relative_residual{0.0};
    SolveMethod method{SolveMethod::Pcg};
};

struct SolveResult {
    std::vector<double> x;
    SolveStats stats;
};

namespace detail {

inline std::string format_g(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

} // namespace detail

/// Conjugate gradients preconditioned by the diagonal `diag`, for any SPD operator
/// given as y = A x. Stops on ||b - A x||_2 <= tol ||b||_2.
template <typename Apply>
SolveResult pcg(Apply&& apply, std::span<const double> diag, std::span<const double> b, double tol, int maxit)
{
    const std::size_t n = b.size();
    require(diag.size() == n, ErrorCode::DimensionMismatch, "preconditioner size mismatch");
    for (double d : diag) {
        if (!(d > 0.0)) {
            throw Error(ErrorCode::NonpositiveDiagonal, "diagonal preconditioner needs positive entries");
        }
    }
    SolveResult out;
    out.stats.method = SolveMethod::Pcg;
    out.x.assign(n, 0.0);
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        return out;
    }
    std::vector<double> r(b.begin(), b.end());
    std::vector<double> z(n);
    std::vector<double> p(n);
    std::vector<double> ap(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = r[i] / diag[i];
    }
    p = z;
    double rz = dot(r, z);
    double rel = 1.0;
    double best_true = std::numeric_limits<double>::infinity();
    int stalled = 0;
    for (int it = 1; it <= maxit; ++it) {
        apply(std::span<const double>(p), std::span<double>(ap));
        const double alpha = rz / dot(p, ap);
        for (std::size_t i = 0; i < n; ++i) {
            out.x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = norm2(r) / bnorm;
        out.stats.iterations = it;
        if (rel <= tol) {
            // confirm against the true residual; recurrence drift can fake convergence
            apply(std::span<const double>(out.x), std::span<double>(ap));
            for (std::size_t i = 0; i < n; ++i) {
                r[i] = b[i] - ap[i];
            }
            rel = norm2(r) / bnorm;
            if (rel <= tol) {
                out.stats.relative_residual = rel;
                return out;
            }
            // restart from the true residual, unless restarts no longer help
            stalled = rel < 0.5 * best_true ? 0 : stalled + 1;
            best_true = std::min(best_true, rel);
            if (stalled >= 3) {
                throw Error(ErrorCode::MaxIterations, "pcg stagnated at relative residual " + detail::format_g(rel) +
                                                          " above tolerance " + detail::format_g(tol));
            }
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = r[i] / diag[i];
            }
            p = z;
            rz = dot(r, z);
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = r[i] / diag[i];
        }
        const double rz_new = dot(r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = z[i] + beta * p[i];
        }
    }
    throw Error(ErrorCode::MaxIterations,
                "pcg stopped after " + std::to_string(maxit) + " iterations at relative residual " + detail::format_g(rel));
}

inline SolveResult pcg(const SparseMatrix& a, std::span<const double> b, double tol = 1e-12, int maxit = -1)
{
    require(a.rows() == a.cols() && a.rows() == static_cast<int>(b.size()), ErrorCode::DimensionMismatch,
            "pcg: system shape mismatch");
    if (maxit < 0) {
        maxit = std::max(1000, 10 * a.rows());
    }
    const auto diag = a.diagonal();
    return pcg([&a](std::span<const double> x, std::span<double> y) { a.multiply(x, y); }, diag, b, tol, maxit);
}

/// Sparse LU solve for general (e.g. convective, nonsymmetric) systems.
inline SolveResult direct_solve(const SparseMatrix& a, std::span<const double> b)
{
    require(a.rows() == a.cols() && a.rows() == static_cast<int>(b.size()), ErrorCode::DimensionMismatch,
            "direct_solve: system shape mismatch");
    Eigen::SparseMatrix<double> m = a.to_eigen();
    m.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (lu.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularMatrix, "sparse LU factorization failed");
    }
    const Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd x = lu.solve(rhs);
    SolveResult out;
    out.stats.method = SolveMethod::Direct;
    out.x.assign(x.data(), x.data() + x.size());
    const auto ax = a * out.x;
    double res = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        res = std::max(res, std::abs(b[i] - ax[i]));
    }
    const double bn = norm_inf(b);
    out.stats.relative_residual = bn > 0.0 ? res / bn : res;
    if (!x.allFinite() || out.stats.relative_residual > 1e-10) {
        throw Error(ErrorCode::SingularMatrix,
                    "direct solve residual " + std::to_string(out.stats.relative_residual) + " exceeds 1e-10");
    }
    return out;
}

struct ScnResult {
    double value{1.0}; // lambda_max / lambda_min of D^{-1/2} A D^{-1/2}
    double lambda_min{1.0};
    double lambda_max{1.0};
    bool indefinite{false};
};

inline constexpr int dense_scn_limit = 2000;

namespace detail {

// Largest Ritz value of a symmetric operator by Lanczos with full reorthogonalization.
template <typename Apply>
double lanczos_largest(Apply&& apply, int n, int max_steps = 400, double rtol = 1e-12)
{
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> dist(0.5, 1.5);
    std::vector<std::vector<double>> basis;
    std::vector<double> v(n);
    for (double& x : v) {
        x = dist(rng);
    }
    double nv = norm2(v);
    for (double& x : v) {
        x /= nv;
    }
    std::vector<double> alpha;
    std::vector<double> beta;
    std::vector<double> w(n);
    double previous = 0.0;
    double ritz = 0.0;
    const int steps = std::min(n, max_steps);
    for (int k = 0; k < steps; ++k) {
        basis.push_back(v);
        apply(std::span<const double>(v), std::span<double>(w));
        const double a = dot(w, v);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                const double c = dot(w, q);
                for (int i = 0; i < n; ++i) {
                    w[i] -= c * q[i];
                }
            }
        }
        const double b = norm2(w);
        const bool last = (k + 1 == steps) || b <= 1e-14 * std::abs(a);
        if (k % 5 != 4 && !last) {
            beta.push_back(b);
            for (int i = 0; i < n; ++i) {
                v[i] = w[i] / b;
            }
            continue;
        }
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k + 1, k + 1);
        for (int i = 0; i <= k; ++i) {
            t(i, i) = alpha[i];
            if (i < k) {
                t(i, i + 1) = beta[i];
                t(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
        ritz = es.eigenvalues()(k);
        if (last || b <= 1e-14 * std::abs(ritz) || (k > 5 && std::abs(ritz - previous) <= rtol * std::abs(ritz))) {
            break;
        }
        previous = ritz;
        beta.push_back(b);
        for (int i = 0; i < n; ++i) {
            v[i] = w[i] / b;
        }
    }
    return ritz;
}

} // namespace detail

/// Scaled condition number kappa_2(D^{-1/2} A D^{-1/2}) of a symmetric matrix.
/// Dense eigenvalues below dense_scn_limit, Lanczos (direct and shift-inverted) above.
inline ScnResult scn(const SparseMatrix& a)
{
    require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "scn needs a square matrix");
    const int n = a.rows();
    ScnResult out;
    if (n == 0) {
        return out;
    }
    const auto d = a.diagonal();
    for (double x : d) {
        if (!(x > 0.0)) {
            out.indefinite = true;
            out.lambda_min = x;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
    }
    std::vector<double> s(n);
    for (int i = 0; i < n; ++i) {
        s[i] = 1.0 / std::sqrt(d[i]);
    }
    std::vector<Triplet> t = a.triplets();
    for (auto& e : t) {
        e.value *= s[e.row] * s[e.col];
    }
    const SparseMatrix scaled(n, n, std::move(t));

    if (n < dense_scn_limit) {
        Eigen::MatrixXd m = scaled.to_dense();
        m = 0.5 * (m + m.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        out.lambda_min = es.eigenvalues()(0);
        out.lambda_max = es.eigenvalues()(n - 1);
    } else {
        auto apply = [&scaled](std::span<const double> x, std::span<double> y) { scaled.multiply(x, y); };
        out.lambda_max = detail::lanczos_largest(apply, n);
        Eigen::SparseMatrix<double> m = scaled.to_eigen();
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(m);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) {
            auto neg = [&scaled](std::span<const double> x, std::span<double> y) {
                scaled.multiply(x, y);
                for (double& v : y) {
                    v = -v;
                }
            };
            out.lambda_min = -detail::lanczos_largest(neg, n);
        } else {
            auto inverse = [&ldlt](std::span<const double> x, std::span<double> y) {
                const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
                Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())) = ldlt.solve(xv);
            };
            out.lambda_min = 1.0 / detail::lanczos_largest(inverse, n);
        }
    }
    if (out.lambda_min <= 0.0) {
        out.indefinite = true;
        out.value = std::numeric_limits<double>::infinity();
    } else {
        out.value = out.lambda_max / out.lambda_min;
    }
    return out;
}

} // namespace egfem
