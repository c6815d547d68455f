#pragma once

#include "egfem/error.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <span>
#include <tuple>
#include <vector>

namespace egfem {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Square or rectangular matrix in compressed-row form. Column indices are
/// sorted and unique within each row; exact zeros are not stored.
class SparseMatrix {
public:
    SparseMatrix() = default;

    SparseMatrix(int rows, int cols, std::vector<Triplet> triplets) : rows_(rows), cols_(cols)
    {
        std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
            return std::tie(a.row, a.col) < std::tie(b.row, b.col);
        });
        row_ptr_.assign(rows_ + 1, 0);
        for (std::size_t k = 0; k < triplets.size();) {
            const int r = triplets[k].row;
            const int c = triplets[k].col;
            require(r >= 0 && r < rows_ && c >= 0 && c < cols_, ErrorCode::DimensionMismatch,
                    "triplet index out of range");
            double v = 0.0;
            while (k < triplets.size() && triplets[k].row == r && triplets[k].col == c) {
                v += triplets[k].value;
                ++k;
            }
            if (v != 0.0) {
                col_idx_.push_back(c);
                values_.push_back(v);
                ++row_ptr_[r + 1];
            }
        }
        for (int r = 0; r < rows_; ++r) {
            row_ptr_[r + 1] += row_ptr_[r];
        }
    }

    static SparseMatrix identity(int n)
    {
        std::vector<Triplet> t;
        for (int i = 0; i < n; ++i) {
            t.push_back({i, i, 1.0});
        }
        return {n, n, std::move(t)};
    }

    static SparseMatrix from_dense(const Eigen::MatrixXd& m)
    {
        std::vector<Triplet> t;
        for (int i = 0; i < m.rows(); ++i) {
            for (int j = 0; j < m.cols(); ++j) {
                if (m(i, j) != 0.0) {
                    t.push_back({i, j, m(i, j)});
                }
            }
        }
        return {static_cast<int>(m.rows()), static_cast<int>(m.cols()), std::move(t)};
    }

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] std::size_t nonzeros() const { return values_.size(); }
    [[nodiscard]] std::span<const int> row_offsets() const { return row_ptr_; }
    [[nodiscard]] std::span<const int> column_indices() const { return col_idx_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    [[nodiscard]] double operator()(int i, int j) const
    {
        const auto begin = col_idx_.begin() + row_ptr_[i];
        const auto end = col_idx_.begin() + row_ptr_[i + 1];
        const auto it = std::lower_bound(begin, end, j);
        if (it != end && *it == j) {
            return values_[static_cast<std::size_t>(it - col_idx_.begin())];
        }
        return 0.0;
    }

    void multiply(std::span<const double> x, std::span<double> y) const
    {
        for (int i = 0; i < rows_; ++i) {
            double sum = 0.0;
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                sum += values_[k] * x[col_idx_[k]];
            }
            y[i] = sum;
        }
    }

    [[nodiscard]] std::vector<double> operator*(std::span<const double> x) const
    {
        require(static_cast<int>(x.size()) == cols_, ErrorCode::DimensionMismatch, "matvec size mismatch");
        std::vector<double> y(rows_);
        multiply(x, y);
        return y;
    }

    [[nodiscard]] std::vector<double> diagonal() const
    {
        std::vector<double> d(std::min(rows_, cols_));
        for (int i = 0; i < static_cast<int>(d.size()); ++i) {
            d[i] = (*this)(i, i);
        }
        return d;
    }

    [[nodiscard]] std::vector<Triplet> triplets() const
    {
        std::vector<Triplet> t;
        t.reserve(values_.size());
        for (int i = 0; i < rows_; ++i) {
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                t.push_back({i, col_idx_[k], values_[k]});
            }
        }
        return t;
    }

    [[nodiscard]] SparseMatrix transpose() const
    {
        auto t = triplets();
        for (auto& e : t) {
            std::swap(e.row, e.col);
        }
        return {cols_, rows_, std::move(t)};
    }

    /// Rows and columns picked by index lists (used for Dirichlet elimination).
    [[nodiscard]] SparseMatrix submatrix(std::span<const int> rows, std::span<const int> cols) const
    {
        std::vector<int> col_map(cols_, -1);
        for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
            col_map[cols[j]] = j;
        }
        std::vector<Triplet> t;
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            const int r = rows[i];
            for (int k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
                if (col_map[col_idx_[k]] >= 0) {
                    t.push_back({i, col_map[col_idx_[k]], values_[k]});
                }
            }
        }
        return {static_cast<int>(rows.size()), static_cast<int>(cols.size()), std::move(t)};
    }

    [[nodiscard]] SparseMatrix scaled(double s) const
    {
        SparseMatrix out = *this;
        for (double& v : out.values_) {
            v *= s;
        }
        return out;
    }

    [[nodiscard]] double max_abs() const
    {
        double m = 0.0;
        for (double v : values_) {
            m = std::max(m, std::abs(v));
        }
        return m;
    }

    /// max |A - A^T|
    [[nodiscard]] double asymmetry() const
    {
        double m = 0.0;
        for (int i = 0; i < rows_; ++i) {
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                m = std::max(m, std::abs(values_[k] - (*this)(col_idx_[k], i)));
            }
        }
        return m;
    }

    [[nodiscard]] Eigen::MatrixXd to_dense() const
    {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows_, cols_);
        for (int i = 0; i < rows_; ++i) {
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                m(i, col_idx_[k]) = values_[k];
            }
        }
        return m;
    }

    [[nodiscard]] Eigen::SparseMatrix<double> to_eigen() const
    {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(values_.size());
        for (int i = 0; i < rows_; ++i) {
            for (int k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                t.emplace_back(i, col_idx_[k], values_[k]);
            }
        }
        Eigen::SparseMatrix<double> m(rows_, cols_);
        m.setFromTriplets(t.begin(), t.end());
        return m;
    }

private:
    int rows_{0};
    int cols_{0};
    std::vector<int> row_ptr_{0};
    std::vector<int> col_idx_;
    std::vector<double> values_;
};

inline SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b)
{
    require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch, "matrix sum shape mismatch");
    auto t = a.triplets();
    auto tb = b.triplets();
    t.insert(t.end(), tb.begin(), tb.end());
    return {a.rows(), a.cols(), std::move(t)};
}

/// Explicit Kronecker product A (x) B.
inline SparseMatrix kronecker(const SparseMatrix& a, const SparseMatrix& b)
{
    std::vector<Triplet> t;
    t.reserve(a.nonzeros() * b.nonzeros());
    for (const auto& ea : a.triplets()) {
        for (const auto& eb : b.triplets()) {
            t.push_back({ea.row * b.rows() + eb.row, ea.col * b.cols() + eb.col, ea.value * eb.value});
        }
    }
    return {a.rows() * b.rows(), a.cols() * b.cols(), std::move(t)};
}

inline double norm_inf(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

inline double norm2(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

} // namespace egfem
