#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "polewarp/errors.hpp"
#include "polewarp/precision.hpp"

namespace polewarp {

/// Dense row-major matrix over double or HPReal.
template <class T>
class Matrix {
public:
    Matrix() : rows_(0), cols_(0) {}
    Matrix(int rows, int cols, const T& fill = T())
        : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, fill) {}

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    T& operator()(int r, int c) { return data_[static_cast<size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return data_[static_cast<size_t>(r) * cols_ + c]; }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

private:
    int rows_;
    int cols_;
    std::vector<T> data_;
};

namespace detail {
inline double mag(double x) { return std::abs(x); }
inline HPReal mag(const HPReal& x) { return abs(x); }
}  // namespace detail

/// LU factorization with partial pivoting. Throws SingularMatrixError
/// when a pivot column is exactly zero (or below `pivot_floor` relative
/// to the largest pivot seen so far).
template <class T>
class LUDecomposition {
public:
    explicit LUDecomposition(Matrix<T> a) : lu_(std::move(a)), perm_(lu_.rows()) {
        const int n = lu_.rows();
        if (n != lu_.cols()) throw SingularMatrixError("LU requires a square matrix");
        for (int i = 0; i < n; ++i) perm_[i] = i;
        for (int col = 0; col < n; ++col) {
            int piv = col;
            auto best = detail::mag(lu_(col, col));
            for (int r = col + 1; r < n; ++r) {
                auto m = detail::mag(lu_(r, col));
                if (m > best) {
                    best = m;
                    piv = r;
                }
            }
            if (is_zero_pivot(best)) throw SingularMatrixError("zero pivot in column " + std::to_string(col));
            if (piv != col) {
                for (int c = 0; c < n; ++c) std::swap(lu_(piv, c), lu_(col, c));
                std::swap(perm_[piv], perm_[col]);
                parity_ = -parity_;
            }
            for (int r = col + 1; r < n; ++r) {
                T f = lu_(r, col) / lu_(col, col);
                lu_(r, col) = f;
                for (int c = col + 1; c < n; ++c) lu_(r, c) = lu_(r, c) - f * lu_(col, c);
            }
        }
    }

    std::vector<T> solve(std::span<const T> b) const {
        const int n = lu_.rows();
        std::vector<T> x(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = b[static_cast<size_t>(perm_[i])];
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) x[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - lu_(i, j) * x[static_cast<size_t>(j)];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) x[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] - lu_(i, j) * x[static_cast<size_t>(j)];
            x[static_cast<size_t>(i)] = x[static_cast<size_t>(i)] / lu_(i, i);
        }
        return x;
    }

    /// Smallest |pivot| over the diagonal, a cheap conditioning hint.
    auto min_pivot() const {
        auto m = detail::mag(lu_(0, 0));
        for (int i = 1; i < lu_.rows(); ++i) {
            auto p = detail::mag(lu_(i, i));
            if (p < m) m = p;
        }
        return m;
    }

private:
    static bool is_zero_pivot(double m) { return m == 0.0; }
    static bool is_zero_pivot(const HPReal& m) { return m.is_zero(); }

    Matrix<T> lu_;
    std::vector<int> perm_;
    int parity_ = 1;
};

template <class T>
std::vector<T> lu_solve(Matrix<T> a, std::span<const T> b) {
    return LUDecomposition<T>(std::move(a)).solve(b);
}

}  // namespace polewarp
