#pragma once

// Small dense real matrices and column vectors, row-major storage.
// Everything in this library is tiny (n <= 8 or so); clarity over blocking.

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace petreg {

using Real = double;
using Index = int;

/// Incompatible shapes passed to a linear-algebra operation.
struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Non-finite values where finite input is required.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A solver failed (singular system, residual out of tolerance, ...).
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Integration blew up: carries the time at which it happened (NaN when the
/// failing evaluation had no time context).
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, double at_time)
        : std::runtime_error(what), time(at_time) {}
    double time;
};

class ColVec {
public:
    ColVec() = default;
    explicit ColVec(Index dim, Real fill = 0.0) : v_(static_cast<std::size_t>(dim), fill) {
        if (dim < 0) throw DimensionError("ColVec: negative dimension");
    }
    ColVec(std::initializer_list<Real> xs) : v_(xs) {}

    [[nodiscard]] Index dim() const { return static_cast<Index>(v_.size()); }
    Real& operator()(Index i) { return v_[static_cast<std::size_t>(i)]; }
    Real operator()(Index i) const { return v_[static_cast<std::size_t>(i)]; }
    [[nodiscard]] const std::vector<Real>& data() const { return v_; }
    [[nodiscard]] std::vector<Real>& data() { return v_; }

    ColVec& operator+=(const ColVec& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    ColVec& operator-=(const ColVec& o) {
        check_same(o);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    ColVec& operator*=(Real s) {
        for (auto& x : v_) x *= s;
        return *this;
    }

    friend ColVec operator+(ColVec a, const ColVec& b) { return a += b; }
    friend ColVec operator-(ColVec a, const ColVec& b) { return a -= b; }
    friend ColVec operator*(ColVec a, Real s) { return a *= s; }
    friend ColVec operator*(Real s, ColVec a) { return a *= s; }

    [[nodiscard]] Real norm() const {
        Real s = 0;
        for (Real x : v_) s += x * x;
        return std::sqrt(s);
    }
    [[nodiscard]] Real dot(const ColVec& o) const {
        check_same(o);
        Real s = 0;
        for (std::size_t i = 0; i < v_.size(); ++i) s += v_[i] * o.v_[i];
        return s;
    }
    [[nodiscard]] bool all_finite() const {
        for (Real x : v_)
            if (!std::isfinite(x)) return false;
        return true;
    }

private:
    void check_same(const ColVec& o) const {
        if (o.dim() != dim()) throw DimensionError("ColVec: dimension mismatch");
    }
    std::vector<Real> v_;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(Index rows, Index cols, Real fill = 0.0)
        : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), fill) {
        if (rows < 0 || cols < 0) throw DimensionError("Matrix: negative dimension");
    }
    Matrix(std::initializer_list<std::initializer_list<Real>> rows) {
        rows_ = static_cast<Index>(rows.size());
        cols_ = rows_ > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
        a_.reserve(static_cast<std::size_t>(rows_ * cols_));
        for (const auto& r : rows) {
            if (static_cast<Index>(r.size()) != cols_)
                throw DimensionError("Matrix: ragged initializer");
            a_.insert(a_.end(), r.begin(), r.end());
        }
    }

    static Matrix identity(Index n) {
        Matrix m(n, n);
        for (Index i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    [[nodiscard]] Index rows() const { return rows_; }
    [[nodiscard]] Index cols() const { return cols_; }
    [[nodiscard]] bool square() const { return rows_ == cols_; }

    Real& operator()(Index i, Index j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
    Real operator()(Index i, Index j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

    Matrix& operator+=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same(o);
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
        return *this;
    }
    Matrix& operator*=(Real s) {
        for (auto& x : a_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, Real s) { return a *= s; }
    friend Matrix operator*(Real s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DimensionError("Matrix: product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (Index i = 0; i < a.rows_; ++i)
            for (Index k = 0; k < a.cols_; ++k) {
                const Real aik = a(i, k);
                if (aik == 0.0) continue;
                for (Index j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend ColVec operator*(const Matrix& a, const ColVec& x) {
        if (a.cols_ != x.dim()) throw DimensionError("Matrix: mat-vec shape mismatch");
        ColVec y(a.rows_);
        for (Index i = 0; i < a.rows_; ++i) {
            Real s = 0;
            for (Index j = 0; j < a.cols_; ++j) s += a(i, j) * x(j);
            y(i) = s;
        }
        return y;
    }

    [[nodiscard]] Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (Index i = 0; i < rows_; ++i)
            for (Index j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    [[nodiscard]] Real frobenius_norm() const {
        Real s = 0;
        for (Real x : a_) s += x * x;
        return std::sqrt(s);
    }
    [[nodiscard]] Real max_abs() const {
        Real m = 0;
        for (Real x : a_) m = std::max(m, std::abs(x));
        return m;
    }
    [[nodiscard]] bool all_finite() const {
        for (Real x : a_)
            if (!std::isfinite(x)) return false;
        return true;
    }

private:
    void check_same(const Matrix& o) const {
        if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionError("Matrix: shape mismatch");
    }
    Index rows_ = 0, cols_ = 0;
    std::vector<Real> a_;
};

/// Solve A x = b by LU with partial pivoting. Throws NumericError on (near-)singular A.
inline ColVec lu_solve(Matrix a, ColVec b) {
    if (!a.square()) throw DimensionError("lu_solve: A must be square");
    const Index n = a.rows();
    if (b.dim() != n) throw DimensionError("lu_solve: rhs dimension mismatch");
    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (std::abs(a(piv, k)) < 1e-300) throw NumericError("lu_solve: singular system");
        if (piv != k) {
            for (Index j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(b(k), b(piv));
        }
        for (Index i = k + 1; i < n; ++i) {
            const Real f = a(i, k) / a(k, k);
            a(i, k) = 0;
            for (Index j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
            b(i) -= f * b(k);
        }
    }
    ColVec x(n);
    for (Index i = n - 1; i >= 0; --i) {
        Real s = b(i);
        for (Index j = i + 1; j < n; ++j) s -= a(i, j) * x(j);
        x(i) = s / a(i, i);
    }
    return x;
}

/// Determinant via LU (small matrices only).
inline Real determinant(Matrix a) {
    if (!a.square()) throw DimensionError("determinant: square input required");
    const Index n = a.rows();
    Real det = 1.0;
    for (Index k = 0; k < n; ++k) {
        Index piv = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
        if (a(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (Index j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        det *= a(k, k);
        for (Index i = k + 1; i < n; ++i) {
            const Real f = a(i, k) / a(k, k);
            for (Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return det;
}

inline Matrix inverse(const Matrix& a) {
    if (!a.square()) throw DimensionError("inverse: square input required");
    const Index n = a.rows();
    Matrix inv(n, n);
    for (Index c = 0; c < n; ++c) {
        ColVec e(n);
        e(c) = 1.0;
        ColVec col = lu_solve(a, e);
        for (Index r = 0; r < n; ++r) inv(r, c) = col(r);
    }
    return inv;
}

}  // namespace petreg
