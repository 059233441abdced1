#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "mixdisc/errors.hpp"

namespace mixdisc {

/// Dense row-major real matrix. Sized at construction; no views, no sparsity.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Matrix& operator+=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }

    Matrix& operator-=(const Matrix& o) {
        require_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw Error("matrix product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    std::vector<double> apply(const std::vector<double>& v) const {
        if (v.size() != cols_) throw Error("matrix-vector shape mismatch");
        std::vector<double> out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

private:
    void require_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw Error("matrix shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Dense real symmetric matrix. Symmetrized once at construction by averaging
/// mirrored entries; every mutation writes both triangles, so
/// entries(i,j) == entries(j,i) holds exactly for the lifetime of the value.
class SymMatrix {
public:
    explicit SymMatrix(std::size_t dim) : m_(dim, dim) {
        if (dim < 1) throw Error("SymMatrix dimension must be >= 1");
    }

    /// Builds from an arbitrary square matrix by averaging a with its transpose.
    static SymMatrix from_dense(const Matrix& a) {
        if (a.rows() != a.cols()) throw Error("SymMatrix requires a square matrix");
        SymMatrix s(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            s.m_(i, i) = a(i, i);
            for (std::size_t j = i + 1; j < a.cols(); ++j) {
                const double v = 0.5 * (a(i, j) + a(j, i));
                s.m_(i, j) = v;
                s.m_(j, i) = v;
            }
        }
        return s;
    }

    static SymMatrix identity(std::size_t n) {
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) s.m_(i, i) = 1.0;
        return s;
    }

    static SymMatrix diagonal(const std::vector<double>& d) {
        SymMatrix s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) s.m_(i, i) = d[i];
        return s;
    }

    /// Rank-one form u u^T.
    static SymMatrix outer(const std::vector<double>& u) {
        SymMatrix s(u.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            for (std::size_t j = 0; j < u.size(); ++j) s.m_(i, j) = u[i] * u[j];
        return s;
    }

    std::size_t dim() const { return m_.rows(); }

    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

    void set(std::size_t i, std::size_t j, double v) {
        m_(i, j) = v;
        m_(j, i) = v;
    }

    const Matrix& dense() const { return m_; }

    double trace() const { return m_.trace(); }
    double max_abs() const { return m_.max_abs(); }

    SymMatrix& operator+=(const SymMatrix& o) {
        Matrix& a = m_;
        a += o.m_;
        return *this;
    }

    SymMatrix& operator*=(double s) {
        m_ *= s;
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

    /// this += s * o, entrywise; keeps symmetry exactly.
    void add_scaled(const SymMatrix& o, double s) {
        if (o.dim() != dim()) throw Error("matrix shape mismatch");
        std::vector<double>& a = m_.data();
        const std::vector<double>& b = o.m_.data();
        for (std::size_t k = 0; k < a.size(); ++k) a[k] += s * b[k];
    }

private:
    Matrix m_;
};

// Small vector helpers shared across the library.

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& v) { return std::sqrt(dot(v, v)); }

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

} // namespace mixdisc
