#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace regmkt {

using Vec = std::vector<double>;

/// Dense row-major matrix, sized for small market models (n <= a few hundred).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix diagonal(std::span<const double> d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }
    static Matrix scaled_identity(std::size_t n, double s) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = s;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {a_.data() + i * cols_, cols_};
    }

    bool operator==(const Matrix& o) const = default;

    /// this * v
    Vec mul(std::span<const double> v) const {
        Vec out(rows_, 0.0);
        mul_into(v, out);
        return out;
    }
    void mul_into(std::span<const double> v, std::span<double> out) const {
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            const double* r = a_.data() + i * cols_;
            for (std::size_t j = 0; j < cols_; ++j) s += r[j] * v[j];
            out[i] = s;
        }
    }

    /// this * this'
    Matrix times_transpose() const {
        Matrix out(rows_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < cols_; ++k) s += (*this)(i, k) * (*this)(j, k);
                out(i, j) = s;
                out(j, i) = s;
            }
        return out;
    }

    bool is_symmetric(double tol = 0.0) const {
        if (rows_ != cols_) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
        return true;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// x' A x for square A
inline double quadratic_form(const Matrix& a, std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += x[i] * dot(a.row(i), x);
    return s;
}

/// Solve A x = b by Gaussian elimination with partial pivoting. A square.
/// Throws std::runtime_error on (numerically) singular A.
inline Vec solve_dense(Matrix a, Vec b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw std::invalid_argument("solve_dense: dimension mismatch");
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > best) { best = std::abs(a(r, col)); piv = r; }
        if (best == 0.0) throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        const double d = a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / d;
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
        x[i] = s / a(i, i);
    }
    return x;
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
/// Convergence threshold 1e-14 on the off-diagonal Frobenius norm.
inline Vec symmetric_eigenvalues(Matrix a) {
    const std::size_t n = a.rows();
    if (!a.is_symmetric(0.0)) throw std::invalid_argument("symmetric_eigenvalues: not symmetric");
    if (n == 0) throw std::invalid_argument("symmetric_eigenvalues: empty matrix");

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    constexpr double kTol = 1e-14;
    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > kTol; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    Vec eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
    return eig;
}

}  // namespace regmkt
