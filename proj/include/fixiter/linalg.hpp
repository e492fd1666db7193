#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fixiter/point.hpp"

namespace fixiter {

/// Small dense row-major matrix. Sized for desk-scale experiments, not BLAS.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    /// Build from nested rows; throws if the rows are ragged or empty.
    static Matrix from_rows(const std::vector<std::vector<double>>& rws) {
        if (rws.empty() || rws[0].empty())
            throw std::invalid_argument("Matrix: empty matrix");
        Matrix m(rws.size(), rws[0].size());
        for (std::size_t i = 0; i < rws.size(); ++i) {
            if (rws[i].size() != m.cols)
                throw std::invalid_argument("Matrix: ragged rows");
            for (std::size_t j = 0; j < m.cols; ++j) m(i, j) = rws[i][j];
        }
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
};

inline std::vector<double> matvec(const Matrix& m, const std::vector<double>& x) {
    if (x.size() != m.cols)
        throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols; ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols != b.rows)
        throw std::invalid_argument("matmul: dimension mismatch");
    Matrix c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t k = 0; k < a.cols; ++k) {
            double v = a(i, k);
            for (std::size_t j = 0; j < b.cols; ++j) c(i, j) += v * b(k, j);
        }
    return c;
}

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

/// Solve A x = b by Gaussian elimination with partial pivoting.
/// Throws on singular (to working precision) systems.
inline std::vector<double> solve(Matrix m, std::vector<double> b) {
    if (m.rows != m.cols || b.size() != m.rows)
        throw std::invalid_argument("solve: need square system");
    const std::size_t n = m.rows;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (std::abs(m(piv, k)) < 1e-300)
            throw std::invalid_argument("solve: singular matrix");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            double f = m(i, k) / m(k, k);
            if (f == 0.0) continue;
            for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

/// Spectral norm (largest singular value) via power iteration on A^T A.
/// A^T A is symmetric positive semidefinite, so the Rayleigh quotient
/// converges monotonically; 200 sweeps is far beyond desk-scale needs.
inline double operator_norm_euclidean(const Matrix& m) {
    Matrix b = matmul(transpose(m), m);
    const std::size_t n = b.cols;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * static_cast<double>(i);
    double lambda = 0.0;
    for (int it = 0; it < 200; ++it) {
        std::vector<double> w = matvec(b, v);
        double nw = 0.0;
        for (double c : w) nw = std::max(nw, std::abs(c));
        if (nw == 0.0) return 0.0;  // A is the zero map
        for (double& c : w) c /= nw;
        double num = 0.0, den = 0.0;
        std::vector<double> bw = matvec(b, w);
        for (std::size_t i = 0; i < n; ++i) {
            num += w[i] * bw[i];
            den += w[i] * w[i];
        }
        double next = num / den;
        v = std::move(w);
        if (it > 2 && std::abs(next - lambda) <= 1e-15 * std::max(1.0, std::abs(next))) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(std::max(lambda, 0.0));
}

/// Exact operator norm of A as a map between spaces carrying `kind`,
/// for the norms where a closed form (or a cheap exact method) exists:
/// euclidean (largest singular value), max (max absolute row sum),
/// p=1 (max absolute column sum). Other p-norms have no tractable exact
/// operator norm; callers fall back to empirical sampling.
inline std::optional<double> exact_operator_norm(const Matrix& m, const NormKind& kind) {
    switch (kind.kind()) {
        case NormKind::Kind::euclidean:
            return operator_norm_euclidean(m);
        case NormKind::Kind::max: {
            double best = 0.0;
            for (std::size_t i = 0; i < m.rows; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < m.cols; ++j) s += std::abs(m(i, j));
                best = std::max(best, s);
            }
            return best;
        }
        default:
            if (kind.exponent() == 1.0) {
                double best = 0.0;
                for (std::size_t j = 0; j < m.cols; ++j) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < m.rows; ++i) s += std::abs(m(i, j));
                    best = std::max(best, s);
                }
                return best;
            }
            if (kind.exponent() == 2.0) return operator_norm_euclidean(m);
            return std::nullopt;
    }
}

}  // namespace fixiter
