#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fixiter/linalg.hpp"
#include "fixiter/point.hpp"

namespace fixiter {

/// A finite set of known fixed points.
struct FinitePointSet {
    std::vector<Point> points;
};

/// An affine subspace { origin + sum_i t_i * directions[i] : t in R^k }.
/// Directions need not be orthonormal, only linearly independent.
struct AffineSubspace {
    Point origin;
    std::vector<Point> directions;
};

using FixedPointSet = std::variant<FinitePointSet, AffineSubspace>;

inline std::size_t fixed_set_dim(const FixedPointSet& f) {
    if (const auto* fin = std::get_if<FinitePointSet>(&f)) {
        if (fin->points.empty())
            throw std::invalid_argument("FixedPointSet: empty finite set");
        return fin->points[0].dim();
    }
    return std::get<AffineSubspace>(f).origin.dim();
}

inline std::string describe(const FixedPointSet& f) {
    if (const auto* fin = std::get_if<FinitePointSet>(&f))
        return fin->points.size() == 1 ? "singleton" : std::to_string(fin->points.size()) + " points";
    const auto& sub = std::get<AffineSubspace>(f);
    return "affine subspace (dim " + std::to_string(sub.directions.size()) + ")";
}

namespace detail {

/// Euclidean projection of x onto the subspace: solve the Gram system
/// (D^T D) t = D^T (x - origin) and return origin + D t.
inline Point project_euclidean(const Point& x, const AffineSubspace& sub) {
    const std::size_t k = sub.directions.size();
    const std::size_t d = x.dim();
    Matrix gram(k, k);
    std::vector<double> rhs(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < d; ++c) s += sub.directions[i][c] * sub.directions[j][c];
            gram(i, j) = s;
        }
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += sub.directions[i][c] * (x[c] - sub.origin[c]);
        rhs[i] = s;
    }
    std::vector<double> t = solve(gram, rhs);
    Point p = sub.origin;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t c = 0; c < d; ++c) p[c] += t[i] * sub.directions[i][c];
    return p;
}

/// Distance to an affine subspace under a non-euclidean norm.
///
/// The objective t -> ||x - (origin + D t)|| is convex, so cyclic
/// coordinate-wise golden-section search converges for the smooth p-norms;
/// sweeps repeat until an entire pass improves by less than tol.
inline double min_over_subspace(const Point& x, const AffineSubspace& sub, const NormKind& kind,
                                double tol) {
    const std::size_t k = sub.directions.size();
    std::vector<double> t(k, 0.0);
    auto value = [&](const std::vector<double>& ts) {
        Point p = sub.origin;
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t c = 0; c < p.dim(); ++c) p[c] += ts[i] * sub.directions[i][c];
        return distance(x, p, kind);
    };
    // Bracket: the minimizing coefficients cannot exceed this radius because
    // each direction contributes at least its own scale to the distance.
    double radius = 2.0 * (1.0 + distance(x, sub.origin, kind));
    double prev = value(t);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int sweep = 0; sweep < 200; ++sweep) {
        for (std::size_t i = 0; i < k; ++i) {
            double lo = t[i] - radius, hi = t[i] + radius;
            double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
            std::vector<double> ta = t, tb = t;
            ta[i] = a;
            tb[i] = b;
            double fa = value(ta), fb = value(tb);
            while (hi - lo > tol * 1e-3) {
                if (fa <= fb) {
                    hi = b;
                    b = a;
                    fb = fa;
                    a = hi - phi * (hi - lo);
                    ta[i] = a;
                    fa = value(ta);
                } else {
                    lo = a;
                    a = b;
                    fa = fb;
                    b = lo + phi * (hi - lo);
                    tb[i] = b;
                    fb = value(tb);
                }
            }
            t[i] = 0.5 * (lo + hi);
        }
        double cur = value(t);
        if (prev - cur < tol * 0.5) return cur;
        prev = cur;
    }
    return prev;
}

}  // namespace detail

/// d(x, F) = inf { ||x - p|| : p in F }.
///
/// Finite sets take the exact minimum. Affine subspaces use the orthogonal
/// projection under the euclidean norm and an iterative minimization
/// (tolerance 1e-10) for other norms.
inline double distance_to_fixed_set(const Point& x, const FixedPointSet& f, const NormKind& kind) {
    if (x.dim() != fixed_set_dim(f))
        throw std::invalid_argument("distance_to_fixed_set: dimension mismatch");
    if (const auto* fin = std::get_if<FinitePointSet>(&f)) {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& p : fin->points) best = std::min(best, distance(x, p, kind));
        return best;
    }
    const auto& sub = std::get<AffineSubspace>(f);
    if (sub.directions.empty()) return distance(x, sub.origin, kind);
    if (kind.kind() == NormKind::Kind::euclidean)
        return distance(x, detail::project_euclidean(x, sub), kind);
    return detail::min_over_subspace(x, sub, kind, 1e-10);
}

/// Fixed point used as the error reference of a trace: the nearest declared
/// point for finite sets, the euclidean projection for affine subspaces.
inline Point reference_fixed_point(const Point& x1, const FixedPointSet& f) {
    if (const auto* fin = std::get_if<FinitePointSet>(&f)) {
        if (fin->points.empty())
            throw std::invalid_argument("reference_fixed_point: empty finite set");
        const Point* best = &fin->points[0];
        double bestd = distance(x1, *best, NormKind::euclidean());
        for (const Point& p : fin->points) {
            double d = distance(x1, p, NormKind::euclidean());
            if (d < bestd) {
                bestd = d;
                best = &p;
            }
        }
        return *best;
    }
    const auto& sub = std::get<AffineSubspace>(f);
    if (sub.directions.empty()) return sub.origin;
    return detail::project_euclidean(x1, sub);
}

}  // namespace fixiter
