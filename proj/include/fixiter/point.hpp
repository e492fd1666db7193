#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace fixiter {

/// A point of a finite-dimensional real normed space.
///
/// Coordinates are plain doubles; the dimension is fixed at construction
/// and must be at least 1. Construction rejects non-finite coordinates.
struct Point {
    std::vector<double> coords;

    Point() = default;

    explicit Point(std::vector<double> c) : coords(std::move(c)) { validate(); }

    Point(std::initializer_list<double> c) : coords(c) { validate(); }

    std::size_t dim() const { return coords.size(); }

    double operator[](std::size_t i) const { return coords[i]; }
    double& operator[](std::size_t i) { return coords[i]; }

    bool finite() const {
        for (double v : coords)
            if (!std::isfinite(v)) return false;
        return true;
    }

private:
    void validate() const {
        if (coords.empty())
            throw std::invalid_argument("Point: dimension must be >= 1");
        if (!finite())
            throw std::invalid_argument("Point: coordinates must be finite");
    }
};

inline bool operator==(const Point& a, const Point& b) { return a.coords == b.coords; }

/// a*x + b*y, elementwise. The workhorse of every averaged iteration step.
inline Point combine(double a, const Point& x, double b, const Point& y) {
    if (x.dim() != y.dim())
        throw std::invalid_argument("combine: dimension mismatch");
    Point r;
    r.coords.resize(x.dim());
    for (std::size_t i = 0; i < x.dim(); ++i) r.coords[i] = a * x.coords[i] + b * y.coords[i];
    return r;
}

inline Point subtract(const Point& x, const Point& y) { return combine(1.0, x, -1.0, y); }

inline Point scale(double s, const Point& x) {
    Point r = x;
    for (double& v : r.coords) v *= s;
    return r;
}

/// Norm selector: euclidean, max, or a p-norm with finite exponent p >= 1.
///
/// Euclidean and p-norms with 1 < p < infinity induce uniformly convex
/// spaces; the max norm does not, and reports downstream flag it as such.
class NormKind {
public:
    enum class Kind { euclidean, max, p };

    static NormKind euclidean() { return NormKind(Kind::euclidean, 2.0); }
    static NormKind max() { return NormKind(Kind::max, 0.0); }
    static NormKind p_norm(double p) {
        if (!std::isfinite(p) || p < 1.0)
            throw std::invalid_argument("NormKind: p-norm exponent must be finite and >= 1");
        return NormKind(Kind::p, p);
    }

    Kind kind() const { return kind_; }
    double exponent() const { return p_; }

    bool uniformly_convex() const {
        return kind_ == Kind::euclidean || (kind_ == Kind::p && p_ > 1.0);
    }

    std::string name() const {
        switch (kind_) {
            case Kind::euclidean: return "euclidean";
            case Kind::max: return "max";
            default: return "p" + std::to_string(p_);
        }
    }

private:
    NormKind(Kind k, double p) : kind_(k), p_(p) {}
    Kind kind_;
    double p_;
};

/// Selected norm of v. Scaled by the largest coordinate magnitude so that
/// p-norm powers cannot overflow for finite inputs.
inline double norm(const Point& v, const NormKind& kind) {
    if (!v.finite())
        throw std::invalid_argument("norm: non-finite input");
    double m = 0.0;
    for (double c : v.coords) m = std::max(m, std::abs(c));
    if (m == 0.0) return 0.0;
    switch (kind.kind()) {
        case NormKind::Kind::max:
            return m;
        case NormKind::Kind::euclidean: {
            double s = 0.0;
            for (double c : v.coords) {
                double t = c / m;
                s += t * t;
            }
            return m * std::sqrt(s);
        }
        default: {
            double p = kind.exponent();
            double s = 0.0;
            for (double c : v.coords) s += std::pow(std::abs(c) / m, p);
            return m * std::pow(s, 1.0 / p);
        }
    }
}

inline double distance(const Point& x, const Point& y, const NormKind& kind) {
    return norm(subtract(x, y), kind);
}

}  // namespace fixiter
