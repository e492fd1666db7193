#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include "fixiter/fixed_point_set.hpp"
#include "fixiter/linalg.hpp"
#include "fixiter/point.hpp"
#include "fixiter/random.hpp"

namespace fixiter {

/// T x = A x + c.
struct AffineMap {
    Matrix A;
    std::vector<double> c;
};

/// Rotation of the plane by theta radians about the origin.
struct Rotation2D {
    double theta = 0.0;
};

/// (x, y) -> (y, x). A reflection across the diagonal.
struct CoordinateSwap {};

/// One-dimensional mapping defined by a user callback.
struct ScalarFunction {
    std::function<double(double)> f;
};

using MappingKind = std::variant<AffineMap, Rotation2D, CoordinateSwap, ScalarFunction>;

enum class MappingClass { contraction, nonexpansive };

/// A self-map of the ambient space together with its declared Lipschitz
/// class and, when known, its fixed-point set. The declared class is a
/// claim: validate_mapping_class checks it empirically, and problem
/// loading refuses specs whose claim fails.
struct MappingSpec {
    MappingKind kind;
    MappingClass declared_class = MappingClass::nonexpansive;
    double lipschitz = 1.0;  // L for contractions; 1.0 for nonexpansive
    std::optional<FixedPointSet> fixed_points;

    std::size_t dim() const {
        if (std::holds_alternative<AffineMap>(kind))
            return std::get<AffineMap>(kind).A.rows;
        if (std::holds_alternative<ScalarFunction>(kind)) return 1;
        return 2;  // rotation-2d and coordinate-swap
    }

    /// Every point fixed (identity map). Rate comparisons are undefined
    /// on such mappings and are skipped by the experiment runner.
    bool degenerate_identity() const {
        if (const auto* rot = std::get_if<Rotation2D>(&kind))
            return std::sin(rot->theta) == 0.0 && std::cos(rot->theta) == 1.0;
        if (const auto* aff = std::get_if<AffineMap>(&kind)) {
            if (aff->A.rows != aff->A.cols) return false;
            for (double v : aff->c)
                if (v != 0.0) return false;
            Matrix id = Matrix::identity(aff->A.rows);
            return aff->A.a == id.a;
        }
        return false;
    }
};

inline MappingSpec contraction(MappingKind kind, double L,
                               std::optional<FixedPointSet> fixed = std::nullopt) {
    if (!(L > 0.0 && L < 1.0))
        throw std::invalid_argument("contraction: L must lie in (0,1)");
    return MappingSpec{std::move(kind), MappingClass::contraction, L, std::move(fixed)};
}

inline MappingSpec nonexpansive(MappingKind kind,
                                std::optional<FixedPointSet> fixed = std::nullopt) {
    return MappingSpec{std::move(kind), MappingClass::nonexpansive, 1.0, std::move(fixed)};
}

/// Evaluate T x.
inline Point apply_mapping(const MappingSpec& t, const Point& x) {
    if (x.dim() != t.dim())
        throw std::invalid_argument("apply_mapping: dimension mismatch");
    if (const auto* aff = std::get_if<AffineMap>(&t.kind)) {
        std::vector<double> y = matvec(aff->A, x.coords);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] += aff->c[i];
        return Point(std::move(y));
    }
    if (const auto* rot = std::get_if<Rotation2D>(&t.kind)) {
        double c = std::cos(rot->theta), s = std::sin(rot->theta);
        return Point{c * x[0] - s * x[1], s * x[0] + c * x[1]};
    }
    if (std::holds_alternative<CoordinateSwap>(t.kind)) return Point{x[1], x[0]};
    return Point{std::get<ScalarFunction>(t.kind).f(x[0])};
}

/// Result of an empirical Lipschitz-class check.
struct ClassValidation {
    bool passed = false;
    double max_ratio = 0.0;      // worst observed ||Tx-Ty|| / ||x-y||
    double declared_limit = 1.0;  // L for contractions, 1 for nonexpansive
    int samples = 0;
    std::optional<double> exact_operator_norm;  // affine kinds, when computable

    std::string summary() const {
        std::ostringstream os;
        os << (passed ? "PASS" : "FAIL") << ": max observed ratio " << max_ratio
           << " vs declared limit " << declared_limit << " over " << samples << " pairs";
        if (exact_operator_norm) os << " (exact operator norm " << *exact_operator_norm << ")";
        return os.str();
    }
};

/// Check the declared Lipschitz class on `samples` random pairs drawn from
/// a box of the given halfwidth. Affine kinds also get their exact operator
/// norm when the norm admits one; the check then uses whichever evidence is
/// stronger. Pairs closer than 1e-8 are re-drawn to keep ratios meaningful.
inline ClassValidation validate_mapping_class(const MappingSpec& t, int samples,
                                              std::uint64_t seed,
                                              const NormKind& kind = NormKind::euclidean(),
                                              double box_halfwidth = 10.0) {
    if (samples < 2)
        throw std::invalid_argument("validate_mapping_class: samples must be >= 2");
    ClassValidation report;
    report.samples = samples;
    report.declared_limit =
        t.declared_class == MappingClass::contraction ? t.lipschitz : 1.0;

    std::mt19937_64 rng(seed);
    const std::size_t d = t.dim();
    for (int i = 0; i < samples; ++i) {
        Point x = random_point(rng, d, box_halfwidth);
        Point y = random_point(rng, d, box_halfwidth);
        int guard = 0;
        while (distance(x, y, kind) < 1e-8 && guard++ < 100)
            y = random_point(rng, d, box_halfwidth);
        double num = distance(apply_mapping(t, x), apply_mapping(t, y), kind);
        double den = distance(x, y, kind);
        report.max_ratio = std::max(report.max_ratio, num / den);
    }
    if (const auto* aff = std::get_if<AffineMap>(&t.kind))
        report.exact_operator_norm = exact_operator_norm(aff->A, kind);

    double observed = report.max_ratio;
    if (report.exact_operator_norm) observed = std::max(observed, *report.exact_operator_norm);
    report.passed = observed <= report.declared_limit + 1e-9;
    return report;
}

/// ||Tp - p||: zero (to tolerance) for every genuine fixed point.
inline double fixed_point_residual(const MappingSpec& t, const Point& p,
                                   const NormKind& kind = NormKind::euclidean()) {
    return distance(apply_mapping(t, p), p, kind);
}

}  // namespace fixiter
