#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "fixiter/trace.hpp"

namespace fixiter {

/// Inputs of the closed-form error bounds: the contraction constant L, the
/// schedule lower bound lambda, and the initial error ||x1 - p||.
struct BoundParams {
    double L = 0.5;
    double lambda = 0.5;
    double initial_error = 1.0;

    void validate() const {
        if (!(L > 0.0 && L < 1.0)) throw std::invalid_argument("BoundParams: L must lie in (0,1)");
        if (!(lambda > 0.0 && lambda < 1.0))
            throw std::invalid_argument("BoundParams: lambda must lie in (0,1)");
        if (!(initial_error >= 0.0))
            throw std::invalid_argument("BoundParams: initial_error must be >= 0");
    }
};

// Per-step contraction factors of the three schemes that admit closed-form
// bounds. Note 1 - lambda^2 (1-L) == 1 - (1-L) lambda^2; the single
// canonical form below is used everywhere.

inline double per_step_factor_s(double L, double lambda) {
    return L * (1.0 - (1.0 - L) * lambda * lambda);
}

inline double per_step_factor_normal_s(double L, double lambda) {
    return L * (1.0 - (1.0 - L) * lambda);
}

inline double per_step_factor_ky(double L, double lambda) {
    double f = 1.0 - (1.0 - L) * lambda;
    return L * f * f;
}

namespace detail {
inline double bound_value(double factor, const BoundParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("bound: n must be >= 0");
    return std::pow(factor, n) * p.initial_error;  // n = 0 yields the initial error
}
}  // namespace detail

/// [L(1 - (1-L) lambda^2)]^n * ||a1 - p||
inline double bound_s(const BoundParams& p, int n) {
    return detail::bound_value(per_step_factor_s(p.L, p.lambda), p, n);
}

/// [L(1 - (1-L) lambda)]^n * ||t1 - p||
inline double bound_normal_s(const BoundParams& p, int n) {
    return detail::bound_value(per_step_factor_normal_s(p.L, p.lambda), p, n);
}

/// [L(1 - (1-L) lambda)^2]^n * ||x1 - p||
inline double bound_ky(const BoundParams& p, int n) {
    return detail::bound_value(per_step_factor_ky(p.L, p.lambda), p, n);
}

/// Ratio of the ky bound to the s bound with the initial-error quotient set
/// to 1: [(1 - (1-L) lambda)^2 / (1 - (1-L) lambda^2)]^n. Strictly
/// decreasing in n and vanishing as n grows.
inline double bound_ratio_mk(const BoundParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("bound_ratio_mk: n must be >= 0");
    double f = 1.0 - (1.0 - p.L) * p.lambda;
    double q = f * f / (1.0 - (1.0 - p.L) * p.lambda * p.lambda);
    return std::pow(q, n);
}

/// Ratio of the ky bound to the normal-s bound: [1 - (1-L) lambda]^(2n).
inline double bound_ratio_ml(const BoundParams& p, int n) {
    p.validate();
    if (n < 0) throw std::invalid_argument("bound_ratio_ml: n must be >= 0");
    return std::pow(1.0 - (1.0 - p.L) * p.lambda, 2 * n);
}

/// Bound family keyed by scheme, for the schemes that have one.
enum class BoundKind { s, normal_s, ky };

inline std::optional<BoundKind> bound_for_scheme(SchemeId scheme) {
    switch (scheme) {
        case SchemeId::s: return BoundKind::s;
        case SchemeId::normal_s: return BoundKind::normal_s;
        case SchemeId::ky: return BoundKind::ky;
        default: return std::nullopt;
    }
}

inline double bound_value(BoundKind kind, const BoundParams& p, int n) {
    switch (kind) {
        case BoundKind::s: return bound_s(p, n);
        case BoundKind::normal_s: return bound_normal_s(p, n);
        default: return bound_ky(p, n);
    }
}

}  // namespace fixiter
