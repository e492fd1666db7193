#pragma once

#include <cmath>
#include <stdexcept>

#include "fixiter/mapping.hpp"
#include "fixiter/point.hpp"
#include "fixiter/schedule.hpp"
#include "fixiter/trace.hpp"

namespace fixiter {

namespace detail {
inline void require_open_unit(double v, const char* name) {
    if (!(v > 0.0 && v < 1.0))
        throw std::invalid_argument(std::string(name) + " must lie strictly inside (0,1)");
}
}  // namespace detail

/// x_{n+1} = T x_n
inline Point picard_step(const MappingSpec& t, const Point& x) { return apply_mapping(t, x); }

/// x_{n+1} = (1 - a) x_n + a T x_n
inline Point mann_step(const MappingSpec& t, const Point& x, double alpha) {
    detail::require_open_unit(alpha, "alpha");
    return combine(1.0 - alpha, x, alpha, apply_mapping(t, x));
}

/// y = (1 - b) x + b T x;  x_{n+1} = (1 - a) x + a T y
inline Point ishikawa_step(const MappingSpec& t, const Point& x, double alpha, double beta) {
    detail::require_open_unit(alpha, "alpha");
    detail::require_open_unit(beta, "beta");
    Point y = combine(1.0 - beta, x, beta, apply_mapping(t, x));
    return combine(1.0 - alpha, x, alpha, apply_mapping(t, y));
}

/// b = (1 - b_n) a + b_n T a;  a_{n+1} = (1 - a_n) T a + a_n T b
/// Both terms of the outer average go through T.
inline Point s_step(const MappingSpec& t, const Point& a, double alpha, double beta) {
    detail::require_open_unit(alpha, "alpha");
    detail::require_open_unit(beta, "beta");
    Point ta = apply_mapping(t, a);
    Point b = combine(1.0 - beta, a, beta, ta);
    return combine(1.0 - alpha, ta, alpha, apply_mapping(t, b));
}

/// t_{n+1} = T((1 - a) t + a T t): a Picard step applied to a Mann point.
inline Point normal_s_step(const MappingSpec& t, const Point& x, double alpha) {
    detail::require_open_unit(alpha, "alpha");
    return apply_mapping(t, combine(1.0 - alpha, x, alpha, apply_mapping(t, x)));
}

/// z = (1 - b) x + b T x;  y = (1 - a) z + a T z;  x_{n+1} = T y
/// Two Mann averaging stages, then a direct application of T.
inline Point ky_step(const MappingSpec& t, const Point& x, double alpha, double beta) {
    detail::require_open_unit(alpha, "alpha");
    detail::require_open_unit(beta, "beta");
    Point z = combine(1.0 - beta, x, beta, apply_mapping(t, x));
    Point y = combine(1.0 - alpha, z, alpha, apply_mapping(t, z));
    return apply_mapping(t, y);
}

/// One step of the selected scheme with the parameters scheduled for index n.
inline Point scheme_step(SchemeId scheme, const MappingSpec& t, const Point& x,
                         const Schedule& schedule, int n) {
    switch (scheme) {
        case SchemeId::picard: return picard_step(t, x);
        case SchemeId::mann: return mann_step(t, x, schedule.alpha(n));
        case SchemeId::ishikawa: return ishikawa_step(t, x, schedule.alpha(n), schedule.beta(n));
        case SchemeId::s: return s_step(t, x, schedule.alpha(n), schedule.beta(n));
        case SchemeId::normal_s: return normal_s_step(t, x, schedule.alpha(n));
        default: return ky_step(t, x, schedule.alpha(n), schedule.beta(n));
    }
}

/// Iterate from x1 until a stop rule fires, recording residuals and, when
/// the mapping's fixed points are known, errors against a reference fixed
/// point and distances to the fixed-point set.
///
/// The trace index starts at n = 1 with x1 itself. A non-finite iterate or
/// one beyond the divergence cap ends the run with stop_reason = diverged;
/// the offending iterate is not recorded.
inline IterationTrace run_iteration(SchemeId scheme, const MappingSpec& t, const Point& x1,
                                    const Schedule& schedule, const StopRule& stop,
                                    const NormKind& norm_kind = NormKind::euclidean()) {
    stop.validate();
    if (!x1.finite()) throw std::invalid_argument("run_iteration: x1 must be finite");

    IterationTrace trace;
    trace.scheme = scheme;
    trace.norm_kind = norm_kind;
    trace.stop = stop;

    const double cap = stop.divergence_cap.value_or(1e12 * (1.0 + norm(x1, norm_kind)));
    trace.stop.divergence_cap = cap;

    if (t.fixed_points) {
        trace.reference_point = reference_fixed_point(x1, *t.fixed_points);
        trace.errors = std::vector<double>{};
        trace.dist_to_fixed = std::vector<double>{};
    }

    // Records x_n and its derived scalars; refuses the point if any scalar
    // came out non-finite so the trace invariant (finite, >= 0) holds.
    auto record = [&](const Point& x) {
        Point tx = apply_mapping(t, x);
        if (!tx.finite()) return false;
        trace.iterates.push_back(x);
        trace.residuals.push_back(distance(x, tx, norm_kind));
        if (trace.reference_point)
            trace.errors->push_back(distance(x, *trace.reference_point, norm_kind));
        if (t.fixed_points)
            trace.dist_to_fixed->push_back(distance_to_fixed_set(x, *t.fixed_points, norm_kind));
        return true;
    };

    if (!record(x1)) throw std::invalid_argument("run_iteration: T(x1) is not finite");
    for (int n = 1;; ++n) {
        if (trace.residuals.back() < stop.residual_tol) {
            trace.stop_reason = StopReason::residual_below_tol;
            break;
        }
        if (norm(trace.iterates.back(), norm_kind) > cap) {
            trace.stop_reason = StopReason::diverged;
            break;
        }
        if (n >= stop.max_iter) {
            trace.stop_reason = StopReason::max_iter;
            break;
        }
        Point next = scheme_step(scheme, t, trace.iterates.back(), schedule, n);
        if (!next.finite() || !record(next)) {
            trace.stop_reason = StopReason::diverged;
            break;
        }
    }
    trace.check_consistent();
    return trace;
}

}  // namespace fixiter
