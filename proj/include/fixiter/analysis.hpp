#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fixiter/bounds.hpp"
#include "fixiter/fixed_point_set.hpp"
#include "fixiter/trace.hpp"

namespace fixiter {

enum class CheckStatus { pass, fail, not_applicable };

inline const char* check_status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "PASS";
        case CheckStatus::fail: return "FAIL";
        default: return "NOT_APPLICABLE";
    }
}

/// Outcome of a single trace diagnostic. `margin` is the distance to the
/// pass/fail boundary; its meaning is stated per check below.
struct CheckReport {
    CheckStatus status = CheckStatus::not_applicable;
    double margin = 0.0;
    std::string note;
};

// ---------------------------------------------------------------------------
// Bound dominance
// ---------------------------------------------------------------------------

struct DominanceRow {
    int n = 0;          // trace index (1-based)
    double observed = 0.0;
    double bound = 0.0;  // closed-form value with exponent n-1
    double slack = 0.0;  // allowed - observed; negative on violation
};

struct DominanceReport {
    CheckStatus status = CheckStatus::not_applicable;
    std::vector<DominanceRow> rows;
    double worst_slack = 0.0;
    std::string note;
};

/// Verify the observed errors never exceed the scheme's closed-form bound:
/// ||x_n - p|| <= factor^(n-1) * ||x1 - p||, with relative slack 1e-9.
/// Applies to traces of a declared contraction run with a schedule whose
/// parameters stay >= params.lambda.
inline DominanceReport check_bound_dominance(const IterationTrace& trace, const BoundParams& params,
                                             BoundKind kind) {
    DominanceReport report;
    if (!trace.errors) {
        report.note = "trace carries no errors (no known fixed point)";
        return report;
    }
    params.validate();
    report.status = CheckStatus::pass;
    report.worst_slack = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= trace.length(); ++n) {
        DominanceRow row;
        row.n = n;
        row.observed = trace.error(n);
        row.bound = bound_value(kind, params, n - 1);
        row.slack = row.bound + 1e-9 * (1.0 + row.bound) - row.observed;
        if (row.slack < 0.0) report.status = CheckStatus::fail;
        report.worst_slack = std::min(report.worst_slack, row.slack);
        report.rows.push_back(row);
    }
    return report;
}

/// Convenience overload: picks the bound matching the trace's scheme.
inline DominanceReport check_bound_dominance(const IterationTrace& trace,
                                             const BoundParams& params) {
    auto kind = bound_for_scheme(trace.scheme);
    if (!kind) {
        DominanceReport report;
        report.note = std::string("no closed-form bound for scheme ") + scheme_name(trace.scheme);
        return report;
    }
    return check_bound_dominance(trace, params, *kind);
}

// ---------------------------------------------------------------------------
// Berinde speed classification
// ---------------------------------------------------------------------------

enum class SpeedClass { A_faster, same_rate, B_faster, inconclusive };

inline const char* speed_class_name(SpeedClass c) {
    switch (c) {
        case SpeedClass::A_faster: return "A_faster";
        case SpeedClass::same_rate: return "same_rate";
        case SpeedClass::B_faster: return "B_faster";
        default: return "inconclusive";
    }
}

struct BerindeConfig {
    double slope_tol = 1e-3;     // per-iteration log-slope dead band
    double ratio_band = 10.0;    // same_rate requires ratios within [1/band, band]
    double noise_floor = 1e-13;  // errors below this are float saturation, not signal
    int burn_in = 5;             // initial iterates discarded from the fit
};

/// Classification of two error sequences by the limit of e^A_n / e^B_n.
/// The limit is estimated by the least-squares slope of log r_n over the
/// usable window; a clearly negative slope means the ratio vanishes
/// geometrically (A converges faster), a flat slope with bounded ratios
/// means equal rates.
struct ComparisonReport {
    std::vector<int> window_indices;   // usable trace indices n
    std::vector<double> ratio_series;  // r_n = e^A_n / e^B_n at those indices
    double fitted_log_slope = 0.0;
    SpeedClass classification = SpeedClass::inconclusive;
    int window_first = 0;
    int window_last = 0;
    std::string note;
};

inline ComparisonReport berinde_compare(const IterationTrace& a, const IterationTrace& b,
                                        const BerindeConfig& config = {}) {
    ComparisonReport report;
    if (!a.errors || !b.errors) {
        report.note = "a trace carries no errors (no known fixed point)";
        return report;
    }
    if (a.reference_point && b.reference_point &&
        distance(*a.reference_point, *b.reference_point, NormKind::euclidean()) > 1e-9) {
        report.note = "traces measure errors against different fixed points";
        return report;
    }

    const int n_common = std::min(a.length(), b.length());
    for (int n = config.burn_in + 1; n <= n_common; ++n) {
        double ea = a.error(n), eb = b.error(n);
        if (eb == 0.0) continue;  // division guard
        if (ea < config.noise_floor || eb < config.noise_floor) continue;
        report.window_indices.push_back(n);
        report.ratio_series.push_back(ea / eb);
    }
    const std::size_t k = report.window_indices.size();
    if (k < 8) {
        report.note = "fewer than 8 usable indices after burn-in/noise-floor filtering (" +
                      std::to_string(k) + ")";
        return report;
    }
    report.window_first = report.window_indices.front();
    report.window_last = report.window_indices.back();

    // Least-squares slope of log r_n against n.
    double mean_n = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        mean_n += report.window_indices[i];
        mean_y += std::log(report.ratio_series[i]);
    }
    mean_n /= static_cast<double>(k);
    mean_y /= static_cast<double>(k);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        double dn = report.window_indices[i] - mean_n;
        sxy += dn * (std::log(report.ratio_series[i]) - mean_y);
        sxx += dn * dn;
    }
    report.fitted_log_slope = sxy / sxx;

    if (report.fitted_log_slope < -config.slope_tol) {
        report.classification = SpeedClass::A_faster;
    } else if (report.fitted_log_slope > config.slope_tol) {
        report.classification = SpeedClass::B_faster;
    } else {
        bool banded = true;
        for (double r : report.ratio_series)
            if (r > config.ratio_band || r < 1.0 / config.ratio_band) banded = false;
        report.classification = banded ? SpeedClass::same_rate : SpeedClass::inconclusive;
        if (!banded) report.note = "flat slope but ratios leave the same-rate band";
    }
    return report;
}

// ---------------------------------------------------------------------------
// Residual and error diagnostics
// ---------------------------------------------------------------------------

/// Vanishing-residual check: the residual over the final tail_fraction of
/// the trace must fall below max(10 * stop tolerance, 1e-8) and must not
/// exceed the worst residual of the first half. margin = threshold minus
/// observed tail maximum.
inline CheckReport residual_decay_check(const IterationTrace& trace, double tail_fraction = 0.25) {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw std::invalid_argument("residual_decay_check: tail_fraction must lie in (0,1)");
    CheckReport report;
    const int n = trace.length();
    if (n == 0) {
        report.note = "empty trace";
        return report;
    }
    const int tail_len = std::max(1, static_cast<int>(std::ceil(tail_fraction * n)));
    const int half_len = std::max(1, n / 2);
    double tail_max = 0.0, first_half_max = 0.0;
    for (int i = n - tail_len + 1; i <= n; ++i) tail_max = std::max(tail_max, trace.residual(i));
    for (int i = 1; i <= half_len; ++i) first_half_max = std::max(first_half_max, trace.residual(i));
    const double threshold = std::max(10.0 * trace.stop.residual_tol, 1e-8);
    report.margin = threshold - tail_max;
    const bool ok = tail_max < threshold && tail_max <= first_half_max;
    report.status = ok ? CheckStatus::pass : CheckStatus::fail;
    if (!ok && tail_max > first_half_max) report.note = "tail residual exceeds first-half residual";
    return report;
}

/// Monotone-error check: e_{n+1} <= e_n + 1e-12 for every step.
/// margin = worst per-step increase (negative when strictly decreasing).
inline CheckReport error_monotonicity_check(const IterationTrace& trace) {
    CheckReport report;
    if (!trace.errors) {
        report.note = "trace carries no errors";
        return report;
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < trace.length(); ++i)
        worst = std::max(worst, trace.error(i + 1) - trace.error(i));
    if (trace.length() <= 1) worst = 0.0;  // vacuous
    report.margin = worst;
    report.status = worst <= 1e-12 ? CheckStatus::pass : CheckStatus::fail;
    return report;
}

// ---------------------------------------------------------------------------
// Condition (A)
// ---------------------------------------------------------------------------

/// Linear gauge f(r) = slope * r.
struct LinearGauge {
    double slope = 1.0;
};

/// Piecewise-linear gauge through (0,0) and the given knots; constant
/// beyond the last knot.
struct TableGauge {
    std::vector<std::pair<double, double>> knots;  // (r, f(r)), r strictly increasing
};

/// A nondecreasing gauge f with f(0) = 0 and f(r) > 0 for r > 0, relating
/// residuals to the distance from the fixed-point set.
class ConditionAFunction {
public:
    explicit ConditionAFunction(LinearGauge g) : gauge_(g) {
        if (!(g.slope > 0.0)) throw std::invalid_argument("ConditionAFunction: slope must be > 0");
    }

    explicit ConditionAFunction(TableGauge g) : gauge_(std::move(g)) {
        const auto& knots = std::get<TableGauge>(gauge_).knots;
        if (knots.empty()) throw std::invalid_argument("ConditionAFunction: empty table");
        double prev_r = 0.0, prev_v = 0.0;
        for (const auto& [r, v] : knots) {
            if (!(r > prev_r)) throw std::invalid_argument("ConditionAFunction: knots must increase in r");
            if (v < prev_v) throw std::invalid_argument("ConditionAFunction: table must be nondecreasing");
            prev_r = r;
            prev_v = v;
        }
        // Spot-check the stated invariants on a grid across the table range.
        double span = knots.back().first;
        for (int i = 1; i <= 64; ++i) {
            double r = span * static_cast<double>(i) / 64.0;
            if (!((*this)(r) > 0.0))
                throw std::invalid_argument("ConditionAFunction: f(r) must be > 0 for r > 0");
        }
    }

    static ConditionAFunction linear(double slope) { return ConditionAFunction(LinearGauge{slope}); }

    double operator()(double r) const {
        if (r < 0.0) throw std::invalid_argument("ConditionAFunction: r must be >= 0");
        if (const auto* lin = std::get_if<LinearGauge>(&gauge_)) return lin->slope * r;
        const auto& knots = std::get<TableGauge>(gauge_).knots;
        if (r == 0.0) return 0.0;
        double r0 = 0.0, v0 = 0.0;
        for (const auto& [r1, v1] : knots) {
            if (r <= r1) return v0 + (v1 - v0) * (r - r0) / (r1 - r0);
            r0 = r1;
            v0 = v1;
        }
        return knots.back().second;  // clamp beyond the table
    }

    std::string text() const {
        if (const auto* lin = std::get_if<LinearGauge>(&gauge_))
            return std::to_string(lin->slope) + " * r";
        return "table(" + std::to_string(std::get<TableGauge>(gauge_).knots.size()) + " knots)";
    }

private:
    std::variant<LinearGauge, TableGauge> gauge_;
};

/// Check ||x_n - T x_n|| >= f(d(x_n, F(T))) - 1e-12 along the trace.
/// margin = tightest residual_n - f(dist_n) (near zero when the gauge is
/// exact for the mapping).
inline CheckReport check_condition_A(const IterationTrace& trace, const ConditionAFunction& f) {
    CheckReport report;
    if (!trace.dist_to_fixed) {
        report.note = "trace carries no distances to the fixed-point set";
        return report;
    }
    double tightest = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= trace.length(); ++n)
        tightest = std::min(tightest, trace.residual(n) - f(trace.dist(n)));
    if (trace.length() == 0) tightest = 0.0;
    report.margin = tightest;
    report.status = tightest >= -1e-12 ? CheckStatus::pass : CheckStatus::fail;
    return report;
}

/// Distance-to-fixed-set decay: d(x_n, F) must be non-increasing within
/// 1e-12 slack, and must end below 10 * stop tolerance when the run
/// stopped on the residual rule. Not applicable to diverged traces.
inline CheckReport dist_to_F_decay_check(const IterationTrace& trace) {
    CheckReport report;
    if (!trace.dist_to_fixed) {
        report.note = "trace carries no distances to the fixed-point set";
        return report;
    }
    if (trace.stop_reason == StopReason::diverged) {
        report.note = "diverged trace";
        return report;
    }
    double worst_increase = 0.0;
    for (int i = 1; i < trace.length(); ++i)
        worst_increase = std::max(worst_increase, trace.dist(i + 1) - trace.dist(i));
    bool ok = worst_increase <= 1e-12;
    if (trace.stop_reason == StopReason::residual_below_tol)
        ok = ok && trace.dist(trace.length()) < 10.0 * trace.stop.residual_tol;
    report.margin = -worst_increase;
    report.status = ok ? CheckStatus::pass : CheckStatus::fail;
    return report;
}

}  // namespace fixiter
