#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fixiter/point.hpp"

namespace fixiter {

/// The six iteration processes. `ky` is the three-step scheme: two Mann
/// averaging stages followed by a direct application of T.
enum class SchemeId { picard, mann, ishikawa, s, normal_s, ky };

inline const char* scheme_name(SchemeId s) {
    switch (s) {
        case SchemeId::picard: return "picard";
        case SchemeId::mann: return "mann";
        case SchemeId::ishikawa: return "ishikawa";
        case SchemeId::s: return "s";
        case SchemeId::normal_s: return "normal_s";
        default: return "ky";
    }
}

inline std::optional<SchemeId> scheme_from_name(const std::string& name) {
    for (SchemeId s : {SchemeId::picard, SchemeId::mann, SchemeId::ishikawa, SchemeId::s,
                       SchemeId::normal_s, SchemeId::ky})
        if (name == scheme_name(s)) return s;
    return std::nullopt;
}

/// When to stop an otherwise infinite iteration. The residual ||x - Tx|| is
/// the scheme-intrinsic certificate, available even when no fixed point is
/// known. An absent divergence cap defaults to 1e12 * (1 + ||x1||) at run
/// time; a contraction that trips it was misdeclared.
struct StopRule {
    double residual_tol = 1e-10;
    int max_iter = 500;
    std::optional<double> divergence_cap;  // nullopt = automatic

    void validate() const {
        if (!(residual_tol > 0.0)) throw std::invalid_argument("StopRule: residual_tol must be > 0");
        if (max_iter < 1) throw std::invalid_argument("StopRule: max_iter must be >= 1");
        if (divergence_cap && !(*divergence_cap > 0.0))
            throw std::invalid_argument("StopRule: divergence_cap must be > 0");
    }
};

enum class StopReason { residual_below_tol, max_iter, diverged };

inline const char* stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::residual_below_tol: return "residual_below_tol";
        case StopReason::max_iter: return "max_iter";
        default: return "diverged";
    }
}

/// Record of one run: iterates x_1..x_N and the derived scalar sequences.
/// Indexing is 1-based to keep trace index n aligned with the bound
/// exponents; iterate(n) returns x_n.
struct IterationTrace {
    SchemeId scheme = SchemeId::picard;
    NormKind norm_kind = NormKind::euclidean();
    std::vector<Point> iterates;
    std::vector<double> residuals;                     // ||x_n - T x_n||
    std::optional<std::vector<double>> errors;         // ||x_n - p|| when p known
    std::optional<Point> reference_point;              // the p above
    std::optional<std::vector<double>> dist_to_fixed;  // d(x_n, F(T)) when F known
    StopReason stop_reason = StopReason::max_iter;
    StopRule stop;  // rule that was in effect (checks consult its tolerance)

    int length() const { return static_cast<int>(iterates.size()); }
    const Point& iterate(int n) const { return iterates.at(static_cast<std::size_t>(n - 1)); }
    double residual(int n) const { return residuals.at(static_cast<std::size_t>(n - 1)); }
    double error(int n) const { return errors.value().at(static_cast<std::size_t>(n - 1)); }
    double dist(int n) const { return dist_to_fixed.value().at(static_cast<std::size_t>(n - 1)); }

    void check_consistent() const {
        const std::size_t n = iterates.size();
        if (residuals.size() != n) throw std::logic_error("IterationTrace: residual length mismatch");
        if (errors && errors->size() != n) throw std::logic_error("IterationTrace: error length mismatch");
        if (dist_to_fixed && dist_to_fixed->size() != n)
            throw std::logic_error("IterationTrace: dist length mismatch");
    }
};

}  // namespace fixiter
