#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace fixiter {

/// Constant rule: value_n = c for every n.
struct ConstantRule {
    double c = 0.5;
};

/// Reciprocal ramp: value_n = limit - coeff / (n + shift).
/// With coeff > 0 this rises toward `limit`; with coeff < 0 it decays.
struct ReciprocalRule {
    double limit = 0.9;
    double coeff = 0.4;
    double shift = 1.0;
};

using ScheduleRule = std::variant<ConstantRule, ReciprocalRule>;

inline double rule_value(const ScheduleRule& r, int n) {
    if (const auto* c = std::get_if<ConstantRule>(&r)) return c->c;
    const auto& rec = std::get<ReciprocalRule>(r);
    return rec.limit - rec.coeff / (static_cast<double>(n) + rec.shift);
}

inline std::string rule_text(const ScheduleRule& r) {
    if (const auto* c = std::get_if<ConstantRule>(&r)) return std::to_string(c->c);
    const auto& rec = std::get<ReciprocalRule>(r);
    return std::to_string(rec.limit) + " - " + std::to_string(rec.coeff) + "/(n+" +
           std::to_string(rec.shift) + ")";
}

/// Parameter sequences {alpha_n} and {beta_n} with a declared lower bound
/// lambda: 0 < lambda <= alpha_n, beta_n < 1 for every generated n. The
/// bound is enforced lazily, at each n a driver actually requests.
class Schedule {
public:
    Schedule(ScheduleRule alpha, ScheduleRule beta, double lambda)
        : alpha_(std::move(alpha)), beta_(std::move(beta)), lambda_(lambda) {
        if (!(lambda > 0.0 && lambda < 1.0))
            throw std::invalid_argument("Schedule: lambda must lie in (0,1)");
    }

    static Schedule constant(double alpha, double beta, double lambda) {
        return Schedule(ConstantRule{alpha}, ConstantRule{beta}, lambda);
    }

    double alpha(int n) const { return checked(rule_value(alpha_, n), n, "alpha"); }
    double beta(int n) const { return checked(rule_value(beta_, n), n, "beta"); }
    double lambda() const { return lambda_; }

    const ScheduleRule& alpha_rule() const { return alpha_; }
    const ScheduleRule& beta_rule() const { return beta_; }

private:
    double checked(double v, int n, const char* which) const {
        if (!(v >= lambda_ && v < 1.0))
            throw std::invalid_argument(std::string("Schedule: ") + which + "_" +
                                        std::to_string(n) + " = " + std::to_string(v) +
                                        " violates lambda <= value < 1");
        return v;
    }

    ScheduleRule alpha_;
    ScheduleRule beta_;
    double lambda_;
};

}  // namespace fixiter
