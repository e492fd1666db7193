#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fixiter/analysis.hpp"
#include "fixiter/config.hpp"
#include "fixiter/problems.hpp"
#include "fixiter/schemes.hpp"

namespace fixiter {

/// Artifact I/O failure; the message carries the path.
class IoError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NamedSchedule {
    std::string name;
    Schedule schedule;
};

struct ExperimentConfig {
    std::vector<ProblemSpec> problems;
    std::vector<SchemeId> schemes;
    std::vector<NamedSchedule> schedules;
    StopRule stop;
    std::vector<std::pair<SchemeId, SchemeId>> comparisons;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    BerindeConfig berinde;
};

namespace detail {

/// 17 significant digits: enough for exact double round-trips, and a fixed
/// width so identical runs produce identical bytes.
inline std::string format_sig17(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
    return std::string(buf, res.ptr);
}

inline void reject_unknown_keys(const std::vector<config::Entry>& block,
                                std::initializer_list<const char*> allowed,
                                const std::string& where) {
    for (const config::Entry& e : block) {
        bool known = false;
        for (const char* k : allowed)
            if (e.key == k) known = true;
        if (!known)
            throw config::ConfigError(e.value.line, where + ": unknown key '" + e.key + "'");
    }
}

inline ScheduleRule parse_rule(const config::Node& node, const char* which) {
    if (node.type == config::NodeType::number) return ConstantRule{node.number};
    const auto& blk = node.as_block();
    reject_unknown_keys(blk, {"kind", "value", "limit", "coeff", "shift"}, which);
    const std::string& kind = config::require(blk, "kind", node.line).as_text();
    if (kind == "constant")
        return ConstantRule{config::require(blk, "value", node.line).as_number()};
    if (kind == "reciprocal") {
        ReciprocalRule r;
        r.limit = config::require(blk, "limit", node.line).as_number();
        r.coeff = config::require(blk, "coeff", node.line).as_number();
        if (const config::Node* s = config::find(blk, "shift")) r.shift = s->as_number();
        return r;
    }
    throw config::ConfigError(node.line,
                              std::string(which) + ": unknown kind '" + kind + "' (expected constant or reciprocal)");
}

}  // namespace detail

/// Parse and validate an experiment document. All failures are ConfigError
/// with the offending line.
inline ExperimentConfig parse_experiment_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<config::Entry> doc = config::parse_document(text);
    detail::reject_unknown_keys(
        doc, {"seed", "output_dir", "problems", "problem", "schemes", "schedule", "stop", "compare", "berinde"},
        "config");

    int schemes_line = 1;
    std::vector<std::pair<std::vector<std::string>, int>> raw_compare;  // (pair, line)
    std::vector<int> schedule_lines;
    int schedule_index = 0;

    for (const config::Entry& e : doc) {
        const config::Node& v = e.value;
        if (e.key == "seed") {
            double s = v.as_number();
            if (s < 0 || s != static_cast<double>(static_cast<std::uint64_t>(s)))
                throw config::ConfigError(v.line, "seed: must be a nonnegative integer");
            cfg.seed = static_cast<std::uint64_t>(s);
        } else if (e.key == "output_dir") {
            cfg.output_dir = v.as_text();
            if (cfg.output_dir.empty()) throw config::ConfigError(v.line, "output_dir: empty");
        } else if (e.key == "problems") {
            for (const config::Node& item : v.as_list()) {
                const std::string& name = item.as_text();
                const ProblemSpec* p = find_builtin(name);
                if (!p) throw config::ConfigError(item.line, "problems: unknown '" + name + "'");
                cfg.problems.push_back(*p);
            }
        } else if (e.key == "problem") {
            cfg.problems.push_back(load_problem(v));
        } else if (e.key == "schemes") {
            schemes_line = v.line;
            for (const config::Node& item : v.as_list()) {
                auto id = scheme_from_name(item.as_text());
                if (!id) throw config::ConfigError(item.line, "schemes: unknown '" + item.as_text() + "'");
                if (std::find(cfg.schemes.begin(), cfg.schemes.end(), *id) != cfg.schemes.end())
                    throw config::ConfigError(item.line, "schemes: duplicate '" + item.as_text() + "'");
                cfg.schemes.push_back(*id);
            }
        } else if (e.key == "schedule") {
            const auto& blk = v.as_block();
            detail::reject_unknown_keys(blk, {"name", "alpha", "beta", "lambda"}, "schedule");
            ++schedule_index;
            std::string name = "sched" + std::to_string(schedule_index);
            if (const config::Node* n = config::find(blk, "name")) name = n->as_text();
            if (!detail::is_slug(name))
                throw config::ConfigError(v.line, "schedule name: must use only [A-Za-z0-9_-]");
            ScheduleRule a = detail::parse_rule(config::require(blk, "alpha", v.line), "alpha");
            ScheduleRule b = detail::parse_rule(config::require(blk, "beta", v.line), "beta");
            double lambda;
            if (const config::Node* l = config::find(blk, "lambda")) {
                lambda = l->as_number();
            } else if (std::holds_alternative<ConstantRule>(a) && std::holds_alternative<ConstantRule>(b)) {
                lambda = std::min(std::get<ConstantRule>(a).c, std::get<ConstantRule>(b).c);
            } else {
                throw config::ConfigError(v.line, "schedule: lambda is required for non-constant rules");
            }
            try {
                cfg.schedules.push_back(NamedSchedule{name, Schedule(a, b, lambda)});
            } catch (const std::exception& ex) {
                throw config::ConfigError(v.line, std::string("schedule: ") + ex.what());
            }
            schedule_lines.push_back(v.line);
        } else if (e.key == "stop") {
            const auto& blk = v.as_block();
            detail::reject_unknown_keys(blk, {"residual_tol", "max_iter", "divergence_cap"}, "stop");
            if (const config::Node* n = config::find(blk, "residual_tol")) cfg.stop.residual_tol = n->as_number();
            if (const config::Node* n = config::find(blk, "max_iter")) cfg.stop.max_iter = n->as_int();
            if (const config::Node* n = config::find(blk, "divergence_cap"))
                cfg.stop.divergence_cap = n->as_number();
            try {
                cfg.stop.validate();
            } catch (const std::exception& ex) {
                throw config::ConfigError(v.line, std::string("stop: ") + ex.what());
            }
        } else if (e.key == "compare") {
            for (const config::Node& pair : v.as_list()) {
                const auto& items = pair.as_list();
                if (items.size() != 2)
                    throw config::ConfigError(pair.line, "compare: each entry must name two schemes");
                raw_compare.push_back({{items[0].as_text(), items[1].as_text()}, pair.line});
            }
        } else if (e.key == "berinde") {
            const auto& blk = v.as_block();
            detail::reject_unknown_keys(blk, {"slope_tol", "ratio_band", "noise_floor", "burn_in"}, "berinde");
            if (const config::Node* n = config::find(blk, "slope_tol")) {
                cfg.berinde.slope_tol = n->as_number();
                if (!(cfg.berinde.slope_tol > 0.0)) throw config::ConfigError(n->line, "slope_tol: must be > 0");
            }
            if (const config::Node* n = config::find(blk, "ratio_band")) {
                cfg.berinde.ratio_band = n->as_number();
                if (!(cfg.berinde.ratio_band > 1.0)) throw config::ConfigError(n->line, "ratio_band: must be > 1");
            }
            if (const config::Node* n = config::find(blk, "noise_floor")) {
                cfg.berinde.noise_floor = n->as_number();
                if (!(cfg.berinde.noise_floor >= 0.0))
                    throw config::ConfigError(n->line, "noise_floor: must be >= 0");
            }
            if (const config::Node* n = config::find(blk, "burn_in")) {
                cfg.berinde.burn_in = n->as_int();
                if (cfg.berinde.burn_in < 0) throw config::ConfigError(n->line, "burn_in: must be >= 0");
            }
        }
    }

    if (cfg.problems.empty()) throw config::ConfigError(1, "problems: empty");
    if (cfg.schemes.empty()) throw config::ConfigError(schemes_line, "schemes: empty");
    for (std::size_t i = 0; i < cfg.problems.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.problems.size(); ++j)
            if (cfg.problems[i].name == cfg.problems[j].name)
                throw config::ConfigError(1, "problems: duplicate '" + cfg.problems[i].name + "'");
    if (cfg.schedules.empty()) {
        cfg.schedules.push_back(NamedSchedule{"halfstep", Schedule::constant(0.5, 0.5, 0.5)});
        schedule_lines.push_back(1);
    }
    for (std::size_t i = 0; i < cfg.schedules.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.schedules.size(); ++j)
            if (cfg.schedules[i].name == cfg.schedules[j].name)
                throw config::ConfigError(1, "schedule: duplicate name '" + cfg.schedules[i].name + "'");

    for (const auto& [pair, line] : raw_compare) {
        std::optional<SchemeId> a = scheme_from_name(pair[0]), b = scheme_from_name(pair[1]);
        if (!a) throw config::ConfigError(line, "compare: unknown scheme '" + pair[0] + "'");
        if (!b) throw config::ConfigError(line, "compare: unknown scheme '" + pair[1] + "'");
        if (*a == *b) throw config::ConfigError(line, "compare: identical schemes '" + pair[0] + "'");
        for (SchemeId id : {*a, *b})
            if (std::find(cfg.schemes.begin(), cfg.schemes.end(), id) == cfg.schemes.end())
                throw config::ConfigError(
                    line, "compare: scheme '" + std::string(scheme_name(id)) + "' is not in schemes");
        cfg.comparisons.push_back({*a, *b});
    }

    // Schedules must respect lambda <= value < 1 over the whole run; probe
    // every n that can occur so violations surface here, line-anchored,
    // instead of mid-run.
    for (std::size_t i = 0; i < cfg.schedules.size(); ++i) {
        const NamedSchedule& ns = cfg.schedules[i];
        int horizon = std::min(cfg.stop.max_iter, 100000);
        try {
            for (int n = 1; n <= horizon; ++n) {
                (void)ns.schedule.alpha(n);
                (void)ns.schedule.beta(n);
            }
        } catch (const std::exception& ex) {
            throw config::ConfigError(schedule_lines[i], "schedule '" + ns.name + "': " + ex.what());
        }
    }
    return cfg;
}

/// Read and parse a config file; parse/validation errors gain a
/// "<file>:<line>:" prefix.
inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return parse_experiment_config(text);
    } catch (const config::ConfigError& e) {
        throw std::runtime_error(e.anchored(path));
    }
}

/// Write one trace as CSV: header n,x0..,error,residual,dist_to_F; one row
/// per iterate; empty cells where the trace has no errors/distances.
inline void emit_trace_csv(const IterationTrace& trace, const std::filesystem::path& path) {
    if (trace.length() == 0) throw std::invalid_argument("emit_trace_csv: empty trace");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const std::size_t dim = trace.iterates.front().dim();
    out << "n";
    for (std::size_t i = 0; i < dim; ++i) out << ",x" << i;
    out << ",error,residual,dist_to_F\n";
    for (int n = 1; n <= trace.length(); ++n) {
        out << n;
        for (std::size_t i = 0; i < dim; ++i) out << ',' << detail::format_sig17(trace.iterate(n)[i]);
        out << ',';
        if (trace.errors) out << detail::format_sig17(trace.error(n));
        out << ',' << detail::format_sig17(trace.residual(n)) << ',';
        if (trace.dist_to_fixed) out << detail::format_sig17(trace.dist(n));
        out << '\n';
    }
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

namespace detail {

inline nlohmann::ordered_json json_number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

struct RunRecord {
    std::string problem, scheme, schedule;
    const ProblemSpec* spec = nullptr;
    IterationTrace trace;
    std::string csv_name;
};

inline nlohmann::ordered_json check_entry(const std::string& name, CheckStatus status, double margin,
                                          const std::string& note) {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["status"] = check_status_name(status);
    j["margin"] = json_number(margin);
    if (!note.empty()) j["note"] = note;
    return j;
}

inline void append_run_checks(nlohmann::ordered_json& checks, const RunRecord& r,
                              double schedule_lambda) {
    const std::string base = r.problem + "/" + r.scheme + "/" + r.schedule + "/";
    const IterationTrace& t = r.trace;

    if (t.stop_reason == StopReason::diverged) {
        if (bound_for_scheme(t.scheme))
            checks.push_back(
                check_entry(base + "bound_dominance", CheckStatus::not_applicable, 0.0, "run diverged"));
        for (const char* nm : {"residual_decay", "error_monotonicity", "condition_A", "dist_to_F_decay"})
            checks.push_back(check_entry(base + nm, CheckStatus::not_applicable, 0.0, "run diverged"));
        return;
    }

    if (bound_for_scheme(t.scheme)) {
        if (r.spec->mapping.declared_class != MappingClass::contraction) {
            checks.push_back(check_entry(base + "bound_dominance", CheckStatus::not_applicable, 0.0,
                                         "mapping is not a declared contraction"));
        } else if (!t.errors) {
            checks.push_back(check_entry(base + "bound_dominance", CheckStatus::not_applicable, 0.0,
                                         "trace carries no errors"));
        } else {
            BoundParams params{r.spec->mapping.lipschitz, schedule_lambda, t.error(1)};
            DominanceReport rep = check_bound_dominance(t, params);
            checks.push_back(check_entry(base + "bound_dominance", rep.status, rep.worst_slack, rep.note));
        }
    }

    CheckReport rd = residual_decay_check(t);
    checks.push_back(check_entry(base + "residual_decay", rd.status, rd.margin, rd.note));

    CheckReport mono = error_monotonicity_check(t);
    checks.push_back(check_entry(base + "error_monotonicity", mono.status, mono.margin, mono.note));

    if (r.spec->condition_A_f) {
        CheckReport ca = check_condition_A(t, *r.spec->condition_A_f);
        std::string note = ca.note.empty() ? "f(r) = " + r.spec->condition_A_f->text() : ca.note;
        checks.push_back(check_entry(base + "condition_A", ca.status, ca.margin, note));
    } else {
        checks.push_back(check_entry(base + "condition_A", CheckStatus::not_applicable, 0.0,
                                     "no known gauge for this problem"));
    }

    CheckReport dd = dist_to_F_decay_check(t);
    checks.push_back(check_entry(base + "dist_to_F_decay", dd.status, dd.margin, dd.note));
}

}  // namespace detail

/// Execute the full grid, write one CSV per run plus summary.json into
/// cfg.output_dir, and return the summary document. Deterministic: the
/// same config and seed produce byte-identical artifacts.
inline nlohmann::ordered_json run_experiments(const ExperimentConfig& cfg) {
    namespace fs = std::filesystem;
    fs::path out_dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output_dir '" + cfg.output_dir + "': " + ec.message());

    std::vector<detail::RunRecord> runs;
    std::map<std::string, double> schedule_lambda;
    for (const ProblemSpec& p : cfg.problems)
        for (const NamedSchedule& ns : cfg.schedules)
            for (SchemeId scheme : cfg.schemes) {
                detail::RunRecord r;
                r.problem = p.name;
                r.scheme = scheme_name(scheme);
                r.schedule = ns.name;
                r.spec = &p;
                r.trace = run_iteration(scheme, p.mapping, p.default_start, ns.schedule, cfg.stop,
                                        p.recommended_norm);
                r.csv_name = r.problem + "__" + r.scheme + "__" + r.schedule + ".csv";
                schedule_lambda[ns.name] = ns.schedule.lambda();
                runs.push_back(std::move(r));
            }

    std::sort(runs.begin(), runs.end(), [](const detail::RunRecord& a, const detail::RunRecord& b) {
        return std::tie(a.problem, a.scheme, a.schedule) < std::tie(b.problem, b.scheme, b.schedule);
    });

    for (const detail::RunRecord& r : runs) emit_trace_csv(r.trace, out_dir / r.csv_name);

    auto find_run = [&](const std::string& prob, SchemeId scheme,
                        const std::string& sched) -> const detail::RunRecord& {
        for (const detail::RunRecord& r : runs)
            if (r.problem == prob && r.scheme == scheme_name(scheme) && r.schedule == sched) return r;
        throw std::logic_error("run lookup failed");  // unreachable: grid is complete
    };

    nlohmann::ordered_json summary;
    summary["schema_version"] = "1";
    summary["seed"] = cfg.seed;
    summary["runs"] = nlohmann::ordered_json::array();
    summary["comparisons"] = nlohmann::ordered_json::array();
    summary["checks"] = nlohmann::ordered_json::array();

    for (const detail::RunRecord& r : runs) {
        nlohmann::ordered_json j;
        j["name"] = r.problem + "/" + r.scheme + "/" + r.schedule;
        j["problem"] = r.problem;
        j["scheme"] = r.scheme;
        j["schedule"] = r.schedule;
        j["norm"] = r.spec->recommended_norm.name();
        j["uniformly_convex_norm"] = r.spec->recommended_norm.uniformly_convex();
        j["iterations"] = r.trace.length();
        j["stop_reason"] = stop_reason_name(r.trace.stop_reason);
        j["final_residual"] = detail::json_number(r.trace.residual(r.trace.length()));
        j["final_error"] =
            r.trace.errors ? detail::json_number(r.trace.error(r.trace.length())) : nlohmann::ordered_json(nullptr);
        j["final_dist_to_F"] = r.trace.dist_to_fixed
                                   ? detail::json_number(r.trace.dist(r.trace.length()))
                                   : nlohmann::ordered_json(nullptr);
        j["degenerate_identity"] = r.spec->mapping.degenerate_identity();
        j["csv"] = r.csv_name;
        summary["runs"].push_back(std::move(j));
    }

    // Comparison grid: every requested pair on every problem x schedule.
    std::vector<std::tuple<std::string, std::string, SchemeId, SchemeId>> comp_keys;
    for (const ProblemSpec& p : cfg.problems)
        for (const NamedSchedule& ns : cfg.schedules)
            for (const auto& [a, b] : cfg.comparisons) comp_keys.push_back({p.name, ns.name, a, b});
    std::sort(comp_keys.begin(), comp_keys.end(), [](const auto& x, const auto& y) {
        return std::tie(std::get<0>(x), std::get<1>(x), std::get<2>(x), std::get<3>(x)) <
               std::tie(std::get<0>(y), std::get<1>(y), std::get<2>(y), std::get<3>(y));
    });
    for (const auto& [prob, sched, a, b] : comp_keys) {
        nlohmann::ordered_json j;
        j["problem"] = prob;
        j["schedule"] = sched;
        j["a"] = scheme_name(a);
        j["b"] = scheme_name(b);
        const detail::RunRecord& ra = find_run(prob, a, sched);
        const detail::RunRecord& rb = find_run(prob, b, sched);
        if (ra.spec->mapping.degenerate_identity()) {
            j["classification"] = speed_class_name(SpeedClass::inconclusive);
            j["note"] = "degenerate identity mapping: rate comparison skipped";
        } else {
            ComparisonReport rep = berinde_compare(ra.trace, rb.trace, cfg.berinde);
            j["classification"] = speed_class_name(rep.classification);
            j["fitted_log_slope"] = detail::json_number(rep.fitted_log_slope);
            j["window_first"] = rep.window_first;
            j["window_last"] = rep.window_last;
            if (!rep.note.empty()) j["note"] = rep.note;
        }
        summary["comparisons"].push_back(std::move(j));
    }

    for (const detail::RunRecord& r : runs)
        detail::append_run_checks(summary["checks"], r, schedule_lambda.at(r.schedule));

    fs::path summary_path = out_dir / "summary.json";
    std::ofstream out(summary_path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + summary_path.string() + "' for writing");
    out << summary.dump(2) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for '" + summary_path.string() + "'");
    return summary;
}

}  // namespace fixiter
