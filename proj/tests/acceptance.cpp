// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL]
// line; the binary exits 0 only when every criterion holds. Expects the
// shipped experiment config as argv[1].

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixiter/fixiter.hpp"

using namespace fixiter;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> g_notes;

bool expect(bool cond, const std::string& what) {
    if (!cond && g_notes.size() < 8) g_notes.push_back(what);
    return cond;
}

IterationTrace run_half(const ProblemSpec& p, SchemeId scheme, double tol, int max_iter) {
    StopRule stop;
    stop.residual_tol = tol;
    stop.max_iter = max_iter;
    return run_iteration(scheme, p.mapping, p.default_start, Schedule::constant(0.5, 0.5, 0.5),
                         stop, p.recommended_norm);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// 1. Strict per-step ordering ky < normal_s < s < L across the whole
// parameter square, and both bound ratios below 1.
bool factors_order() {
    std::mt19937_64 rng(0x0f1e2d3cu);
    bool ok = true;
    for (int i = 0; i < 10000 && ok; ++i) {
        double L = uniform_in(rng, 0.01, 0.99);
        double lam = uniform_in(rng, 0.01, 0.99);
        double fs = per_step_factor_s(L, lam);
        double fns = per_step_factor_normal_s(L, lam);
        double fky = per_step_factor_ky(L, lam);
        ok = expect(fky + 1e-15 < fns, "ky factor not strictly below normal_s factor") && ok;
        ok = expect(fns + 1e-15 < fs, "normal_s factor not strictly below s factor") && ok;
        ok = expect(fs + 1e-15 < L, "s factor not strictly below L") && ok;
        BoundParams bp{L, lam, 1.0};
        ok = expect(bound_ratio_mk(bp, 1) < 1.0 - 1e-15, "ky/s ratio not below 1") && ok;
        ok = expect(bound_ratio_ml(bp, 1) < 1.0 - 1e-15, "ky/normal_s ratio not below 1") && ok;
    }
    return ok;
}

// 2. The closed-form ratio expressions agree with step-by-step products.
bool ratio_oracles() {
    BoundParams p{0.5, 0.5, 1.0};
    double f = 1.0 - 0.5 * 0.5;
    double qk = f * f / (1.0 - 0.5 * 0.25);
    double ql = f * f;
    double mk_oracle = 1.0, ml_oracle = 1.0;
    for (int i = 0; i < 20; ++i) {
        mk_oracle *= qk;
        ml_oracle *= ql;
    }
    double mk = bound_ratio_mk(p, 20);
    double ml = bound_ratio_ml(p, 20);
    bool ok = expect(std::fabs(mk - mk_oracle) <= 1e-6 * mk_oracle,
                     "ky/s ratio at n=20 drifts from the product oracle");
    ok = expect(std::fabs(ml - ml_oracle) <= 1e-6 * ml_oracle,
                "ky/normal_s ratio at n=20 drifts from the product oracle") && ok;
    ok = expect(mk > 1.4e-4 && mk < 1.5e-4, "ky/s ratio at n=20 outside sanity window") && ok;
    ok = expect(ml > 0.9e-5 && ml < 1.1e-5,
                "ky/normal_s ratio at n=20 outside sanity window") && ok;
    ok = expect(bound_ratio_mk(p, 0) == 1.0 && bound_ratio_ml(p, 0) == 1.0,
                "ratios at n=0 must equal 1") && ok;
    return ok;
}

// 3. On x -> x/2 with alpha = beta = 1/2 every scheme multiplies the iterate
// by an exactly representable dyadic constant.
bool one_step_multipliers() {
    const ProblemSpec& halving = *find_builtin("halving");
    Schedule half = Schedule::constant(0.5, 0.5, 0.5);
    const std::pair<SchemeId, double> expected[] = {
        {SchemeId::picard, 0.5},      {SchemeId::mann, 0.75},
        {SchemeId::ishikawa, 0.6875}, {SchemeId::s, 0.4375},
        {SchemeId::normal_s, 0.375},  {SchemeId::ky, 0.28125},
    };
    bool ok = true;
    for (const auto& [id, want] : expected) {
        Point next = scheme_step(id, halving.mapping, Point{1.0}, half, 1);
        ok = expect(std::fabs(next[0] - want) <= 1e-15,
                    std::string(scheme_name(id)) + ": one-step multiplier mismatch") &&
             ok;
    }
    return ok;
}

// 4. Observed errors stay under the closed-form bounds on every declared
// contraction, for every scheme that has a bound.
bool bounds_dominate() {
    bool ok = true;
    for (const char* name : {"halving", "shifted_thirds", "spiral3d"}) {
        const ProblemSpec& p = *find_builtin(name);
        for (SchemeId scheme : {SchemeId::s, SchemeId::normal_s, SchemeId::ky}) {
            IterationTrace t = run_half(p, scheme, 1e-300, 50);
            BoundParams bp{p.mapping.lipschitz, 0.5, t.error(1)};
            DominanceReport rep = check_bound_dominance(t, bp);
            std::string tag = std::string(name) + "/" + scheme_name(scheme);
            ok = expect(rep.status == CheckStatus::pass, tag + ": bound violated") && ok;
            ok = expect(static_cast<int>(rep.rows.size()) == t.length(),
                        tag + ": bound not checked at every iterate") &&
                 ok;
            ok = expect(rep.worst_slack >= 0.0, tag + ": negative slack") && ok;
        }
    }
    return ok;
}

// 5. Rate comparison classifies ky as faster than s and normal_s on every
// contraction problem; on the scalar problems the fitted slope matches the
// exact per-step log-ratio.
bool classified_faster() {
    struct Case {
        const char* problem;
        int max_iter;
        bool check_slope;
    };
    const Case cases[] = {
        {"halving", 40, true}, {"shifted_thirds", 40, true}, {"spiral3d", 60, false}};
    // Floor at 1e-8: errors closer to double rounding noise (absolute, at
    // the fixed point's scale) would contaminate the exact-slope fit.
    BerindeConfig bc;
    bc.noise_floor = 1e-8;
    bc.burn_in = 2;
    bool ok = true;
    for (const Case& c : cases) {
        const ProblemSpec& p = *find_builtin(c.problem);
        double L = p.mapping.lipschitz;
        IterationTrace ky = run_half(p, SchemeId::ky, 1e-300, c.max_iter);
        IterationTrace s = run_half(p, SchemeId::s, 1e-300, c.max_iter);
        IterationTrace ns = run_half(p, SchemeId::normal_s, 1e-300, c.max_iter);
        ComparisonReport vs_s = berinde_compare(ky, s, bc);
        ComparisonReport vs_ns = berinde_compare(ky, ns, bc);
        std::string tag(c.problem);
        ok = expect(vs_s.classification == SpeedClass::A_faster, tag + ": ky not faster than s") &&
             ok;
        ok = expect(vs_ns.classification == SpeedClass::A_faster,
                    tag + ": ky not faster than normal_s") &&
             ok;
        if (c.check_slope) {
            double want_s = std::log(per_step_factor_ky(L, 0.5) / per_step_factor_s(L, 0.5));
            double want_ns =
                std::log(per_step_factor_ky(L, 0.5) / per_step_factor_normal_s(L, 0.5));
            ok = expect(std::fabs(vs_s.fitted_log_slope - want_s) <= 1e-6,
                        tag + ": ky-vs-s slope off the exact log-ratio") &&
                 ok;
            ok = expect(std::fabs(vs_ns.fitted_log_slope - want_ns) <= 1e-6,
                        tag + ": ky-vs-normal_s slope off the exact log-ratio") &&
                 ok;
        }
    }
    return ok;
}

// 6. On nonexpansive problems the averaged three-step scheme still damps
// residuals monotonically, while unaveraged iteration on the quarter
// rotation provably stalls: the negative control must fail.
bool nonexpansive_guarantees() {
    bool ok = true;
    for (const char* name : {"rotation_unit", "rotation_quarter", "swap"}) {
        const ProblemSpec& p = *find_builtin(name);
        IterationTrace t = run_half(p, SchemeId::ky, 1e-12, 500);
        std::string tag(name);
        ok = expect(residual_decay_check(t).status == CheckStatus::pass,
                    tag + ": ky residual decay failed") &&
             ok;
        ok = expect(error_monotonicity_check(t).status == CheckStatus::pass,
                    tag + ": ky error monotonicity failed") &&
             ok;
    }
    IterationTrace pic = run_half(*find_builtin("rotation_quarter"), SchemeId::picard, 1e-12, 500);
    CheckReport rd = residual_decay_check(pic);
    ok = expect(rd.status == CheckStatus::fail,
                "picard on rotation_quarter must fail residual decay") &&
         ok;
    ok = expect(rd.margin < 0.0, "negative control must report a negative margin") && ok;
    return ok;
}

// 7. Every shipped problem carries a residual gauge that holds along a ky
// trace with a near-zero tightest margin, and distance to the fixed set
// decays.
bool gauges_hold() {
    bool ok = true;
    for (const ProblemSpec& p : builtin_suite()) {
        IterationTrace t = run_half(p, SchemeId::ky, 1e-12, 500);
        CheckReport ca = check_condition_A(t, *p.condition_A_f);
        ok = expect(ca.status == CheckStatus::pass, p.name + ": gauge inequality violated") && ok;
        ok = expect(ca.margin < 1e-10, p.name + ": gauge margin unexpectedly loose") && ok;
        CheckReport dd = dist_to_F_decay_check(t);
        ok = expect(dd.status == CheckStatus::pass, p.name + ": distance to F not decaying") && ok;
    }
    return ok;
}

// 8. As beta -> 0 the three-step scheme collapses to normal_s, and as
// alpha -> 0 normal_s collapses to picard, uniformly over random points.
bool edge_reductions() {
    std::mt19937_64 rng(0xacce5500u);
    bool ok = true;
    for (const ProblemSpec& p : builtin_suite()) {
        for (int i = 0; i < 10 && ok; ++i) {
            Point x = random_point(rng, p.mapping.dim(), 5.0);
            Point near_ns = ky_step(p.mapping, x, 0.5, 1e-12);
            Point ns = normal_s_step(p.mapping, x, 0.5);
            ok = expect(distance(near_ns, ns, NormKind::euclidean()) <= 1e-10,
                        p.name + ": ky with tiny beta is far from normal_s") &&
                 ok;
            Point near_pic = normal_s_step(p.mapping, x, 1e-12);
            Point pic = picard_step(p.mapping, x);
            ok = expect(distance(near_pic, pic, NormKind::euclidean()) <= 1e-10,
                        p.name + ": normal_s with tiny alpha is far from picard") &&
                 ok;
        }
    }
    return ok;
}

// 9. The shipped config runs deterministically: two runs produce
// byte-identical artifacts, with the expected pass/fail/NA roster.
bool shipped_config_reproduces(const std::string& config_path) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    fs::path base = fs::temp_directory_path() / "fixiter_acceptance";
    fs::remove_all(base);

    ExperimentConfig ca = cfg, cb = cfg;
    ca.output_dir = (base / "a").string();
    cb.output_dir = (base / "b").string();
    nlohmann::ordered_json sa = run_experiments(ca);
    nlohmann::ordered_json sb = run_experiments(cb);

    bool ok = expect(sa == sb, "summary documents differ between identical runs");

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(base / "a")) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::size_t expected_files =
        cfg.problems.size() * cfg.schemes.size() * cfg.schedules.size() + 1;
    ok = expect(files.size() == expected_files, "unexpected artifact count") && ok;
    for (const fs::path& f : files) {
        std::string bytes_a = read_file(f);
        std::string bytes_b = read_file(base / "b" / f.filename());
        ok = expect(!bytes_a.empty() && bytes_a == bytes_b,
                    f.filename().string() + ": artifacts differ between identical runs") &&
             ok;
    }

    int fails = 0, nas = 0;
    for (const auto& c : sa["checks"]) {
        std::string status = c["status"].get<std::string>();
        std::string name = c["name"].get<std::string>();
        if (status == "FAIL") {
            ++fails;
            ok = expect(name.find("/picard/") != std::string::npos &&
                            name.find("residual_decay") != std::string::npos,
                        "unexpected failing check: " + name) &&
                 ok;
        } else if (status == "NOT_APPLICABLE") {
            ++nas;
        }
    }
    ok = expect(fails == 3, "expected exactly the three picard negative controls to fail") && ok;
    ok = expect(nas == 9, "expected nine not-applicable bound checks") && ok;

    fs::remove_all(base);
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <experiment-config>\n");
        return 2;
    }
    const std::string config_path = argv[1];

    struct Criterion {
        const char* name;
        std::function<bool()> check;
    };
    const Criterion criteria[] = {
        {"per-step factors order strictly: ky < normal_s < s < L", factors_order},
        {"bound ratios match product oracles at n = 20", ratio_oracles},
        {"one-step multipliers on halving are exactly dyadic", one_step_multipliers},
        {"observed errors never exceed the closed-form bounds", bounds_dominate},
        {"ky classified faster than s and normal_s, slopes exact", classified_faster},
        {"nonexpansive guarantees hold; the negative control fails", nonexpansive_guarantees},
        {"residual gauges are tight and distances decay", gauges_hold},
        {"edge parameters collapse schemes to their simpler forms", edge_reductions},
        {"shipped config reproduces byte-identical artifacts",
         [&config_path] { return shipped_config_reproduces(config_path); }},
    };

    int failed = 0;
    int index = 0;
    for (const Criterion& c : criteria) {
        ++index;
        bool pass = false;
        g_notes.clear();
        try {
            pass = c.check();
        } catch (const std::exception& e) {
            g_notes.push_back(std::string("exception: ") + e.what());
        }
        std::printf("[%s] %d. %s\n", pass ? "PASS" : "FAIL", index, c.name);
        if (!pass) {
            ++failed;
            for (const std::string& note : g_notes) std::printf("       - %s\n", note.c_str());
        }
    }
    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
