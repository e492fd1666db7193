// fixiter: run fixed-point iteration experiments from a config file.
//
//   fixiter run <config> [--output-dir DIR] [--seed N]
//   fixiter validate <config>
//   fixiter list-problems
//
// Exit codes: 0 success, 1 config/validation failure, 2 unwritable output.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fixiter/fixiter.hpp"

namespace {

std::string fmt_point(const fixiter::Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.dim(); ++i) {
        if (i) s += ", ";
        s += std::to_string(p[i]);
    }
    return s + ")";
}

void list_problems() {
    for (const fixiter::ProblemSpec& p : fixiter::builtin_suite()) {
        std::cout << p.name << "\n";
        std::cout << "  dim: " << p.mapping.dim() << "\n";
        if (p.mapping.declared_class == fixiter::MappingClass::contraction)
            std::cout << "  class: contraction (L = " << p.mapping.lipschitz << ")\n";
        else
            std::cout << "  class: nonexpansive\n";
        if (p.mapping.fixed_points)
            std::cout << "  fixed set: " << fixiter::describe(*p.mapping.fixed_points) << "\n";
        std::cout << "  start: " << fmt_point(p.default_start) << "\n";
        if (p.condition_A_f) std::cout << "  gauge: f(r) = " << p.condition_A_f->text() << "\n";
        if (!p.domain_note.empty()) std::cout << "  domain: " << p.domain_note << "\n";
    }
}

int run_command(const std::string& config_path, const std::string& output_dir_override,
                std::int64_t seed_override, bool have_seed) {
    fixiter::ExperimentConfig cfg;
    try {
        cfg = fixiter::load_experiment_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    if (!output_dir_override.empty()) cfg.output_dir = output_dir_override;
    if (have_seed) cfg.seed = static_cast<std::uint64_t>(seed_override);

    try {
        nlohmann::ordered_json summary = fixiter::run_experiments(cfg);
        int pass = 0, fail = 0, na = 0;
        for (const auto& c : summary["checks"]) {
            std::string st = c["status"];
            if (st == "PASS") ++pass;
            else if (st == "FAIL") ++fail;
            else ++na;
        }
        std::cout << summary["runs"].size() << " runs, " << summary["comparisons"].size()
                  << " comparisons; checks: " << pass << " pass, " << fail << " fail, " << na
                  << " not applicable\n";
        std::cout << "artifacts in " << cfg.output_dir << "\n";
        return 0;
    } catch (const fixiter::IoError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

int validate_command(const std::string& config_path) {
    try {
        fixiter::ExperimentConfig cfg = fixiter::load_experiment_config(config_path);
        std::cout << "config OK: " << cfg.problems.size() << " problems, " << cfg.schemes.size()
                  << " schemes, " << cfg.schedules.size() << " schedules, " << cfg.comparisons.size()
                  << " comparisons\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fixed-point iteration experiment runner"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::int64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "run all experiments in a config file");
    run->add_option("config", config_path, "experiment config file")->required();
    run->add_option("--output-dir", output_dir, "override the config's output_dir");
    CLI::Option* seed_opt = run->add_option("--seed", seed, "override the config's seed");

    CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
    std::string validate_path;
    validate->add_option("config", validate_path, "experiment config file")->required();

    app.add_subcommand("list-problems", "describe the built-in problem suite");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (run->parsed()) return run_command(config_path, output_dir, seed, seed_opt->count() > 0);
    if (validate->parsed()) return validate_command(validate_path);
    list_problems();
    return 0;
}
