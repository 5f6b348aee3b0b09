// fic: run fractal impedance controller experiment suites.
//
//   fic run suite.cfg --out results/ [--physics-dt 1e-4] [--jobs 4]
//   fic run suite.cfg --list
//   fic --check
//
// Exit codes: 0 success, 1 a run failed, 2 configuration or usage error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fic/selfcheck.hpp"
#include "fic/suite.hpp"

namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

int self_check() {
    bool ok = true;
    for (const fic::CheckResult& r : fic::run_self_checks()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitRunFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractal impedance controller experiment runner"};
    app.require_subcommand(0, 1);

    bool check = false;
    app.add_flag("--check", check, "Run the invariant self-test battery and exit");

    auto* run = app.add_subcommand("run", "Run every experiment in a suite file");
    std::string suite_path;
    std::string out_dir;
    double physics_dt = 0.0;
    int jobs = 1;
    bool list = false;
    run->add_option("suite", suite_path, "Suite configuration file")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--physics-dt", physics_dt, "Override the physics sub-step (s)")
        ->check(CLI::PositiveNumber);
    run->add_option("--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
    run->add_flag("--list", list, "Print the parsed suite in canonical form and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfigError;
    }

    if (check) return self_check();
    if (!run->parsed()) {
        std::cerr << app.help();
        return kExitConfigError;
    }

    std::vector<fic::ExperimentSpec> specs;
    try {
        specs = fic::load_suite(suite_path);
        if (physics_dt > 0.0) {
            for (fic::ExperimentSpec& e : specs) {
                e.sim.physics_dt = physics_dt;
                fic::validate(e);
            }
        }
    } catch (const fic::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: --physics-dt: " << e.what() << '\n';
        return kExitConfigError;
    }

    if (list) {
        std::cout << fic::format_suite(specs);
        return 0;
    }
    if (specs.empty()) std::cerr << "warning: suite '" << suite_path << "' has no experiments\n";
    if (out_dir.empty()) {
        std::cerr << "error: --out is required to run a suite\n";
        return kExitConfigError;
    }

    try {
        const int status = fic::run_suite(specs, {out_dir, jobs}, std::cerr);
        std::cerr << specs.size() << " experiment(s) written to " << out_dir << '\n';
        return status;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRunFailure;
    }
}
