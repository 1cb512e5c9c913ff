#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "anlab/commands.hpp"
#include "anlab/design.hpp"

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kOptimizerFailed = 3 };

int default_threads() {
    if (const char* env = std::getenv("AN_LAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
        std::cerr << "an_lab: ignoring invalid AN_LAB_THREADS='" << env << "'\n";
    }
    return 1;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw anlab::ConfigError("cannot write '" + path + "'");
    out << text;
    if (!out) throw anlab::ConfigError("write failed for '" + path + "'");
}

std::string meta_path(const std::string& out) {
    return std::filesystem::path(out).replace_extension(".meta").string();
}

/// CSV to --out (plus the .meta sidecar) or to stdout.
void emit(const std::string& out, const std::string& csv, const std::string& command, const std::string& config,
          std::uint64_t seed, std::chrono::steady_clock::time_point start) {
    if (out.empty()) {
        std::cout << csv;
        return;
    }
    write_file(out, csv);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file(meta_path(out), anlab::run_manifest(command, config, seed, wall));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Artificial-noise jamming design and simulation for M-QAM at an untrusted relay"};
    app.require_subcommand(1);

    std::string config, out;
    std::uint64_t seed = 0, trials = 0;
    int threads = default_threads();
    bool with_inst = false;
    double tolerance_scale = 1.0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", config, "Experiment config file");
        if (needs_config) c->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output CSV path (stdout when omitted)");
        sub->add_option("--seed", seed, "Override the RNG seed");
        sub->add_option("--trials", trials, "Override the simulated symbols per point");
        sub->add_option("--threads", threads, "Worker threads (default: AN_LAB_THREADS or 1)")
            ->check(CLI::PositiveNumber);
    };

    const std::array<std::string, 5> sweeps{"threshold", "ser-curve", "power-opt", "ser-vs-ez", "aser"};
    for (const auto& name : sweeps) add_common(app.add_subcommand(name, "Run the " + name + " sweep"), true);
    app.get_subcommand("aser")->add_flag("--with-instantaneous-expectation", with_inst,
                                         "Add the instantaneous-CSI design expectation curve");

    auto* verify = app.add_subcommand("verify", "Reference-value and analytic-vs-simulation checks");
    add_common(verify, false);
    verify->add_option("--tolerance-scale", tolerance_scale, "Multiply every check tolerance (test hook)")
        ->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    const auto start = std::chrono::steady_clock::now();
    auto* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    anlab::RunOptions opt;
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--trials")) opt.trials = trials;
    opt.threads = threads;
    opt.with_instantaneous_expectation = with_inst;

    try {
        if (command == "verify") {
            const std::uint64_t s = opt.seed.value_or(1);
            const auto report = anlab::cmd_verify(s, opt.trials.value_or(anlab::kVerifyDefaultTrials), threads,
                                                  tolerance_scale);
            std::cout << report.text();
            if (!out.empty()) {
                const std::string params = "verify seed=" + std::to_string(s) + " trials=" +
                                           std::to_string(opt.trials.value_or(anlab::kVerifyDefaultTrials));
                emit(out, report.csv(), command, params, s, start);
            }
            return report.all_passed() ? kOk : kVerifyFailed;
        }

        std::string text;
        const auto spec = anlab::load_experiment(config, &text);
        anlab::CommandOutput result;
        if (command == "threshold") result = anlab::cmd_threshold(spec, opt);
        else if (command == "ser-curve") result = anlab::cmd_ser_curve(spec, opt);
        else if (command == "power-opt") result = anlab::cmd_power_opt(spec, opt);
        else if (command == "ser-vs-ez") result = anlab::cmd_ser_vs_ez(spec, opt);
        else result = anlab::cmd_aser(spec, opt);
        emit(out, result.csv, command, text, opt.seed.value_or(spec.seed), start);
        if (result.failed_rows) {
            std::cerr << "an_lab: " << result.failed_rows << " row(s) flagged optimizer_failure\n";
            return kOptimizerFailed;
        }
        return kOk;
    } catch (const anlab::OptimizerError& e) {
        std::cerr << "an_lab: optimizer failure: " << e.what() << '\n';
        return kOptimizerFailed;
    } catch (const std::exception& e) {
        std::cerr << "an_lab: " << e.what() << '\n';
        return kConfigError;
    }
}
