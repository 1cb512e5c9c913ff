#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "anlab/experiment.hpp"

namespace anlab {

struct RunOptions {
    std::optional<std::uint64_t> seed;    ///< overrides the config seed
    std::optional<std::uint64_t> trials;  ///< overrides the config trial count
    int threads = 1;
    bool with_instantaneous_expectation = false;
};

struct CommandOutput {
    std::string csv;
    /// Rows whose optimizer failed; the run still completes.
    std::size_t failed_rows = 0;
};

/// Header: m,a_over_sigma,threshold,crossover. One row per (M, a/sigma).
[[nodiscard]] CommandOutput cmd_threshold(const ExperimentSpec& spec, const RunOptions& opt);

/// Header: z_over_sigma,ser_rotated,ser_qam,ser_best,best_phase,sim_rotated,
/// ci_rotated,sim_qam,ci_qam. Requires a fixed channel.
[[nodiscard]] CommandOutput cmd_ser_curve(const ExperimentSpec& spec, const RunOptions& opt);

/// CsvRow schema. Per E_z/N0: the optimal two-point law with its region
/// label, deterministic power at both phases, and the non-informative line.
[[nodiscard]] CommandOutput cmd_power_opt(const ExperimentSpec& spec, const RunOptions& opt);

/// CsvRow schema. Per E_z/N0 over a fixed channel: optimal two-point,
/// deterministic best phase, Gaussian AN, no AN, non-informative.
[[nodiscard]] CommandOutput cmd_ser_vs_ez(const ExperimentSpec& spec, const RunOptions& opt);

/// CsvRow schema. Per E_z/N0 over Rayleigh fading: statistical two-point,
/// deterministic, Gaussian, uniform and exponential power mixtures, no AN,
/// optionally the instantaneous-design expectation, non-informative.
[[nodiscard]] CommandOutput cmd_aser(const ExperimentSpec& spec, const RunOptions& opt);

struct VerifyCheck {
    std::string category;  ///< "reference" or "agreement"
    std::string name;
    double value;
    double reference;
    double tolerance;
    bool passed;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;

    [[nodiscard]] bool all_passed() const noexcept;
    /// Header: category,check,value,reference,tolerance,status.
    [[nodiscard]] std::string csv() const;
    /// One "PASS"/"FAIL" line per check plus a summary line.
    [[nodiscard]] std::string text() const;
};

/// Published reference-value checks and analytic-vs-simulation agreement checks.
/// Agreement checks pass when |sim - analytic| <= 3 std_error * tolerance_scale;
/// reference checks scale their absolute tolerances the same way.
[[nodiscard]] VerifyReport cmd_verify(std::uint64_t seed, std::uint64_t trials, int threads,
                                      double tolerance_scale = 1.0);

/// Default trial budget of cmd_verify.
inline constexpr std::uint64_t kVerifyDefaultTrials = 1'000'000;

/// Sidecar next to an output file: config hash, seed, version, wall time.
[[nodiscard]] std::string run_manifest(const std::string& command, const std::string& config_text,
                                       std::uint64_t seed, double wall_seconds);

[[nodiscard]] std::string_view library_version() noexcept;

}  // namespace anlab
