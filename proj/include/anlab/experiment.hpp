#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "anlab/qam.hpp"

namespace anlab {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inclusive arithmetic sweep. Points are start + i * step, never accumulated.
struct Sweep {
    double start = 0.0;
    double stop = 0.0;
    double step = 1.0;

    [[nodiscard]] std::vector<double> values() const;
};

enum class DesignKind { TwoPoint, Deterministic, Gaussian, UniformPower, ExponentialPower, None };

[[nodiscard]] std::string_view to_string(DesignKind k) noexcept;
/// Throws ConfigError for unknown names.
[[nodiscard]] DesignKind parse_design_kind(std::string_view name);

struct FixedChannel {
    cdouble h{1.0, 0.0};
    cdouble g{1.0, 0.0};
};

struct RayleighChannel {
    double sigma_h_sq = 1.0;
    double sigma_g_sq = 1.0;
};

using ChannelSpec = std::variant<FixedChannel, RayleighChannel>;

/// One experiment. Every field has a default, so a config only states what
/// differs. N0 = 1 and T_m = 1, so E_z/N0 in linear units is the mean AN power.
struct ExperimentSpec {
    std::string name = "experiment";
    int modulation = 16;
    double em_over_n0_db = 20.0;
    Sweep ez_over_n0_db{-5.0, 25.0, 0.5};
    ChannelSpec channel = FixedChannel{};
    std::vector<DesignKind> designs{DesignKind::TwoPoint};
    /// Symbols per simulated curve point; 0 disables simulation.
    std::uint64_t trials = 0;
    std::uint64_t seed = 1;
    std::uint64_t symbols_per_block = 100;
    std::uint64_t instantaneous_draws = 200;

    std::vector<int> threshold_orders{4, 16, 64};
    Sweep threshold_a_over_sigma{0.5, 10.0, 0.5};

    /// Empty means derive a/sigma from em_over_n0_db.
    std::optional<double> curve_a_over_sigma;
    Sweep curve_z_over_sigma{0.0, 20.0, 0.25};

    [[nodiscard]] bool has_design(DesignKind k) const noexcept;
};

/// INI-style text: [section] headers with key = value lines; ';' and '#'
/// begin whole-line comments. Unknown sections or keys are rejected. Throws ConfigError.
[[nodiscard]] ExperimentSpec parse_experiment(const std::string& text);

/// Reads and parses a config file. Throws ConfigError.
[[nodiscard]] ExperimentSpec load_experiment(const std::string& path, std::string* raw_text = nullptr);

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Six significant digits, '.' separator, locale independent; NaN and
/// empty optionals render as the empty string.
[[nodiscard]] std::string format_number(double v);
[[nodiscard]] std::string format_number(std::optional<double> v);

/// One line of the sweep CSVs (power-opt, ser-vs-ez, aser).
struct CsvRow {
    double ez_over_n0_db = 0.0;
    std::string design;
    std::optional<double> x1, x2, p;
    std::string phase1, phase2;
    std::optional<double> ser_analytic, ser_sim, ci_half_width;
    std::string region_label;

    static std::string_view header() noexcept;
    [[nodiscard]] std::string to_csv() const;
};

/// Builds CSV text from a header and already formatted fields.
class CsvWriter {
public:
    explicit CsvWriter(std::string_view header);
    void row(const std::vector<std::string>& fields);
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

private:
    std::string text_;
};

}  // namespace anlab
