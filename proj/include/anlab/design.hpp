#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "anlab/ser.hpp"

namespace anlab {

/// Raised when the amplitude optimizer cannot produce a finite design.
class OptimizerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Mixture of two AN power levels x1 <= P <= x2, the upper one drawn with
/// probability p = (P - x1) / (x2 - x1). A phase of std::nullopt means the
/// phase is drawn uniformly at random (statistical-CSI designs).
class TwoPointPowerLaw {
public:
    /// Throws std::invalid_argument unless 0 <= x1 <= P <= x2.
    static TwoPointPowerLaw make(double x1, double x2, double p_bar,
                                 std::optional<PhaseChoice> phase1,
                                 std::optional<PhaseChoice> phase2);
    static TwoPointPowerLaw deterministic(double p_bar, std::optional<PhaseChoice> phase);

    [[nodiscard]] double x1() const noexcept { return x1_; }
    [[nodiscard]] double x2() const noexcept { return x2_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double p_bar() const noexcept { return p_bar_; }
    [[nodiscard]] std::optional<PhaseChoice> phase1() const noexcept { return phase1_; }
    [[nodiscard]] std::optional<PhaseChoice> phase2() const noexcept { return phase2_; }
    [[nodiscard]] bool is_deterministic() const noexcept { return x1_ == x2_; }

    /// (1 - p) x1 + p x2.
    [[nodiscard]] double expected_power() const noexcept;

private:
    TwoPointPowerLaw() = default;
    double x1_ = 0.0, x2_ = 0.0, p_ = 1.0, p_bar_ = 0.0;
    std::optional<PhaseChoice> phase1_, phase2_;
};

struct DesignReport {
    TwoPointPowerLaw law;
    double achieved_ser;
    int iterations;
    /// achieved - oracle, filled in only when a grid oracle was run.
    std::optional<double> oracle_gap;
};

/// Error rate as a function of AN power x = |z|^2 (SER~(sqrt(x)) or ASER(x)).
using PowerResponse = std::function<double(double)>;

[[nodiscard]] PowerResponse instantaneous_response(const InstantaneousContext& ctx);
[[nodiscard]] PowerResponse statistical_response(const StatisticalContext& sctx);

struct PhaseThreshold {
    /// |z|/sigma where SER(pi/4) = SER(0); 0 when there is no crossover.
    double value;
    /// false when QAM phase selection dominates over the whole bracket.
    bool crossover;
};

/// Crossover of the two phase selections with h = g = 1 and sigma = 1,
/// searched on [0, 100 a/sigma] and refined to 1e-6 absolute.
[[nodiscard]] PhaseThreshold phase_threshold(double a_over_sigma, int m);

struct OracleResult {
    double x1;
    double x2;
    double value;
};

/// Exhaustive pair search over a hybrid linear/geometric grid with
/// x1 in [0, P] and x2 in [P, max(16 P, P + 64 sigma^2)].
[[nodiscard]] OracleResult grid_oracle(double p_bar, double noise_variance,
                                       const PowerResponse& response, int grid_size);
[[nodiscard]] OracleResult grid_oracle(double p_bar, const InstantaneousContext& ctx, int grid_size);
[[nodiscard]] OracleResult grid_oracle(double p_bar, const StatisticalContext& sctx, int grid_size);

/// Maximizes the two-point mixture of `response` under mean power p_bar.
/// Phases in the returned law are left empty.
[[nodiscard]] DesignReport optimize_two_point(double p_bar, double noise_variance,
                                              const PowerResponse& response,
                                              std::span<const std::pair<double, double>> extra_starts = {});

[[nodiscard]] DesignReport optimize_two_point_instantaneous(double p_bar, const InstantaneousContext& ctx);
[[nodiscard]] DesignReport optimize_two_point_statistical(double p_bar, const StatisticalContext& sctx);

/// A ready-to-transmit AN design: the power law plus absolute AN phases
/// theta_z for each level (theta_h - theta_g, plus pi/4 for QAM selection).
struct AnDesign {
    DesignReport report;
    double theta_z1;
    double theta_z2;
};

[[nodiscard]] AnDesign design_instantaneous(double p_bar, const InstantaneousContext& ctx);

/// Absolute AN phase realizing `phase` for the given channel.
[[nodiscard]] double absolute_an_phase(PhaseChoice phase, const ChannelRealization& ch) noexcept;

enum class Region { I, II, III, IV, V };

[[nodiscard]] std::string_view to_string(Region r) noexcept;

/// Labels an increasing-ANR sweep of instantaneous designs:
///   I   no AN at x1, rotated QAM at x2, p constant while x2 grows
///   II  no AN at x1, rotated QAM at x2, x2 constant while p grows
///   III deterministic power, rotated QAM
///   IV  rotated QAM at x1 and QAM at x2
///   V   deterministic power, QAM
/// "Constant" means a relative change below 1% against the adjacent point.
/// Throws std::invalid_argument for fewer than 3 points.
[[nodiscard]] std::vector<Region> region_classify(std::span<const DesignReport> sweep);

}  // namespace anlab
