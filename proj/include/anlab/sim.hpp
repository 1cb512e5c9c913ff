#pragma once

#include <cstdint>
#include <optional>
#include <variant>

#include "anlab/design.hpp"
#include "anlab/rng.hpp"
#include "anlab/ser.hpp"

namespace anlab {

/// Monte Carlo error-rate estimate with a 95% normal-approximation interval.
struct SerEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0;
    std::uint64_t n_trials = 0;
    /// Symbol errors. Zero for estimates that average analytic values
    /// rather than count errors (see simulate_instantaneous_design_over_fading).
    std::uint64_t n_errors = 0;

    /// Binomial interval: 1.96 sqrt(mean (1 - mean) / n).
    static SerEstimate from_counts(std::uint64_t errors, std::uint64_t trials);

    [[nodiscard]] double std_error() const noexcept { return half_width_95 / 1.96; }
};

namespace an {

struct None {};

/// Constant power; theta_z absolute, or uniformly random when empty.
struct Deterministic {
    double power = 0.0;
    std::optional<double> theta_z;
};

/// Theorem-style two-level law. Level phases come from the law's
/// PhaseChoice relative to the given channel phases; an empty phase in the
/// law means a uniformly random phase.
struct TwoPoint {
    TwoPointPowerLaw law;
    double theta_h = 0.0;
    double theta_g = 0.0;
};

/// z ~ CN(0, mean_power).
struct Gaussian {
    double mean_power = 0.0;
};

/// |z|^2 ~ U(0, 2P), uniform phase.
struct UniformPower {
    double mean_power = 0.0;
};

/// |z|^2 ~ Exp(mean P), uniform phase.
struct ExponentialPower {
    double mean_power = 0.0;
};

}  // namespace an

using AnGenerator =
    std::variant<an::None, an::Deterministic, an::TwoPoint, an::Gaussian, an::UniformPower, an::ExponentialPower>;

/// Declared mean AN power E{|z|^2} of a generator.
[[nodiscard]] double declared_power(const AnGenerator& gen) noexcept;

/// Deterministic AN that lands at relative phase theta for this channel.
[[nodiscard]] AnGenerator deterministic_at_phase(double power, double theta, const ChannelRealization& ch);

/// Two-point AN generator for a design made against this channel.
[[nodiscard]] AnGenerator two_point_for_channel(const TwoPointPowerLaw& law, const ChannelRealization& ch);

[[nodiscard]] cdouble draw_an_symbol(const AnGenerator& gen, Philox& rng);

/// Trials per RNG substream; shards are cut on these boundaries so results
/// do not depend on the number of worker threads.
inline constexpr std::uint64_t kTrialsPerShard = 1u << 15;

/// Symbol-level simulation of y = h m + g z + n with coherent detection at
/// the relay, for fixed h and g. Requires n >= 10^4.
[[nodiscard]] SerEstimate simulate_ser_fixed_channel(const InstantaneousContext& ctx, const AnGenerator& gen,
                                                     std::uint64_t n, const RngSpec& rng, int threads = 1);

/// Quasi-static Rayleigh fading: h ~ CN(0, sigma_h^2), g ~ CN(0, sigma_g^2)
/// drawn once per block. With one symbol per block the interval is the
/// binomial one; with longer blocks it is computed from the spread of the
/// per-block error rates, since errors within a block are correlated.
/// Requires n_blocks >= 10^3.
[[nodiscard]] SerEstimate simulate_aser_rayleigh(const StatisticalContext& sctx, const AnGenerator& gen,
                                                 std::uint64_t n_blocks, std::uint64_t symbols_per_block,
                                                 const RngSpec& rng, int threads = 1);

/// Monte Carlo average over Rayleigh channel draws of the optimized
/// instantaneous two-point objective. Requires n_channel_draws >= 200.
/// Throws OptimizerError naming the failing draw index.
[[nodiscard]] SerEstimate simulate_instantaneous_design_over_fading(const StatisticalContext& sctx, double p_bar,
                                                                    std::uint64_t n_channel_draws,
                                                                    const RngSpec& rng, int threads = 1);

}  // namespace anlab
