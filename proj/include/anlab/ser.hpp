#pragma once

#include <string_view>

#include "anlab/qam.hpp"

namespace anlab {

/// AN phase relative to the equalized constellation. RotatedQam pushes
/// along the axes (theta = 0), Qam along the diagonals (theta = pi/4).
enum class PhaseChoice { RotatedQam, Qam };

[[nodiscard]] double phase_angle(PhaseChoice p) noexcept;
[[nodiscard]] std::string_view to_string(PhaseChoice p) noexcept;

/// Everything the instantaneous-CSI error rate depends on.
struct InstantaneousContext {
    Constellation constellation;
    ChannelRealization channel;
    NoiseModel noise;

    /// |h| a / sigma.
    [[nodiscard]] double signal_margin() const noexcept;
};

struct ChannelStatistics {
    double sigma_h_sq = 1.0;
    double sigma_g_sq = 1.0;
};

/// Long-term CSI. The symbol energy is taken from the constellation geometry.
struct StatisticalContext {
    Constellation constellation;
    ChannelStatistics stats;
    NoiseModel noise;

    [[nodiscard]] double symbol_energy() const noexcept { return constellation.symbol_energy(); }

    /// sigma_h^2 (E_m / T_m) / (sigma_g^2 x + 2 sigma^2).
    [[nodiscard]] double average_snr(double an_power) const noexcept;
};

/// Throws std::invalid_argument if any variance or the energy is non-positive.
void validate(const StatisticalContext& sctx);

/// Exact square-QAM SER at the relay for an effective (equalized) AN
/// sample s = h* g z / |h|, averaged over uniformly distributed symbols.
[[nodiscard]] double ser_given_s(cdouble s, const InstantaneousContext& ctx) noexcept;

/// SER as a function of the relative AN phase theta = theta_g - theta_h + theta_z
/// and the AN amplitude |z|.
[[nodiscard]] double ser_phase_amp(double theta, double z_amp, const InstantaneousContext& ctx) noexcept;

struct PhasedSer {
    double value;
    PhaseChoice phase;
};

/// The better of the two candidate phases; equal values go to RotatedQam.
[[nodiscard]] PhasedSer ser_best_phase(double z_amp, const InstantaneousContext& ctx) noexcept;

/// (M - 1) / M, the error rate of blind guessing.
[[nodiscard]] double non_informative_ser(int m);

/// AWGN-only SER, 4cQ(|h|a/sigma) - 4c^2 Q^2(|h|a/sigma).
[[nodiscard]] double ser_awgn(const InstantaneousContext& ctx) noexcept;

/// Weight on the larger power, p = (P - x1) / (x2 - x1); 1 for x1 == x2.
/// Throws std::invalid_argument unless 0 <= x1 <= P <= x2.
[[nodiscard]] double upper_power_probability(double x1, double x2, double p_bar);

/// Expected SER of the two-point power law using the best phase per level.
[[nodiscard]] double ser_expected_two_point(double x1, double x2, double p_bar,
                                            const InstantaneousContext& ctx);

/// SER under circular Gaussian AN of energy e_z per symbol (fixed h, g).
[[nodiscard]] double ser_gaussian_an(double e_z, const InstantaneousContext& ctx);

/// Rayleigh-fading ASER for a fixed AN power x = |z|^2. Phase-independent.
[[nodiscard]] double aser_fixed_an_power(double x, const StatisticalContext& sctx);

[[nodiscard]] double aser_expected_two_point(double x1, double x2, double p_bar,
                                             const StatisticalContext& sctx);

struct PowerDensity {
    enum class Kind { Uniform, Exponential };
    Kind kind;
    /// Mean AN power P. Uniform is supported on [0, 2P]; exponential has mean P.
    double mean_power;
};

/// Parses "uniform" / "exponential"; throws std::invalid_argument otherwise.
[[nodiscard]] PowerDensity::Kind parse_power_density_kind(std::string_view name);

/// Integral of ASER(x) f(x) dx by adaptive Gauss-Kronrod quadrature.
[[nodiscard]] double aser_mixture(const PowerDensity& density, const StatisticalContext& sctx);

}  // namespace anlab
