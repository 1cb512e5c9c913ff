#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace anlab {

using cdouble = std::complex<double>;

/// Thrown when a coherent receiver is handed a zero channel gain.
class DegenerateChannel : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

[[nodiscard]] bool is_square_qam_order(int m) noexcept;

/// Square M-QAM geometry. Points sit at odd multiples of the half minimum
/// distance on both axes, so the minimum pairwise distance is 2a.
class Constellation {
public:
    /// Throws std::invalid_argument unless m = 4^k (k >= 1), a > 0 and t_m > 0.
    Constellation(int order, double half_min_distance, double symbol_period = 1.0);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] double half_min_distance() const noexcept { return a_; }
    [[nodiscard]] double symbol_period() const noexcept { return t_m_; }

    /// sqrt(M), the number of levels per axis.
    [[nodiscard]] int side() const noexcept { return side_; }

    /// c = (sqrt(M) - 1) / sqrt(M), the per-axis edge weighting in the SER.
    [[nodiscard]] double edge_factor() const noexcept;

    /// (2/3) a^2 T_m (M - 1).
    [[nodiscard]] double symbol_energy() const noexcept;

private:
    int order_;
    int side_;
    double a_;
    double t_m_;
};

/// Complex source-to-relay (h) and relay-to-destination (g) gains.
struct ChannelRealization {
    cdouble h{1.0, 0.0};
    cdouble g{1.0, 0.0};
};

/// Receiver noise. n0 is the one-sided PSD; sigma is the per-dimension
/// standard deviation of the sampled noise, sigma^2 = n0 / (2 T_m).
class NoiseModel {
public:
    static NoiseModel from_psd(double n0, double symbol_period = 1.0);
    static NoiseModel from_sigma(double sigma, double symbol_period = 1.0);

    [[nodiscard]] double n0() const noexcept { return n0_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double variance() const noexcept { return sigma_ * sigma_; }

private:
    NoiseModel(double n0, double sigma) : n0_(n0), sigma_(sigma) {}
    double n0_;
    double sigma_;
};

/// Gaussian tail probability, Q(x) = erfc(x / sqrt(2)) / 2.
[[nodiscard]] double q_function(double x) noexcept;

/// Row-major over the (I, Q) grid: index = iI * side + iQ, where level k on an
/// axis sits at (2k - side + 1) a.
[[nodiscard]] std::vector<cdouble> constellation_points(const Constellation& c);

[[nodiscard]] double half_distance_from_energy(double e_m, double t_m, int m);

/// a / sigma = sqrt(3 E_m / (N0 (M - 1))); the symbol period cancels.
[[nodiscard]] double a_over_sigma(double e_m, double n0, int m);

/// Phase-only equalization (h* / |h|) y. Throws DegenerateChannel on h = 0.
[[nodiscard]] cdouble coherent_demodulate(cdouble y, cdouble h);

/// Exhaustive minimum-distance search against |h| * point. Ties go to the
/// lower index.
[[nodiscard]] std::size_t min_distance_detect(cdouble y_eq, const Constellation& c,
                                              double channel_gain);

/// Per-axis slicer. Same decisions (including tie-breaks) as
/// min_distance_detect, in O(1).
[[nodiscard]] std::size_t slice_detect(cdouble y_eq, const Constellation& c,
                                       double channel_gain) noexcept;

}  // namespace anlab
