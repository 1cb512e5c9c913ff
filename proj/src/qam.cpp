#include "anlab/qam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace anlab {

bool is_square_qam_order(int m) noexcept {
    if (m < 4) return false;
    while (m % 4 == 0) m /= 4;
    return m == 1;
}

Constellation::Constellation(int order, double half_min_distance, double symbol_period)
    : order_(order), side_(0), a_(half_min_distance), t_m_(symbol_period) {
    if (!is_square_qam_order(order))
        throw std::invalid_argument("constellation order must be a power of 4 (>= 4)");
    if (!(half_min_distance > 0.0) || !std::isfinite(half_min_distance))
        throw std::invalid_argument("half minimum distance must be positive and finite");
    if (!(symbol_period > 0.0) || !std::isfinite(symbol_period))
        throw std::invalid_argument("symbol period must be positive and finite");
    side_ = 1;
    while (side_ * side_ < order_) ++side_;
}

double Constellation::edge_factor() const noexcept {
    return (side_ - 1.0) / side_;
}

double Constellation::symbol_energy() const noexcept {
    return 2.0 / 3.0 * a_ * a_ * t_m_ * (order_ - 1);
}

NoiseModel NoiseModel::from_psd(double n0, double symbol_period) {
    if (!(n0 > 0.0) || !(symbol_period > 0.0))
        throw std::invalid_argument("noise PSD and symbol period must be positive");
    return NoiseModel(n0, std::sqrt(n0 / (2.0 * symbol_period)));
}

NoiseModel NoiseModel::from_sigma(double sigma, double symbol_period) {
    if (!(sigma > 0.0) || !(symbol_period > 0.0))
        throw std::invalid_argument("noise sigma and symbol period must be positive");
    return NoiseModel(2.0 * symbol_period * sigma * sigma, sigma);
}

double q_function(double x) noexcept {
    return 0.5 * std::erfc(x * (1.0 / std::numbers::sqrt2));
}

std::vector<cdouble> constellation_points(const Constellation& c) {
    const int side = c.side();
    const double a = c.half_min_distance();
    std::vector<cdouble> pts;
    pts.reserve(static_cast<std::size_t>(c.order()));
    for (int i = 0; i < side; ++i) {
        for (int q = 0; q < side; ++q) {
            pts.emplace_back((2 * i - side + 1) * a, (2 * q - side + 1) * a);
        }
    }
    return pts;
}

double half_distance_from_energy(double e_m, double t_m, int m) {
    if (!(e_m > 0.0) || !(t_m > 0.0))
        throw std::invalid_argument("symbol energy and period must be positive");
    if (!is_square_qam_order(m)) throw std::invalid_argument("order must be a power of 4");
    return std::sqrt(3.0 * e_m / (2.0 * t_m * (m - 1)));
}

double a_over_sigma(double e_m, double n0, int m) {
    if (!(e_m > 0.0) || !(n0 > 0.0))
        throw std::invalid_argument("symbol energy and noise PSD must be positive");
    if (!is_square_qam_order(m)) throw std::invalid_argument("order must be a power of 4");
    return std::sqrt(3.0 * e_m / (n0 * (m - 1)));
}

cdouble coherent_demodulate(cdouble y, cdouble h) {
    const double mag = std::abs(h);
    if (mag == 0.0) throw DegenerateChannel("coherent demodulation with zero channel gain");
    return std::conj(h) / mag * y;
}

std::size_t min_distance_detect(cdouble y_eq, const Constellation& c, double channel_gain) {
    const auto pts = constellation_points(c);
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const double d = std::norm(y_eq - channel_gain * pts[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    return best;
}

namespace {

// Nearest level on one axis; exact midpoints resolve to the lower level.
int slice_axis(double y, double scale, int side) noexcept {
    const double t = (y / scale + (side - 1)) * 0.5;
    const double k = std::ceil(t - 0.5);
    return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(side - 1)));
}

}  // namespace

std::size_t slice_detect(cdouble y_eq, const Constellation& c, double channel_gain) noexcept {
    if (!(channel_gain > 0.0)) return 0;
    const double scale = channel_gain * c.half_min_distance();
    const int side = c.side();
    const int i = slice_axis(y_eq.real(), scale, side);
    const int q = slice_axis(y_eq.imag(), scale, side);
    return static_cast<std::size_t>(i * side + q);
}

}  // namespace anlab
