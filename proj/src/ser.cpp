#include "anlab/ser.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace anlab {

double phase_angle(PhaseChoice p) noexcept {
    return p == PhaseChoice::Qam ? std::numbers::pi / 4.0 : 0.0;
}

std::string_view to_string(PhaseChoice p) noexcept {
    return p == PhaseChoice::Qam ? "qam" : "rotated";
}

double InstantaneousContext::signal_margin() const noexcept {
    return std::abs(channel.h) * constellation.half_min_distance() / noise.sigma();
}

double StatisticalContext::average_snr(double an_power) const noexcept {
    const double em_power = symbol_energy() / constellation.symbol_period();
    return stats.sigma_h_sq * em_power / (stats.sigma_g_sq * an_power + 2.0 * noise.variance());
}

void validate(const StatisticalContext& sctx) {
    if (!(sctx.stats.sigma_h_sq > 0.0) || !(sctx.stats.sigma_g_sq > 0.0))
        throw std::invalid_argument("channel variances must be positive");
}

namespace {

// Q(A - u) + Q(A + u): per-axis probability of leaving an interior cell.
double axis_exit(double margin, double shift) noexcept {
    return q_function(margin - shift) + q_function(margin + shift);
}

double combine_axes(double c, double xi, double eta) noexcept {
    return c * (xi + eta) - c * c * xi * eta;
}

}  // namespace

double ser_given_s(cdouble s, const InstantaneousContext& ctx) noexcept {
    const double sigma = ctx.noise.sigma();
    const double margin = ctx.signal_margin();
    const double xi = axis_exit(margin, s.real() / sigma);
    const double eta = axis_exit(margin, s.imag() / sigma);
    return combine_axes(ctx.constellation.edge_factor(), xi, eta);
}

double ser_phase_amp(double theta, double z_amp, const InstantaneousContext& ctx) noexcept {
    const double r = std::abs(ctx.channel.g) * z_amp;
    return ser_given_s(cdouble(r * std::cos(theta), r * std::sin(theta)), ctx);
}

PhasedSer ser_best_phase(double z_amp, const InstantaneousContext& ctx) noexcept {
    const double rotated = ser_phase_amp(0.0, z_amp, ctx);
    const double qam = ser_phase_amp(std::numbers::pi / 4.0, z_amp, ctx);
    if (qam > rotated) return {qam, PhaseChoice::Qam};
    return {rotated, PhaseChoice::RotatedQam};
}

double non_informative_ser(int m) {
    if (!is_square_qam_order(m)) throw std::invalid_argument("order must be a power of 4");
    return (m - 1.0) / m;
}

double ser_awgn(const InstantaneousContext& ctx) noexcept {
    const double c = ctx.constellation.edge_factor();
    const double q = q_function(ctx.signal_margin());
    return 4.0 * c * q - 4.0 * c * c * q * q;
}

double upper_power_probability(double x1, double x2, double p_bar) {
    if (!(x1 >= 0.0) || !(x1 <= p_bar) || !(p_bar <= x2))
        throw std::invalid_argument("two-point powers must satisfy 0 <= x1 <= P <= x2");
    if (x1 == x2) return 1.0;
    return (p_bar - x1) / (x2 - x1);
}

namespace {

template <class Response>
double mix_two_point(double x1, double x2, double p_bar, Response&& response) {
    const double p = upper_power_probability(x1, x2, p_bar);
    if (x1 == x2) return response(p_bar);
    return (1.0 - p) * response(x1) + p * response(x2);
}

}  // namespace

double ser_expected_two_point(double x1, double x2, double p_bar, const InstantaneousContext& ctx) {
    return mix_two_point(x1, x2, p_bar,
                         [&](double x) { return ser_best_phase(std::sqrt(x), ctx).value; });
}

double ser_gaussian_an(double e_z, const InstantaneousContext& ctx) {
    if (!(e_z >= 0.0)) throw std::invalid_argument("AN energy must be non-negative");
    const double power = e_z / ctx.constellation.symbol_period();
    const double g2 = std::norm(ctx.channel.g);
    const double sigma_eff = std::sqrt(ctx.noise.variance() + 0.5 * g2 * power);
    if (!std::isfinite(sigma_eff)) return non_informative_ser(ctx.constellation.order());
    const double c = ctx.constellation.edge_factor();
    const double q = q_function(std::abs(ctx.channel.h) * ctx.constellation.half_min_distance() / sigma_eff);
    return 4.0 * c * q - 4.0 * c * c * q * q;
}

double aser_fixed_an_power(double x, const StatisticalContext& sctx) {
    if (!(x >= 0.0)) throw std::invalid_argument("AN power must be non-negative");
    const double m = sctx.constellation.order();
    const double c = sctx.constellation.edge_factor();
    const double g = 1.5 * sctx.average_snr(x);
    const double r = std::sqrt(g / (m - 1.0 + g));
    // atan(1/r) with r -> 0 tends to pi/2; r * atan(...) -> 0 either way.
    const double tail = r == 0.0 ? 0.0 : r * (4.0 / std::numbers::pi) * std::atan(1.0 / r);
    return 2.0 * c * (1.0 - r) - c * c * (1.0 - tail);
}

double aser_expected_two_point(double x1, double x2, double p_bar, const StatisticalContext& sctx) {
    return mix_two_point(x1, x2, p_bar, [&](double x) { return aser_fixed_an_power(x, sctx); });
}

PowerDensity::Kind parse_power_density_kind(std::string_view name) {
    if (name == "uniform") return PowerDensity::Kind::Uniform;
    if (name == "exponential") return PowerDensity::Kind::Exponential;
    throw std::invalid_argument("unknown power density: " + std::string(name));
}

double aser_mixture(const PowerDensity& density, const StatisticalContext& sctx) {
    const double p_bar = density.mean_power;
    if (!(p_bar > 0.0) || !std::isfinite(p_bar))
        throw std::invalid_argument("mean AN power must be positive");

    using boost::math::quadrature::gauss_kronrod;
    constexpr unsigned max_depth = 20;
    // Integrands are bounded by 1, so a relative tolerance of 1e-10 keeps the
    // absolute error below 1e-8.
    constexpr double tol = 1e-10;

    switch (density.kind) {
        case PowerDensity::Kind::Uniform: {
            auto f = [&](double u) { return aser_fixed_an_power(2.0 * p_bar * u, sctx); };
            return gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, max_depth, tol);
        }
        case PowerDensity::Kind::Exponential: {
            auto f = [&](double t) { return aser_fixed_an_power(p_bar * t, sctx) * std::exp(-t); };
            return gauss_kronrod<double, 31>::integrate(
                f, 0.0, std::numeric_limits<double>::infinity(), max_depth, tol);
        }
    }
    throw std::invalid_argument("unknown power density kind");
}

}  // namespace anlab
