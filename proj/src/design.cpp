#include "anlab/design.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

#include <boost/math/tools/toms748_solve.hpp>

#include "anlab/nelder_mead.hpp"

namespace anlab {

TwoPointPowerLaw TwoPointPowerLaw::make(double x1, double x2, double p_bar,
                                        std::optional<PhaseChoice> phase1,
                                        std::optional<PhaseChoice> phase2) {
    TwoPointPowerLaw law;
    law.p_ = upper_power_probability(x1, x2, p_bar);
    law.x1_ = x1;
    law.x2_ = x2;
    law.p_bar_ = p_bar;
    law.phase1_ = phase1;
    law.phase2_ = phase2;
    return law;
}

TwoPointPowerLaw TwoPointPowerLaw::deterministic(double p_bar, std::optional<PhaseChoice> phase) {
    return make(p_bar, p_bar, p_bar, phase, phase);
}

double TwoPointPowerLaw::expected_power() const noexcept {
    return (1.0 - p_) * x1_ + p_ * x2_;
}

PowerResponse instantaneous_response(const InstantaneousContext& ctx) {
    return [ctx](double x) { return ser_best_phase(std::sqrt(x), ctx).value; };
}

PowerResponse statistical_response(const StatisticalContext& sctx) {
    validate(sctx);
    return [sctx](double x) { return aser_fixed_an_power(x, sctx); };
}

PhaseThreshold phase_threshold(double a_over_sigma, int m) {
    if (!(a_over_sigma > 0.0) || !std::isfinite(a_over_sigma))
        throw std::invalid_argument("a/sigma must be positive");
    const InstantaneousContext ctx{Constellation(m, a_over_sigma), ChannelRealization{},
                                   NoiseModel::from_sigma(1.0)};
    auto gap = [&](double t) {
        return ser_phase_amp(std::numbers::pi / 4.0, t, ctx) - ser_phase_amp(0.0, t, ctx);
    };

    constexpr int steps = 4000;
    const double t_max = 100.0 * a_over_sigma;
    const double dt = t_max / steps;

    // The rotated selection wins below the crossover and QAM above it, so
    // scan down from the top of the bracket for the last negative gap.
    double hi = t_max;
    double f_hi = gap(hi);
    for (int k = steps - 1; k >= 1; --k) {
        const double t = k * dt;
        const double f = gap(t);
        if (f < 0.0) {
            if (f_hi == 0.0) return {hi, true};
            boost::uintmax_t max_iter = 200;
            auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-7; };
            const auto [lo_r, hi_r] =
                boost::math::tools::toms748_solve(gap, t, hi, f, f_hi, tol, max_iter);
            return {0.5 * (lo_r + hi_r), true};
        }
        hi = t;
        f_hi = f;
    }
    return {0.0, false};
}

namespace {

// Half linear, half geometric (offsets from lo spanning six decades).
std::vector<double> hybrid_grid(double lo, double hi, int n) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n) + 2);
    const int n_lin = n / 2;
    const int n_geo = n - n_lin;
    for (int k = 0; k < n_lin; ++k) g.push_back(lo + (hi - lo) * k / (n_lin - 1));
    const double span = hi - lo;
    for (int k = 0; k < n_geo; ++k) {
        const double e = -6.0 + 6.0 * k / std::max(1, n_geo - 1);
        g.push_back(lo + span * std::pow(10.0, e));
    }
    g.push_back(lo);
    g.push_back(hi);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
}

double mixture(double x1, double x2, double p_bar, double r1, double r2) {
    if (x1 == x2) return r1;
    const double p = (p_bar - x1) / (x2 - x1);
    return (1.0 - p) * r1 + p * r2;
}

void require_positive_power(double p_bar) {
    if (!(p_bar > 0.0) || !std::isfinite(p_bar))
        throw std::invalid_argument("average AN power must be positive and finite");
}

}  // namespace

OracleResult grid_oracle(double p_bar, double noise_variance, const PowerResponse& response,
                         int grid_size) {
    require_positive_power(p_bar);
    if (grid_size < 64) throw std::invalid_argument("grid oracle needs at least 64 points per axis");
    const double x_max = std::max(16.0 * p_bar, p_bar + 64.0 * noise_variance);
    const auto g1 = hybrid_grid(0.0, p_bar, grid_size);
    const auto g2 = hybrid_grid(p_bar, x_max, grid_size);
    std::vector<double> r1(g1.size()), r2(g2.size());
    std::transform(g1.begin(), g1.end(), r1.begin(), response);
    std::transform(g2.begin(), g2.end(), r2.begin(), response);

    OracleResult best{p_bar, p_bar, response(p_bar)};
    for (std::size_t i = 0; i < g1.size(); ++i) {
        for (std::size_t j = 0; j < g2.size(); ++j) {
            const double v = mixture(g1[i], g2[j], p_bar, r1[i], r2[j]);
            if (v > best.value) best = {g1[i], g2[j], v};
        }
    }
    return best;
}

OracleResult grid_oracle(double p_bar, const InstantaneousContext& ctx, int grid_size) {
    return grid_oracle(p_bar, ctx.noise.variance(), instantaneous_response(ctx), grid_size);
}

OracleResult grid_oracle(double p_bar, const StatisticalContext& sctx, int grid_size) {
    return grid_oracle(p_bar, sctx.noise.variance(), statistical_response(sctx), grid_size);
}

namespace {

// Box-free parameterization: x1 = P sigmoid(u) in [0, P], x2 = P (1 + e^v) >= P.
struct Reparam {
    double p_bar;
    static constexpr double limit = 60.0;

    [[nodiscard]] std::pair<double, double> powers(const std::array<double, 2>& uv) const {
        const double u = std::clamp(uv[0], -limit, limit);
        const double v = std::clamp(uv[1], -limit, limit);
        const double x1 = std::min(p_bar, p_bar / (1.0 + std::exp(-u)));
        const double x2 = std::max(p_bar, p_bar * (1.0 + std::exp(v)));
        return {x1, x2};
    }

    [[nodiscard]] std::array<double, 2> params(double x1, double x2) const {
        constexpr double eps = 1e-12;
        const double s = std::clamp(x1 / p_bar, eps, 1.0 - 1e-9);
        const double w = std::max(x2 / p_bar - 1.0, eps);
        return {std::log(s / (1.0 - s)), std::log(w)};
    }
};

}  // namespace

DesignReport optimize_two_point(double p_bar, double noise_variance, const PowerResponse& response,
                                std::span<const std::pair<double, double>> extra_starts) {
    require_positive_power(p_bar);
    const Reparam map{p_bar};
    auto objective = [&](double x1, double x2) {
        const double v = x1 == x2 ? response(p_bar) : mixture(x1, x2, p_bar, response(x1), response(x2));
        return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
    };

    // Coarse pair scan to land in the right basin; the objective is
    // multi-modal across the phase-selection regimes.
    const OracleResult seed = grid_oracle(p_bar, noise_variance, response, 64);

    std::vector<std::pair<double, double>> starts{
        {0.0, 2.0 * p_bar},
        {0.5 * p_bar, 4.0 * p_bar},
        {p_bar * (1.0 - 1e-3), p_bar * (1.0 + 1e-3)},
        {seed.x1, seed.x2},
    };
    for (const auto& [x1, x2] : extra_starts) {
        if (x1 >= 0.0 && x1 <= p_bar && x2 >= p_bar && std::isfinite(x2)) starts.emplace_back(x1, x2);
    }

    const NelderMeadOptions opts{};
    double best_value = -std::numeric_limits<double>::infinity();
    double best_x1 = p_bar, best_x2 = p_bar;
    int iterations = 0;
    auto consider = [&](double x1, double x2, double v) {
        if (v > best_value) {
            best_value = v;
            best_x1 = x1;
            best_x2 = x2;
        }
    };
    consider(seed.x1, seed.x2, seed.value);

    for (const auto& [sx1, sx2] : starts) {
        std::array<double, 2> start = map.params(sx1, sx2);
        // One restart from the converged vertex guards against early collapse.
        for (int pass = 0; pass < 2; ++pass) {
            auto res = nelder_mead<2>(
                [&](const std::array<double, 2>& uv) {
                    const auto [x1, x2] = map.powers(uv);
                    return -objective(x1, x2);
                },
                start, opts);
            iterations += res.iterations;
            const auto [x1, x2] = map.powers(res.x);
            consider(x1, x2, -res.value);
            start = res.x;
        }
    }

    if (!std::isfinite(best_value)) throw OptimizerError("two-point optimizer produced no finite objective");

    // An x1 within rounding of zero is reported as exactly zero when that
    // does not lose objective.
    if (best_x1 > 0.0 && best_x1 < 1e-7 * p_bar) {
        const double snapped = objective(0.0, best_x2);
        if (snapped >= best_value) {
            best_value = snapped;
            best_x1 = 0.0;
        }
    }

    const double det = response(p_bar);
    if (best_value <= det + 1e-12 || best_x1 == best_x2) {
        return {TwoPointPowerLaw::deterministic(p_bar, std::nullopt), det, iterations, std::nullopt};
    }
    return {TwoPointPowerLaw::make(best_x1, best_x2, p_bar, std::nullopt, std::nullopt), best_value,
            iterations, std::nullopt};
}

DesignReport optimize_two_point_instantaneous(double p_bar, const InstantaneousContext& ctx) {
    require_positive_power(p_bar);
    // Start at the power where QAM selection starts to beat rotated QAM.
    std::vector<std::pair<double, double>> extra;
    const double g = std::abs(ctx.channel.g);
    if (g > 0.0 && ctx.signal_margin() > 0.0) {
        const PhaseThreshold th = phase_threshold(ctx.signal_margin(), ctx.constellation.order());
        if (th.crossover) {
            const double amp = th.value * ctx.noise.sigma() / g;
            extra.emplace_back(0.0, std::max(amp * amp, 1.5 * p_bar));
        }
    }
    DesignReport r = optimize_two_point(p_bar, ctx.noise.variance(), instantaneous_response(ctx), extra);
    const auto& law = r.law;
    const PhaseChoice ph1 = ser_best_phase(std::sqrt(law.x1()), ctx).phase;
    const PhaseChoice ph2 = ser_best_phase(std::sqrt(law.x2()), ctx).phase;
    r.law = TwoPointPowerLaw::make(law.x1(), law.x2(), law.p_bar(), ph1, ph2);
    return r;
}

DesignReport optimize_two_point_statistical(double p_bar, const StatisticalContext& sctx) {
    return optimize_two_point(p_bar, sctx.noise.variance(), statistical_response(sctx));
}

double absolute_an_phase(PhaseChoice phase, const ChannelRealization& ch) noexcept {
    return std::arg(ch.h) - std::arg(ch.g) + phase_angle(phase);
}

AnDesign design_instantaneous(double p_bar, const InstantaneousContext& ctx) {
    if (std::abs(ctx.channel.h) == 0.0 || std::abs(ctx.channel.g) == 0.0)
        throw DegenerateChannel("AN design needs non-zero channel gains");
    AnDesign d{optimize_two_point_instantaneous(p_bar, ctx), 0.0, 0.0};
    d.theta_z1 = absolute_an_phase(*d.report.law.phase1(), ctx.channel);
    d.theta_z2 = absolute_an_phase(*d.report.law.phase2(), ctx.channel);
    return d;
}

std::string_view to_string(Region r) noexcept {
    switch (r) {
        case Region::I: return "I";
        case Region::II: return "II";
        case Region::III: return "III";
        case Region::IV: return "IV";
        case Region::V: return "V";
    }
    return "?";
}

namespace {

double relative_change(double a, double b) noexcept {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

bool is_rotated_burst(const TwoPointPowerLaw& law) {
    return !law.is_deterministic() && law.phase1() == PhaseChoice::RotatedQam &&
           law.phase2() == PhaseChoice::RotatedQam;
}

}  // namespace

std::vector<Region> region_classify(std::span<const DesignReport> sweep) {
    if (sweep.size() < 3) throw std::invalid_argument("region classification needs at least 3 sweep points");
    for (const auto& r : sweep) {
        if (!r.law.phase1() || !r.law.phase2())
            throw std::invalid_argument("region classification needs phase-resolved designs");
    }
    constexpr double constant_tol = 0.01;

    std::vector<Region> out(sweep.size());
    for (std::size_t i = 0; i < sweep.size(); ++i) {
        const auto& law = sweep[i].law;
        if (law.is_deterministic()) {
            out[i] = law.phase2() == PhaseChoice::Qam ? Region::V : Region::III;
            continue;
        }
        if (law.phase2() == PhaseChoice::Qam) {
            out[i] = law.phase1() == PhaseChoice::Qam ? Region::V : Region::IV;
            continue;
        }
        if (law.phase1() == PhaseChoice::Qam) {
            out[i] = Region::IV;
            continue;
        }
        // Rotated burst: Region I when, against either rotated-burst
        // neighbour, p holds still while x2 moves.
        bool region_one = false;
        for (const std::size_t j : {i - 1, i + 1}) {
            if (j >= sweep.size() || !is_rotated_burst(sweep[j].law)) continue;
            const auto& nb = sweep[j].law;
            if (relative_change(law.p(), nb.p()) < constant_tol && relative_change(law.x2(), nb.x2()) >= constant_tol)
                region_one = true;
        }
        out[i] = region_one ? Region::I : Region::II;
    }
    return out;
}

}  // namespace anlab
