#include "anlab/sim.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "anlab/parallel.hpp"

namespace anlab {

SerEstimate SerEstimate::from_counts(std::uint64_t errors, std::uint64_t trials) {
    if (trials == 0) throw std::invalid_argument("SerEstimate: zero trials");
    if (errors > trials) throw std::invalid_argument("SerEstimate: more errors than trials");
    const double mean = static_cast<double>(errors) / static_cast<double>(trials);
    return {mean, 1.96 * std::sqrt(mean * (1.0 - mean) / static_cast<double>(trials)), trials, errors};
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform on [0, 1) with 53 random bits.
double unit(Philox& rng) noexcept { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform_phase(Philox& rng) noexcept { return kTwoPi * unit(rng); }

/// CN(0, variance): independent real and imaginary parts of variance / 2.
cdouble complex_normal(double variance, Philox& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

cdouble polar_draw(double power, double phase) { return std::polar(std::sqrt(power), phase); }

struct Drawer {
    Philox& rng;

    cdouble operator()(const an::None&) const { return {}; }

    cdouble operator()(const an::Deterministic& d) const {
        return polar_draw(d.power, d.theta_z ? *d.theta_z : uniform_phase(rng));
    }

    cdouble operator()(const an::TwoPoint& t) const {
        const bool upper = unit(rng) < t.law.p();
        const double power = upper ? t.law.x2() : t.law.x1();
        const auto choice = upper ? t.law.phase2() : t.law.phase1();
        const double phase = choice ? t.theta_h - t.theta_g + phase_angle(*choice) : uniform_phase(rng);
        return polar_draw(power, phase);
    }

    cdouble operator()(const an::Gaussian& g) const { return complex_normal(g.mean_power, rng); }

    cdouble operator()(const an::UniformPower& u) const {
        const double power = 2.0 * u.mean_power * unit(rng);
        return polar_draw(power, uniform_phase(rng));
    }

    cdouble operator()(const an::ExponentialPower& e) const {
        const double power = -e.mean_power * std::log1p(-unit(rng));
        return polar_draw(power, uniform_phase(rng));
    }
};

void check_generator(const AnGenerator& gen) {
    const double p = declared_power(gen);
    if (!std::isfinite(p) || p < 0.0) throw std::invalid_argument("AN generator: invalid power");
}

struct Link {
    const Constellation& c;
    const std::vector<cdouble>& points;
    double sigma;
};

/// One symbol through y = h m + g z + n; returns true on a detection error.
bool transmit(const Link& link, cdouble h, cdouble g, const AnGenerator& gen, Philox& rng,
              std::normal_distribution<double>& noise) {
    const auto sent = static_cast<std::size_t>(rng() & static_cast<std::uint64_t>(link.c.order() - 1));
    const cdouble z = std::visit(Drawer{rng}, gen);
    const double nr = noise(rng);
    const double ni = noise(rng);
    const cdouble y = h * link.points[sent] + g * z + cdouble{nr, ni};
    return slice_detect(coherent_demodulate(y, h), link.c, std::abs(h)) != sent;
}

std::uint32_t shard_index(std::size_t s) {
    if (s > 0xFFFFFFFFu) throw std::invalid_argument("simulation: too many shards");
    return static_cast<std::uint32_t>(s);
}

}  // namespace

double declared_power(const AnGenerator& gen) noexcept {
    struct {
        double operator()(const an::None&) const { return 0.0; }
        double operator()(const an::Deterministic& d) const { return d.power; }
        double operator()(const an::TwoPoint& t) const { return t.law.expected_power(); }
        double operator()(const an::Gaussian& g) const { return g.mean_power; }
        double operator()(const an::UniformPower& u) const { return u.mean_power; }
        double operator()(const an::ExponentialPower& e) const { return e.mean_power; }
    } power;
    return std::visit(power, gen);
}

AnGenerator deterministic_at_phase(double power, double theta, const ChannelRealization& ch) {
    return an::Deterministic{power, std::arg(ch.h) - std::arg(ch.g) + theta};
}

AnGenerator two_point_for_channel(const TwoPointPowerLaw& law, const ChannelRealization& ch) {
    return an::TwoPoint{law, std::arg(ch.h), std::arg(ch.g)};
}

cdouble draw_an_symbol(const AnGenerator& gen, Philox& rng) { return std::visit(Drawer{rng}, gen); }

SerEstimate simulate_ser_fixed_channel(const InstantaneousContext& ctx, const AnGenerator& gen, std::uint64_t n,
                                       const RngSpec& rng, int threads) {
    if (n < 10'000) throw std::invalid_argument("simulate_ser_fixed_channel: need at least 10^4 trials");
    if (std::abs(ctx.channel.h) == 0.0) throw DegenerateChannel("simulate_ser_fixed_channel: h = 0");
    check_generator(gen);

    const auto points = constellation_points(ctx.constellation);
    const Link link{ctx.constellation, points, ctx.noise.sigma()};
    const std::size_t shards = (n + kTrialsPerShard - 1) / kTrialsPerShard;
    std::vector<std::uint64_t> errors(shards, 0);

    parallel_for(shards, threads, [&](std::size_t s) {
        Philox eng(rng, shard_index(s));
        std::normal_distribution<double> noise(0.0, link.sigma);
        const std::uint64_t begin = s * kTrialsPerShard;
        const std::uint64_t count = std::min<std::uint64_t>(kTrialsPerShard, n - begin);
        std::uint64_t e = 0;
        for (std::uint64_t i = 0; i < count; ++i)
            e += transmit(link, ctx.channel.h, ctx.channel.g, gen, eng, noise) ? 1 : 0;
        errors[s] = e;
    });

    std::uint64_t total = 0;
    for (auto e : errors) total += e;
    return SerEstimate::from_counts(total, n);
}

SerEstimate simulate_aser_rayleigh(const StatisticalContext& sctx, const AnGenerator& gen, std::uint64_t n_blocks,
                                   std::uint64_t symbols_per_block, const RngSpec& rng, int threads) {
    if (n_blocks < 1'000) throw std::invalid_argument("simulate_aser_rayleigh: need at least 10^3 blocks");
    if (symbols_per_block == 0) throw std::invalid_argument("simulate_aser_rayleigh: empty blocks");
    validate(sctx);
    check_generator(gen);

    const auto points = constellation_points(sctx.constellation);
    const Link link{sctx.constellation, points, sctx.noise.sigma()};
    const std::uint64_t blocks_per_shard = std::max<std::uint64_t>(1, kTrialsPerShard / symbols_per_block);
    const std::size_t shards = (n_blocks + blocks_per_shard - 1) / blocks_per_shard;

    struct Tally {
        std::uint64_t errors = 0;
        std::uint64_t errors_sq = 0;  // sum over blocks of (block errors)^2
    };
    std::vector<Tally> tallies(shards);

    parallel_for(shards, threads, [&](std::size_t s) {
        Philox eng(rng, shard_index(s));
        std::normal_distribution<double> noise(0.0, link.sigma);
        const std::uint64_t begin = s * blocks_per_shard;
        const std::uint64_t count = std::min<std::uint64_t>(blocks_per_shard, n_blocks - begin);
        Tally t;
        for (std::uint64_t b = 0; b < count; ++b) {
            cdouble h = complex_normal(sctx.stats.sigma_h_sq, eng);
            while (h == cdouble{}) h = complex_normal(sctx.stats.sigma_h_sq, eng);
            const cdouble g = complex_normal(sctx.stats.sigma_g_sq, eng);
            std::uint64_t e = 0;
            for (std::uint64_t k = 0; k < symbols_per_block; ++k) e += transmit(link, h, g, gen, eng, noise) ? 1 : 0;
            t.errors += e;
            t.errors_sq += e * e;
        }
        tallies[s] = t;
    });

    Tally total;
    for (const auto& t : tallies) {
        total.errors += t.errors;
        total.errors_sq += t.errors_sq;
    }
    const std::uint64_t trials = n_blocks * symbols_per_block;
    auto est = SerEstimate::from_counts(total.errors, trials);
    if (symbols_per_block > 1) {
        const double nb = static_cast<double>(n_blocks);
        const double spb = static_cast<double>(symbols_per_block);
        const double sum_rate_sq = static_cast<double>(total.errors_sq) / (spb * spb);
        const double var = std::max(0.0, (sum_rate_sq - nb * est.mean * est.mean) / (nb - 1.0));
        est.half_width_95 = 1.96 * std::sqrt(var / nb);
    }
    return est;
}

SerEstimate simulate_instantaneous_design_over_fading(const StatisticalContext& sctx, double p_bar,
                                                      std::uint64_t n_channel_draws, const RngSpec& rng,
                                                      int threads) {
    if (n_channel_draws < 200)
        throw std::invalid_argument("simulate_instantaneous_design_over_fading: need at least 200 draws");
    validate(sctx);
    if (!(p_bar > 0.0)) throw std::invalid_argument("simulate_instantaneous_design_over_fading: p_bar <= 0");

    std::vector<double> values(n_channel_draws);
    parallel_for(n_channel_draws, threads, [&](std::size_t d) {
        Philox eng(rng, shard_index(d));
        const cdouble h = complex_normal(sctx.stats.sigma_h_sq, eng);
        const cdouble g = complex_normal(sctx.stats.sigma_g_sq, eng);
        const InstantaneousContext ctx{sctx.constellation, {h, g}, sctx.noise};
        try {
            values[d] = optimize_two_point_instantaneous(p_bar, ctx).achieved_ser;
        } catch (const OptimizerError& e) {
            throw OptimizerError("channel draw " + std::to_string(d) + ": " + e.what());
        }
    });

    const double n = static_cast<double>(n_channel_draws);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    return {mean, 1.96 * sd / std::sqrt(n), n_channel_draws, 0};
}

}  // namespace anlab
