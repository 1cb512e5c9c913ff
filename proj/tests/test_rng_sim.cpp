#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "anlab/sim.hpp"

using namespace anlab;

namespace {

constexpr double kPi = std::numbers::pi;

InstantaneousContext fixed_ctx(int m, double em_over_n0, cdouble h = 1.0, cdouble g = 1.0) {
    return {Constellation(m, half_distance_from_energy(em_over_n0, 1.0, m)), {h, g}, NoiseModel::from_psd(1.0)};
}

StatisticalContext fading_ctx(int m, double em_over_n0, double sh = 1.0, double sg = 1.0) {
    return {Constellation(m, half_distance_from_energy(em_over_n0, 1.0, m)), {sh, sg}, NoiseModel::from_psd(1.0)};
}

bool within(const SerEstimate& e, double analytic, double k = 3.0) {
    return std::abs(e.mean - analytic) <= k * std::max(e.std_error(), 1e-12);
}

bool same(const SerEstimate& a, const SerEstimate& b) {
    return a.mean == b.mean && a.half_width_95 == b.half_width_95 && a.n_trials == b.n_trials &&
           a.n_errors == b.n_errors;
}

}  // namespace

TEST_CASE("Philox4x32-10 known-answer vectors") {
    using A4 = std::array<std::uint32_t, 4>;
    using A2 = std::array<std::uint32_t, 2>;
    CHECK(Philox::block(A4{0, 0, 0, 0}, A2{0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox::block(A4{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, A2{0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox::block(A4{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, A2{0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("Philox streams are reproducible and distinct") {
    Philox a(42, 7, 3), b(42, 7, 3), c(42, 8, 3), d(42, 7, 4), e(43, 7, 3);
    bool differs_c = false, differs_d = false, differs_e = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a();
        CHECK(va == b());
        differs_c |= va != c();
        differs_d |= va != d();
        differs_e |= va != e();
    }
    CHECK(differs_c);
    CHECK(differs_d);
    CHECK(differs_e);
}

TEST_CASE("SerEstimate::from_counts") {
    const auto e = SerEstimate::from_counts(25, 10000);
    CHECK(e.mean == 0.0025);
    CHECK(e.half_width_95 == doctest::Approx(1.96 * std::sqrt(0.0025 * 0.9975 / 10000)).epsilon(1e-15));
    CHECK(SerEstimate::from_counts(0, 10).half_width_95 == 0.0);
    CHECK_THROWS_AS((void)SerEstimate::from_counts(0, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)SerEstimate::from_counts(11, 10), std::invalid_argument);
}

TEST_CASE("AN generators conserve their power budget") {
    const ChannelRealization ch{std::polar(1.0, 0.3), std::polar(1.0, -1.1)};
    const auto law = TwoPointPowerLaw::make(0.0, 13.7, 3.9811, PhaseChoice::RotatedQam, PhaseChoice::Qam);
    const std::vector<AnGenerator> gens{
        an::Deterministic{2.5, 0.7},           an::Deterministic{2.5, std::nullopt},
        two_point_for_channel(law, ch),        an::Gaussian{4.0},
        an::UniformPower{3.0},                 an::ExponentialPower{3.0},
        an::TwoPoint{TwoPointPowerLaw::make(1.0, 9.0, 5.0, std::nullopt, std::nullopt), 0.0, 0.0},
    };
    for (std::size_t k = 0; k < gens.size(); ++k) {
        Philox rng(11, k);
        double sum = 0.0;
        const int n = 1'000'000;
        for (int i = 0; i < n; ++i) sum += std::norm(draw_an_symbol(gens[k], rng));
        CHECK(std::abs(sum / n - declared_power(gens[k])) <= 0.01 * declared_power(gens[k]));
    }
    Philox rng(1, 1);
    CHECK(draw_an_symbol(an::None{}, rng) == cdouble{});
    CHECK(declared_power(an::None{}) == 0.0);
}

TEST_CASE("two-point generator: Bernoulli mixing and phases") {
    const ChannelRealization ch{std::polar(1.0, 0.5), std::polar(1.0, 0.2)};
    const auto law = TwoPointPowerLaw::make(0.0, 13.7098, 3.9811, PhaseChoice::RotatedQam, PhaseChoice::Qam);
    const auto gen = two_point_for_channel(law, ch);
    Philox rng(5, 0);
    const int n = 1'000'000;
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
        const cdouble z = draw_an_symbol(gen, rng);
        if (z == cdouble{}) {
            ++zeros;
        } else {
            REQUIRE(std::abs(std::norm(z) - 13.7098) < 1e-9);
            // Effective phase at the relay: theta_g - theta_h + theta_z = pi/4.
            REQUIRE(std::abs(std::remainder(std::arg(z) + 0.2 - 0.5 - kPi / 4, 2 * kPi)) < 1e-12);
        }
    }
    const double q = 1.0 - law.p();
    CHECK(std::abs(zeros / double(n) - q) <= 3 * std::sqrt(q * (1 - q) / n));
}

TEST_CASE("uniform power generator is flat on [0, 2P]") {
    Philox rng(8, 0);
    const double p = 2.0;
    const int n = 1'000'000, bins = 20;
    std::vector<int> hist(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double x = std::norm(draw_an_symbol(an::UniformPower{p}, rng));
        REQUIRE((x >= 0.0 && x < 2 * p + 1e-12));
        ++hist[std::min(bins - 1, static_cast<int>(x / (2 * p) * bins))];
    }
    const double expect = double(n) / bins;
    for (int h : hist) CHECK(std::abs(h - expect) <= 4 * std::sqrt(expect));
}

TEST_CASE("fixed-channel simulation: reproducibility across thread counts") {
    const auto ctx = fixed_ctx(16, 10.0);
    const AnGenerator gen = an::Gaussian{3.0};
    const auto a = simulate_ser_fixed_channel(ctx, gen, 300'001, {9, 2}, 1);
    const auto b = simulate_ser_fixed_channel(ctx, gen, 300'001, {9, 2}, 4);
    const auto c = simulate_ser_fixed_channel(ctx, gen, 300'001, {9, 2}, 3);
    CHECK(same(a, b));
    CHECK(same(a, c));
    const auto d = simulate_ser_fixed_channel(ctx, gen, 300'001, {9, 3}, 1);
    CHECK(!same(a, d));
    CHECK(a.n_trials == 300'001);
    CHECK(a.mean == double(a.n_errors) / a.n_trials);
}

TEST_CASE("fixed-channel simulation against closed forms") {
    const auto qpsk = fixed_ctx(4, 10.0);
    CHECK(within(simulate_ser_fixed_channel(qpsk, an::None{}, 1'000'000, {1, 0}), ser_awgn(qpsk)));

    const auto z0 = simulate_ser_fixed_channel(qpsk, an::Deterministic{0.0, 0.0}, 1'000'000, {1, 1});
    const auto none = simulate_ser_fixed_channel(qpsk, an::None{}, 1'000'000, {1, 2});
    CHECK(std::abs(z0.mean - none.mean) <= 3 * std::hypot(z0.std_error(), none.std_error()));

    const auto ctx16 = fixed_ctx(16, 100.0, std::polar(1.0, 2.0), std::polar(1.0, -0.4));
    const cdouble s = cdouble{5.0, 5.0} * ctx16.noise.sigma();
    CHECK(within(simulate_ser_fixed_channel(ctx16, deterministic_at_phase(std::norm(s), std::arg(s), ctx16.channel),
                                            1'000'000, {1, 3}),
                 ser_given_s(s, ctx16)));

    CHECK(within(simulate_ser_fixed_channel(qpsk, an::Gaussian{10.0}, 1'000'000, {1, 4}), ser_gaussian_an(10.0, qpsk)));

    const auto gain = fixed_ctx(16, 40.0, std::polar(0.7, 1.0), std::polar(1.8, 2.5));
    const auto design = optimize_two_point_instantaneous(2.0, gain);
    CHECK(within(simulate_ser_fixed_channel(gain, two_point_for_channel(design.law, gain.channel), 1'000'000, {1, 5}),
                 design.achieved_ser));
}

TEST_CASE("simulation preconditions") {
    const auto ctx = fixed_ctx(4, 10.0);
    CHECK_THROWS_AS((void)simulate_ser_fixed_channel(ctx, an::None{}, 9'999, {1, 0}), std::invalid_argument);
    auto dead = ctx;
    dead.channel.h = 0.0;
    CHECK_THROWS_AS((void)simulate_ser_fixed_channel(dead, an::None{}, 10'000, {1, 0}), DegenerateChannel);
    CHECK_THROWS_AS((void)simulate_ser_fixed_channel(ctx, an::Gaussian{-1.0}, 10'000, {1, 0}), std::invalid_argument);
    const auto sctx = fading_ctx(4, 10.0);
    CHECK_THROWS_AS((void)simulate_aser_rayleigh(sctx, an::None{}, 999, 100, {1, 0}), std::invalid_argument);
    CHECK_THROWS_AS((void)simulate_instantaneous_design_over_fading(sctx, 1.0, 199, {1, 0}), std::invalid_argument);
}

TEST_CASE("Rayleigh simulation against closed forms") {
    const auto qpsk = fading_ctx(4, 10.0);
    CHECK(within(simulate_aser_rayleigh(qpsk, an::None{}, 1'000'000, 1, {2, 0}), aser_fixed_an_power(0.0, qpsk)));

    const auto s16 = fading_ctx(16, 10.0);
    const double p = 10.0;
    CHECK(within(simulate_aser_rayleigh(s16, an::Deterministic{p, std::nullopt}, 10'000, 100, {2, 1}),
                 aser_fixed_an_power(p, s16)));
    CHECK(within(simulate_aser_rayleigh(s16, an::UniformPower{p}, 1'000'000, 1, {2, 2}),
                 aser_mixture({PowerDensity::Kind::Uniform, p}, s16)));
    CHECK(within(simulate_aser_rayleigh(s16, an::Gaussian{p}, 1'000'000, 1, {2, 3}),
                 aser_mixture({PowerDensity::Kind::Exponential, p}, s16)));

    const auto loud = simulate_aser_rayleigh(s16, an::ExponentialPower{1e8}, 100'000, 1, {2, 4});
    CHECK(std::abs(loud.mean - 15.0 / 16.0) <= 0.01);
}

TEST_CASE("Rayleigh simulation: block interval and thread independence") {
    const auto s16 = fading_ctx(16, 10.0);
    const auto a = simulate_aser_rayleigh(s16, an::Gaussian{3.0}, 5'000, 100, {4, 0}, 1);
    const auto b = simulate_aser_rayleigh(s16, an::Gaussian{3.0}, 5'000, 100, {4, 0}, 4);
    CHECK(same(a, b));
    // Errors within a block are correlated, so the block interval is wider
    // than the binomial one for the same counts.
    CHECK(a.half_width_95 > SerEstimate::from_counts(a.n_errors, a.n_trials).half_width_95);
}

TEST_CASE("ASER estimate does not depend on the AN phase") {
    const auto s16 = fading_ctx(16, 10.0);
    const auto law = TwoPointPowerLaw::make(0.0, 12.0, 4.0, PhaseChoice::RotatedQam, PhaseChoice::Qam);
    const auto a = simulate_aser_rayleigh(s16, an::TwoPoint{law, 0.0, 0.0}, 1'000'000, 1, {6, 0});
    const auto b = simulate_aser_rayleigh(s16, an::TwoPoint{law, 1.234, 0.0}, 1'000'000, 1, {6, 1});
    CHECK(std::abs(a.mean - b.mean) <= 3 * std::hypot(a.std_error(), b.std_error()));
    CHECK(within(a, aser_expected_two_point(0.0, 12.0, 4.0, s16)));
}

TEST_CASE("instantaneous design over fading") {
    const auto s16 = fading_ctx(16, 10.0);
    const double p = 10.0;
    const auto inst = simulate_instantaneous_design_over_fading(s16, p, 400, {7, 0}, 1);
    const auto again = simulate_instantaneous_design_over_fading(s16, p, 400, {7, 0}, 3);
    CHECK(same(inst, again));
    const double stat = optimize_two_point_statistical(p, s16).achieved_ser;
    CHECK(inst.mean + inst.half_width_95 >= stat);
    CHECK(inst.mean + inst.half_width_95 >= aser_mixture({PowerDensity::Kind::Exponential, p}, s16));
    CHECK(inst.n_errors == 0);

    const auto strong = simulate_instantaneous_design_over_fading(fading_ctx(16, 10.0, 1e4, 1e-4), p, 200, {7, 1});
    CHECK(strong.mean < 1e-3);
}
