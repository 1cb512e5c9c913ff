#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "anlab/qam.hpp"

using namespace anlab;

namespace {

double q_reference(double x) {
    using big = boost::multiprecision::cpp_bin_float_50;
    const big v = erfc(big(x) / sqrt(big(2))) / 2;
    return v.convert_to<double>();
}

}  // namespace

TEST_CASE("q_function against 50-digit erfc") {
    for (double x = -8.0; x <= 8.0; x += 0.01) {
        const double ref = q_reference(x);
        CHECK(std::abs(q_function(x) - ref) <= 1e-12 * ref);
    }
}

TEST_CASE("q_function anchors and symmetry") {
    CHECK(q_function(0.0) == 0.5);
    CHECK(q_function(INFINITY) == 0.0);
    CHECK(q_function(-INFINITY) == 1.0);
    CHECK(std::abs(q_function(3.1623) - 7.83e-4) <= 1e-6);
    for (double x = 0.0; x <= 8.0; x += 0.125) CHECK(std::abs(q_function(x) + q_function(-x) - 1.0) <= 1e-12);
    for (double x = -8.0; x < 8.0; x += 0.125) CHECK(q_function(x + 0.125) < q_function(x));
}

TEST_CASE("square QAM orders") {
    for (int m : {4, 16, 64, 256, 1024}) CHECK(is_square_qam_order(m));
    for (int m : {-4, 0, 1, 2, 8, 12, 32, 128}) {
        CHECK_FALSE(is_square_qam_order(m));
        CHECK_THROWS_AS(Constellation(m, 1.0), std::invalid_argument);
    }
    CHECK_THROWS_AS(Constellation(16, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Constellation(16, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("constellation points: 4-QAM") {
    const auto pts = constellation_points(Constellation(4, 1.0));
    const std::set<std::pair<double, double>> got = [&] {
        std::set<std::pair<double, double>> s;
        for (auto p : pts) s.insert({p.real(), p.imag()});
        return s;
    }();
    CHECK(got == std::set<std::pair<double, double>>{{-1, -1}, {-1, 1}, {1, -1}, {1, 1}});
}

TEST_CASE("constellation points: geometry invariants") {
    for (int m : {4, 16, 64}) {
        const double a = 0.7;
        const Constellation c(m, a, 2.0);
        const auto pts = constellation_points(c);
        REQUIRE(pts.size() == static_cast<std::size_t>(m));

        auto contains = [&](cdouble q) {
            return std::any_of(pts.begin(), pts.end(), [&](cdouble p) { return std::abs(p - q) < 1e-12; });
        };
        double dmin = INFINITY, energy = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            CHECK(contains(-pts[i]));
            CHECK(contains(pts[i] * cdouble{0.0, 1.0}));
            // Odd multiples of a on both axes.
            const double ri = pts[i].real() / a, qi = pts[i].imag() / a;
            CHECK(std::abs(std::fmod(std::abs(ri), 2.0) - 1.0) < 1e-12);
            CHECK(std::abs(std::fmod(std::abs(qi), 2.0) - 1.0) < 1e-12);
            energy += std::norm(pts[i]);
            for (std::size_t j = i + 1; j < pts.size(); ++j) dmin = std::min(dmin, std::abs(pts[i] - pts[j]));
        }
        CHECK(std::abs(dmin - 2.0 * a) < 1e-12);
        energy *= c.symbol_period() / m;
        CHECK(std::abs(energy - c.symbol_energy()) <= 1e-12 * energy);
        CHECK(std::abs(c.symbol_energy() - 2.0 / 3.0 * a * a * 2.0 * (m - 1)) <= 1e-12 * energy);
    }
}

TEST_CASE("constellation points: 16-QAM levels and energy") {
    const auto pts = constellation_points(Constellation(16, 1.0));
    std::set<double> levels;
    for (auto p : pts) {
        levels.insert(p.real());
        levels.insert(p.imag());
    }
    CHECK(levels == std::set<double>{-3, -1, 1, 3});

    const auto big = constellation_points(Constellation(16, std::sqrt(10.0)));
    double e = 0.0;
    for (auto p : big) e += std::norm(p);
    CHECK(std::abs(e / 16.0 - 100.0) < 1e-12);
}

TEST_CASE("half_distance_from_energy") {
    CHECK(std::abs(half_distance_from_energy(100.0, 1.0, 16) - std::sqrt(10.0)) < 1e-14);
    CHECK(std::abs(half_distance_from_energy(10.0, 1.0, 4) - std::sqrt(5.0)) < 1e-14);
    for (double t : {0.25, 1.0, 3.0})
        for (int m : {4, 16, 64}) {
            CHECK(std::abs(half_distance_from_energy(2.0 / 3.0 * t * (m - 1), t, m) - 1.0) < 1e-14);
            const Constellation c(m, 1.7, t);
            CHECK(std::abs(half_distance_from_energy(c.symbol_energy(), t, m) - 1.7) <= 1e-12);
        }
    CHECK_THROWS_AS((void)half_distance_from_energy(0.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)half_distance_from_energy(1.0, -1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)half_distance_from_energy(1.0, 1.0, 8), std::invalid_argument);
}

TEST_CASE("a_over_sigma") {
    CHECK(std::abs(a_over_sigma(100.0, 1.0, 16) - std::sqrt(20.0)) < 1e-14);
    CHECK(std::abs(a_over_sigma(10.0, 1.0, 4) - std::sqrt(10.0)) < 1e-14);
    CHECK(std::abs(a_over_sigma(5.0, 1.0, 16) - 1.0) < 1e-14);
    CHECK_THROWS_AS((void)a_over_sigma(-1.0, 1.0, 4), std::invalid_argument);
    CHECK_THROWS_AS((void)a_over_sigma(1.0, 0.0, 4), std::invalid_argument);

    // Independent of T_m: the geometry route gives the same ratio for any period.
    for (double t : {0.1, 1.0, 7.0}) {
        const double a = half_distance_from_energy(100.0, t, 16);
        const double sigma = NoiseModel::from_psd(1.0, t).sigma();
        CHECK(std::abs(a / sigma - std::sqrt(20.0)) < 1e-12);
    }
}

TEST_CASE("noise model") {
    const auto n = NoiseModel::from_psd(2.0, 0.5);
    CHECK(n.variance() == doctest::Approx(2.0).epsilon(1e-15));
    const auto m = NoiseModel::from_sigma(1.0 / std::sqrt(2.0));
    CHECK(m.n0() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS((void)NoiseModel::from_psd(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)NoiseModel::from_sigma(-1.0), std::invalid_argument);
}

TEST_CASE("coherent_demodulate") {
    const cdouble m{3.0, -1.0};
    CHECK(std::abs(coherent_demodulate(m, 1.0) - m) < 1e-15);
    const cdouble h = std::polar(1.0, 0.9);
    CHECK(std::abs(coherent_demodulate(h * m, h) - m) < 1e-14);
    CHECK(std::abs(coherent_demodulate(cdouble{0, 1} * cdouble{1, 1}, cdouble{0, 1}) - cdouble{1, 1}) < 1e-15);
    CHECK(std::abs(coherent_demodulate({2.0, 5.0}, 3.5) - cdouble{2.0, 5.0}) < 1e-15);
    CHECK_THROWS_AS((void)coherent_demodulate(m, 0.0), DegenerateChannel);

    const cdouble y{0.3, -2.0};
    CHECK(std::abs(std::abs(coherent_demodulate(y, {1.0, 2.0})) - std::abs(y)) < 1e-14);
    const cdouble base = coherent_demodulate(cdouble{0.8, 0.1} * m, {0.8, 0.1});
    for (double phi = 0.0; phi < 6.3; phi += 0.3) {
        const cdouble rot = std::polar(1.0, phi) * cdouble{0.8, 0.1};
        CHECK(std::abs(coherent_demodulate(rot * m, rot) - base) < 1e-12);
    }
}

TEST_CASE("min_distance_detect examples") {
    const Constellation c(4, 1.0);
    const auto pts = constellation_points(c);
    for (std::size_t k = 0; k < pts.size(); ++k) CHECK(min_distance_detect(2.0 * pts[k], c, 2.0) == k);

    const auto idx = min_distance_detect({0.9, 0.2}, c, 1.0);
    CHECK(pts[idx] == cdouble{1.0, 1.0});

    // Boundary between (-1, 1) and (1, 1): both equidistant, lower index wins.
    const auto tie = min_distance_detect({0.0, 1.0}, c, 1.0);
    std::size_t lower = pts.size();
    for (std::size_t k = 0; k < pts.size(); ++k)
        if (pts[k] == cdouble{-1, 1} || pts[k] == cdouble{1, 1}) lower = std::min(lower, k);
    CHECK(tie == lower);
}

TEST_CASE("slice_detect agrees with exhaustive search") {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int m : {4, 16, 64}) {
        const Constellation c(m, 0.8);
        const double span = 0.8 * (c.side() + 2);
        for (int i = 0; i < 20000; ++i) {
            const double gain = 0.2 + 3.0 * (u(rng) + 1.0);
            const cdouble y{span * gain * u(rng), span * gain * u(rng)};
            REQUIRE(slice_detect(y, c, gain) == min_distance_detect(y, c, gain));
        }
        // On decision boundaries either tied neighbour is a valid decision.
        const auto pts = constellation_points(c);
        for (int i = -c.side(); i <= c.side(); ++i)
            for (int k = -c.side(); k <= c.side(); ++k) {
                const cdouble y{0.8 * 2 * i * 1.5, 0.8 * 2 * k * 1.5};
                const double chosen = std::norm(y - 1.5 * pts[slice_detect(y, c, 1.5)]);
                const double best = std::norm(y - 1.5 * pts[min_distance_detect(y, c, 1.5)]);
                CHECK(chosen <= best * (1 + 1e-12) + 1e-12);
            }
    }
}

TEST_CASE("detection is scale consistent") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n(0.0, 3.0);
    const Constellation c(16, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const cdouble y{n(rng), n(rng)};
        const auto base = min_distance_detect(y, c, 1.3);
        for (double lambda : {0.01, 0.5, 2.0, 100.0}) {
            CHECK(min_distance_detect(lambda * y, c, lambda * 1.3) == base);
            CHECK(slice_detect(lambda * y, c, lambda * 1.3) == base);
        }
    }
}
