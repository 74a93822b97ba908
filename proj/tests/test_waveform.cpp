#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "prunetx/constellation.hpp"
#include "prunetx/errors.hpp"
#include "prunetx/pulse.hpp"

using namespace prunetx;

TEST_CASE("qpsk constellation") {
    const Constellation c = Constellation::make(ModKind::QPSK);
    CHECK(c.M == 4);
    double energy = 0.0;
    const double s = 1.0 / std::sqrt(2.0);
    for (const cplx& p : c.points) {
        CHECK(std::abs(std::abs(p.real()) - s) < 1e-15);
        CHECK(std::abs(std::abs(p.imag()) - s) < 1e-15);
        energy += std::norm(p);
    }
    CHECK(std::abs(energy / 4.0 - 1.0) < 1e-12);
    CHECK(std::abs(c.min_distance() - std::sqrt(2.0)) < 1e-12);
}

TEST_CASE("16qam constellation") {
    const Constellation c = Constellation::make(ModKind::QAM16);
    CHECK(c.M == 16);
    double energy = 0.0;
    for (const cplx& p : c.points) energy += std::norm(p);
    CHECK(std::abs(energy / 16.0 - 1.0) < 1e-12);
    CHECK(std::abs(c.min_distance() - 2.0 / std::sqrt(10.0)) < 1e-12);
    // every (a, b) pair from {-3,-1,1,3}^2 appears exactly once
    int seen[4][4] = {};
    for (const cplx& p : c.points) {
        const int a = static_cast<int>(std::lround(p.real() * std::sqrt(10.0)));
        const int b = static_cast<int>(std::lround(p.imag() * std::sqrt(10.0)));
        ++seen[(a + 3) / 2][(b + 3) / 2];
    }
    for (auto& row : seen)
        for (int n : row) CHECK(n == 1);
}

TEST_CASE("gray labels differ in one bit between nearest neighbours") {
    for (const ModKind kind : {ModKind::QPSK, ModKind::QAM16}) {
        const Constellation c = Constellation::make(kind);
        const double dmin = c.min_distance();
        for (int i = 0; i < c.M; ++i)
            for (int j = i + 1; j < c.M; ++j) {
                if (std::abs(std::abs(c.points[i] - c.points[j]) - dmin) > 1e-9) continue;
                const int bits = i ^ j;
                CHECK((bits & (bits - 1)) == 0);  // single-bit difference
            }
    }
}

TEST_CASE("unsupported constellation kind") {
    CHECK_THROWS_AS(Constellation::make(ModKind::Custom), ConfigError);
    CHECK_THROWS_AS(Constellation::make(static_cast<ModKind>(99)), ConfigError);
}

TEST_CASE("rrc alpha=0 is the sinc pulse") {
    const double W = 0.5;
    for (double t : {0.1, 0.5, 1.7, 3.3, -2.2}) {
        const double expect = std::sqrt(2.0 * W) * std::sin(2.0 * M_PI * W * t) / (2.0 * M_PI * W * t);
        CHECK(rrc_value(t, 0.0, W) == doctest::Approx(expect).epsilon(1e-14));
    }
    CHECK(rrc_value(0.0, 0.0, W) == doctest::Approx(std::sqrt(2.0 * W)).epsilon(1e-14));
}

TEST_CASE("rrc value at t=0") {
    // frozen from the analytic limit sqrt(2W) * (1 - a + 4a/pi)
    CHECK(rrc_value(0.0, 0.5, 0.5) == doctest::Approx(1.136620).epsilon(1e-6));
    for (double alpha : {0.22, 0.35, 0.5, 0.9}) {
        const double lim = oracles::numeric_limit(
            [alpha](double t) { return rrc_value(t, alpha, 0.5); }, 0.0, 1e-4);
        CHECK(rrc_value(0.0, alpha, 0.5) == doctest::Approx(lim).epsilon(1e-9));
    }
}

TEST_CASE("rrc value at the denominator singularity") {
    for (double alpha : {0.22, 0.35, 0.5, 0.75}) {
        for (double W : {0.5, 1.0}) {
            const double ts = 1.0 / (8.0 * alpha * W);
            const double lim = oracles::numeric_limit(
                [alpha, W](double t) { return rrc_value(t, alpha, W); }, ts, 1e-5);
            CHECK(std::abs(rrc_value(ts, alpha, W) - lim) < 1e-8);
            CHECK(std::isfinite(rrc_value(ts, alpha, W)));
            CHECK(std::isfinite(rrc_value(-ts, alpha, W)));
        }
    }
}

TEST_CASE("rrc is even") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> td(-6.0, 6.0);
    for (int i = 0; i < 1000; ++i) {
        const double t = td(rng);
        for (double alpha : {0.0, 0.22, 0.5}) {
            const double a = rrc_value(t, alpha, 0.5);
            const double b = rrc_value(-t, alpha, 0.5);
            CHECK(std::abs(a - b) <= 1e-12);
        }
    }
}

TEST_CASE("rrc continuity at the singular points") {
    for (double alpha : {0.22, 0.35, 0.5}) {
        const double W = 0.5;
        for (double ts : {0.0, 1.0 / (8.0 * alpha * W), -1.0 / (8.0 * alpha * W)}) {
            const double v = rrc_value(ts, alpha, W);
            CHECK(std::abs(v - rrc_value(ts + 1e-6, alpha, W)) < 1e-4);
            CHECK(std::abs(v - rrc_value(ts - 1e-6, alpha, W)) < 1e-4);
        }
    }
}

TEST_CASE("build_pulse basics") {
    const PulseShape p = build_pulse(0.35, 3, 16);
    REQUIRE(static_cast<int>(p.taps.size()) == 2 * 3 * 16 + 1);

    double energy = 0.0;
    for (double h : p.taps) {
        CHECK(std::isfinite(h));
        energy += h * h;
    }
    CHECK(std::abs(energy - 1.0) < 1e-12);

    // symmetric about the center, maximum at the center
    for (int n = 0; n < p.length(); ++n)
        CHECK(p.taps[static_cast<std::size_t>(n)] ==
              doctest::Approx(p.taps[static_cast<std::size_t>(p.length() - 1 - n)]).epsilon(1e-13));
    CHECK(p.taps[0] == p.taps[static_cast<std::size_t>(p.length() - 1)]);
    for (double h : p.taps) CHECK(h <= p.taps[static_cast<std::size_t>(p.center())]);
}

TEST_CASE("build_pulse taps are rrc samples up to one normalization") {
    for (double alpha : {0.0, 0.22, 0.5}) {
        const PulseShape p = build_pulse(alpha, 2, 8);
        double energy = 0.0;
        for (int n = 0; n < p.length(); ++n) {
            const double v = rrc_value(static_cast<double>(n) / p.osf - p.D, alpha, PulseShape::W);
            energy += v * v;
        }
        const double scale = 1.0 / std::sqrt(energy);
        for (int n = 0; n < p.length(); ++n) {
            const double v = rrc_value(static_cast<double>(n) / p.osf - p.D, alpha, PulseShape::W);
            CHECK(std::abs(p.taps[static_cast<std::size_t>(n)] - v * scale) < 1e-12);
        }
    }
}

TEST_CASE("build_pulse rejects bad parameters") {
    CHECK_THROWS_AS(build_pulse(0.35, 0, 16), ConfigError);
    CHECK_THROWS_AS(build_pulse(0.35, -1, 16), ConfigError);
    CHECK_THROWS_AS(build_pulse(0.35, 3, 0), ConfigError);
    CHECK_THROWS_AS(build_pulse(0.35, 3, 1), ConfigError);
    CHECK_THROWS_AS(build_pulse(1.5, 3, 16), ConfigError);
}

TEST_CASE("truncated rc cascade has small symbol-spaced isi") {
    const PulseShape p = build_pulse(0.5, 3, 16);
    // self-convolution = raised-cosine cascade
    const int L = p.length();
    std::vector<double> rc(static_cast<std::size_t>(2 * L - 1), 0.0);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
            rc[static_cast<std::size_t>(i + j)] +=
                p.taps[static_cast<std::size_t>(i)] * p.taps[static_cast<std::size_t>(j)];
    const int center = L - 1;
    const double peak = rc[static_cast<std::size_t>(center)];
    CHECK(peak > 0.5);
    for (int k = 1; k <= 2 * p.D; ++k) {
        for (int sgn : {-1, 1}) {
            const int idx = center + sgn * k * p.osf;
            if (idx < 0 || idx >= static_cast<int>(rc.size())) continue;
            CHECK(std::abs(rc[static_cast<std::size_t>(idx)]) <= 0.02 * peak);
        }
    }
}
