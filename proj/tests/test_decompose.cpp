#include "augcast/decompose.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace augcast;

TEST_CASE("constant series decomposes to a flat trend") {
    for (int period : {1, 4, 12}) {
        const std::vector<double> x(60, 5.0);
        const auto d = stl_decompose(x, period);
        for (std::size_t t = 0; t < x.size(); ++t) {
            CHECK(d.trend[t] == doctest::Approx(5.0).epsilon(1e-12));
            CHECK(std::abs(d.seasonal[t]) < 1e-12);
            CHECK(std::abs(d.remainder[t]) < 1e-12);
        }
    }
}

TEST_CASE("sinusoid is captured by the seasonal component") {
    const int period = 12;
    std::vector<double> x(120);
    for (std::size_t t = 0; t < x.size(); ++t) {
        x[t] = 10.0 + std::sin(2.0 * M_PI * static_cast<double>(t) / period);
    }
    const auto d = stl_decompose(x, period);
    double ss = 0.0;
    for (double r : d.remainder) {
        ss += r * r;
    }
    const double rms = std::sqrt(ss / static_cast<double>(x.size()));
    CHECK(rms < 0.05 * 1.0);
}

TEST_CASE("reconstruction, periodicity and zero-mean seasonal on random series") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> len(30, 150);
    std::uniform_int_distribution<int> per(1, 14);
    for (int trial = 0; trial < 200; ++trial) {
        const int period = per(rng);
        const auto n = static_cast<std::size_t>(std::max(len(rng), 2 * period));
        const auto x = oracle::random_seasonal(rng, n, period);
        const auto d = stl_decompose(x, period);
        REQUIRE(d.size() == n);
        double worst = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            worst = std::max(worst, std::abs(d.seasonal[t] + d.trend[t] + d.remainder[t] - x[t]));
        }
        CHECK(worst < 1e-9);
        for (std::size_t t = 0; t + period < n; ++t) {
            CHECK(d.seasonal[t] == d.seasonal[t + period]);
        }
        const double cycle = std::accumulate(d.seasonal.begin(), d.seasonal.begin() + period, 0.0);
        CHECK(std::abs(cycle) < 1e-9);
    }
}

TEST_CASE("seasonal_at continues the last cycle") {
    std::mt19937_64 rng(3);
    const auto x = oracle::random_seasonal(rng, 50, 7);
    const auto d = stl_decompose(x, 7);
    for (std::size_t t = 50; t < 80; ++t) {
        CHECK(seasonal_at(d, 7, t) == d.seasonal[43 + (t - 50) % 7]);
    }
    CHECK(seasonal_at(d, 7, 10) == d.seasonal[10]);
}

TEST_CASE("loess reproduces straight lines") {
    std::vector<double> x(40);
    for (std::size_t t = 0; t < x.size(); ++t) {
        x[t] = 3.0 - 0.25 * static_cast<double>(t);
    }
    for (int span : {3, 7, 15, 41, 81}) {
        const auto y = loess_smooth(x, span);
        for (std::size_t t = 0; t < x.size(); ++t) {
            CHECK(y[t] == doctest::Approx(x[t]).epsilon(1e-9));
        }
    }
}

TEST_CASE("trend span is odd and bounded") {
    for (int period : {1, 4, 12, 52}) {
        for (std::size_t len : {20u, 60u, 105u, 400u}) {
            if (len < static_cast<std::size_t>(2 * period)) {
                continue;
            }
            const int s = default_trend_span(period, len);
            CHECK(s % 2 == 1);
            CHECK(s >= 7);
        }
    }
}

TEST_CASE("invalid inputs") {
    const std::vector<double> x(10, 1.0);
    CHECK_THROWS_AS(stl_decompose(x, 6), std::invalid_argument);
    CHECK_THROWS_AS(stl_decompose(x, 0), std::invalid_argument);
}
