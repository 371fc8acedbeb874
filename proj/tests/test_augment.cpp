#include "augcast/augment.hpp"
#include "augcast/decompose.hpp"
#include "augcast/dtw.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace augcast;

namespace {

Dataset random_dataset(std::uint64_t seed, int count, std::size_t len, int period) {
    std::mt19937_64 rng(seed);
    Dataset d;
    d.name = "toy";
    d.seasonality = period;
    d.horizon = 4;
    d.input_window = 5;
    for (int i = 0; i < count; ++i) {
        d.series.push_back({"s" + std::to_string(i), oracle::random_seasonal(rng, len, period)});
    }
    return d;
}

bool occurs_in(std::span<const double> needle, std::span<const double> hay, double tol) {
    for (std::size_t s = 0; s + needle.size() <= hay.size(); ++s) {
        bool ok = true;
        for (std::size_t k = 0; k < needle.size() && ok; ++k) {
            ok = std::abs(hay[s + k] - needle[k]) <= tol;
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("method names") {
    for (auto m : {AugmentMethod::MBB, AugmentMethod::DBA, AugmentMethod::GRATIS}) {
        CHECK(parse_augment_method(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_augment_method("SMOTE"), std::invalid_argument);
    CHECK(is_augmented_id("abc__aug3"));
    CHECK_FALSE(is_augmented_id("abc"));
}

TEST_CASE("config validation") {
    AugmentConfig c;
    CHECK_NOTHROW(c.validate());
    c.per_series = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.dba_iterations = 0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = {};
    c.block_length = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("block bootstrap is made of verbatim blocks") {
    std::mt19937_64 data_rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> r(60);
    for (auto& v : r) {
        v = g(data_rng);
    }
    Rng rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        const int l = 4 + trial % 9;
        const auto boot = bootstrap_remainder(r, l, rng);
        REQUIRE(boot.values.size() == r.size());
        CHECK(boot.trim < static_cast<std::size_t>(l));
        const auto first = (static_cast<std::size_t>(l) - boot.trim) % static_cast<std::size_t>(l);
        for (std::size_t s = first; s + l <= boot.values.size(); s += l) {
            CHECK(occurs_in(std::span<const double>(boot.values).subspan(s, l), r, 0.0));
        }
        if (boot.trim > 0) {
            CHECK(occurs_in(std::span<const double>(boot.values).first(first), r, 0.0));
        }
    }
    const std::vector<double> zeros(30, 0.0);
    CHECK(bootstrap_remainder(zeros, 8, rng).values == zeros);
    CHECK_THROWS_AS(bootstrap_remainder(zeros, 31, rng), std::invalid_argument);
}

TEST_CASE("MBB keeps seasonal and trend and resamples the remainder") {
    const auto d = random_dataset(3, 1, 96, 12);
    const auto& x = d.series[0];
    const auto dec = stl_decompose(x.values, 12);
    AugmentConfig cfg;
    Rng rng(5);
    const auto out = mbb_augment(x, 12, cfg, rng);
    REQUIRE(out.size() == 10);
    const int l = default_block_length(12, x.values.size());
    CHECK(l == 24);
    for (std::size_t k = 0; k < out.size(); ++k) {
        CHECK(out[k].id == "s0__aug" + std::to_string(k));
        REQUIRE(out[k].values.size() == x.values.size());
        std::vector<double> rem(x.values.size());
        for (std::size_t t = 0; t < rem.size(); ++t) {
            REQUIRE(out[k].values[t] > 0.0);
            rem[t] = out[k].values[t] - dec.seasonal[t] - dec.trend[t];
        }
        // the middle of the bootstrap always contains at least one complete block
        bool found = false;
        for (std::size_t s = 0; s + l <= rem.size() && !found; ++s) {
            found = occurs_in(std::span<const double>(rem).subspan(s, l), dec.remainder, 1e-9);
        }
        CHECK(found);
    }
}

TEST_CASE("MBB with a (numerically) zero remainder reproduces the series") {
    TimeSeries x{"flat", std::vector<double>(48, 7.0)};
    const auto dec = stl_decompose(x.values, 12);
    double rmax = 0.0;
    for (double r : dec.remainder) {
        rmax = std::max(rmax, std::abs(r));
    }
    CHECK(rmax < 1e-12);
    AugmentConfig cfg;
    cfg.per_series = 3;
    Rng rng(1);
    for (const auto& s : mbb_augment(x, 12, cfg, rng)) {
        for (std::size_t t = 0; t < x.values.size(); ++t) {
            CHECK(std::abs(s.values[t] - x.values[t]) <= 2.0 * rmax + 1e-12);
        }
    }
}

TEST_CASE("MBB budget: ten bootstraps per series") {
    const auto d = random_dataset(4, 111, 40, 4);
    AugmentConfig cfg;
    cfg.method = AugmentMethod::MBB;
    const auto out = augment(d, cfg);
    CHECK(out.size() == 1110);
    std::set<std::string> ids;
    for (const auto& s : out) {
        CHECK(is_augmented_id(s.id));
        ids.insert(s.id);
    }
    CHECK(ids.size() == 1110);

    cfg.total_override = 200 * 5;
    const auto small = random_dataset(6, 5, 40, 4);
    CHECK(augment(small, cfg).size() == 1000);
    cfg.total_override = 7;
    CHECK(augment(small, cfg).size() == 7);
}

TEST_CASE("MBB short series use a period of one") {
    CHECK(default_block_length(52, 97) == 8);
    CHECK(default_block_length(12, 24) == 24);
    CHECK(default_block_length(1, 24) == 8);
    TimeSeries x{"short", random_dataset(8, 1, 60, 52).series[0].values};
    AugmentConfig cfg;
    Rng rng(3);
    CHECK(mbb_augment(x, 52, cfg, rng).size() == 10);
}

TEST_CASE("augmentation is deterministic per seed") {
    const auto d = random_dataset(9, 6, 70, 6);
    for (auto m : {AugmentMethod::MBB, AugmentMethod::DBA, AugmentMethod::GRATIS}) {
        AugmentConfig cfg;
        cfg.method = m;
        cfg.per_series = 2;
        cfg.seed = 17;
        cfg.dba_iterations = 3;
        const auto a = augment(d, cfg);
        const auto b = augment(d, cfg);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].id == b[i].id);
            CHECK(a[i].values == b[i].values);
        }
        cfg.seed = 18;
        const auto c = augment(d, cfg);
        bool differs = false;
        for (std::size_t i = 0; i < a.size(); ++i) {
            differs = differs || a[i].values != c[i].values;
        }
        CHECK(differs);
    }
}

TEST_CASE("ASD weights") {
    const std::vector<double> dist{3.0, 0.0, 1.5, 6.0};
    const auto w = asd_weights(dist, 1);
    CHECK(w[1] == 1.0);
    CHECK(w[2] == 0.5);
    CHECK(w[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(w[3] == doctest::Approx(0.0625).epsilon(1e-15));
    const std::vector<double> zero(4, 0.0);
    for (double v : asd_weights(zero, 2)) {
        CHECK(v == 1.0);
    }
    CHECK_THROWS_AS(asd_weights(dist, 4), std::out_of_range);
}

TEST_CASE("ASD nearest neighbour weight on random data") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> dist(6);
        for (auto& v : dist) {
            v = u(rng);
        }
        const std::size_t ref = static_cast<std::size_t>(trial % 6);
        dist[ref] = 0.0;
        const auto w = asd_weights(dist, ref);
        double nearest = 1e300;
        std::size_t nn = 0;
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (i != ref && dist[i] < nearest) {
                nearest = dist[i];
                nn = i;
            }
        }
        CHECK(w[nn] == 0.5);
        for (std::size_t i = 0; i < dist.size(); ++i) {
            if (i != ref) {
                CHECK(w[i] <= 0.5);
                CHECK(w[i] >= 0.0);
            }
        }
    }
}

TEST_CASE("DBA on identical series returns that series") {
    Dataset d;
    d.seasonality = 1;
    const std::vector<double> x{4, 5, 6, 5, 4, 3, 4, 5};
    for (int i = 0; i < 4; ++i) {
        d.series.push_back({"c" + std::to_string(i), x});
    }
    AugmentConfig cfg;
    cfg.method = AugmentMethod::DBA;
    cfg.per_series = 2;
    const auto out = augment(d, cfg);
    CHECK(out.size() == 8);
    for (const auto& s : out) {
        CHECK(s.values == x);
        CHECK(is_augmented_id(s.id));
    }
    Dataset single;
    single.series.push_back({"only", x});
    CHECK_THROWS_AS(asd_generate(single, cfg), std::invalid_argument);
}

TEST_CASE("DBA budget on a 299-series dataset") {
    const auto d = random_dataset(12, 299, 10, 2);
    AugmentConfig cfg;
    cfg.method = AugmentMethod::DBA;
    cfg.dba_iterations = 1;
    const auto out = augment(d, cfg);
    CHECK(out.size() == 2990);
    for (const auto& s : out) {
        CHECK(s.values.size() == 10);
        CHECK(std::all_of(s.values.begin(), s.values.end(), [](double v) { return v >= 0.0; }));
    }
}

TEST_CASE("companion spectral radius matches the Gelfand oracle") {
    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 0.5);
    std::uniform_int_distribution<int> order(1, 14);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> phi(static_cast<std::size_t>(order(rng)));
        for (auto& v : phi) {
            v = g(rng);
        }
        const double r = companion_spectral_radius(phi);
        CHECK(r == doctest::Approx(oracle::gelfand_radius(phi)).epsilon(1e-3));
    }
    CHECK(companion_spectral_radius(std::vector<double>{0.5}) == 0.5);
    // y_t = y_{t-2}: roots +-1
    CHECK(companion_spectral_radius(std::vector<double>{0.0, 1.0}) == doctest::Approx(1.0));
}

TEST_CASE("GRATIS models and series") {
    const int period = 12;
    const int length = 120;
    const auto gen = gratis_generate(period, length, 50, 4, 77);
    REQUIRE(gen.size() == 50);
    for (const auto& g : gen) {
        REQUIRE(g.model.components.size() == 4);
        const double sum = std::accumulate(g.model.weights.begin(), g.model.weights.end(), 0.0);
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (const auto& c : g.model.components) {
            CHECK(c.ar.size() >= 1);
            CHECK(c.ar.size() <= 3);
            CHECK(c.seasonal_lag == period);
            const auto phi = c.lag_coefficients();
            CHECK(phi.size() == static_cast<std::size_t>(period));
            CHECK(c.spectral_radius < 1.0);
            CHECK(oracle::gelfand_radius(phi) < 1.0 + 1e-6);
        }
        REQUIRE(g.series.values.size() == static_cast<std::size_t>(length));
        const auto [lo, hi] = std::minmax_element(g.series.values.begin(), g.series.values.end());
        CHECK(*lo == doctest::Approx(1.0));
        CHECK(*hi == doctest::Approx(100.0));
        CHECK(is_augmented_id(g.series.id));
    }
    const auto again = gratis_generate(period, length, 50, 4, 77);
    for (std::size_t i = 0; i < gen.size(); ++i) {
        CHECK(again[i].series.values == gen[i].series.values);
    }
    CHECK_THROWS_AS(gratis_generate(12, 74, 1, 4, 0), std::invalid_argument);
    CHECK_NOTHROW(gratis_generate(12, 75, 1, 4, 0));
    Rng rng(1);
    CHECK_THROWS_AS(draw_mar_model(12, 1, rng), std::invalid_argument);
}

TEST_CASE("GRATIS defaults: four components, longest series length") {
    auto d = random_dataset(13, 3, 80, 4);
    d.series[1].values.resize(70);
    AugmentConfig cfg;
    cfg.method = AugmentMethod::GRATIS;
    cfg.per_series = 2;
    CHECK(cfg.mar_components == 4);
    const auto out = augment(d, cfg);
    CHECK(out.size() == 6);
    for (const auto& s : out) {
        CHECK(s.values.size() == 80);
    }
}
