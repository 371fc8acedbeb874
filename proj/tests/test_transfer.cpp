#include "augcast/synthetic.hpp"
#include "augcast/train.hpp"
#include "augcast/transfer.hpp"

#include <doctest.h>

#include <set>

using namespace augcast;

namespace {

Network base_net(int in, int m, int cell = 20, int layers = 2) {
    Hyperparameters hp;
    hp.cell_dim = cell;
    hp.layers = layers;
    Rng rng(1);
    return make_network(in, m, hp, rng);
}

bool same_block(const ConstParamBlock& a, const ConstParamBlock& b) {
    return std::equal(a.values.begin(), a.values.end(), b.values.begin(), b.values.end());
}

Hyperparameters quick_hp() {
    Hyperparameters hp;
    hp.max_epochs = 2;
    hp.minibatch = 5;
    return hp;
}

Dataset toy(int series = 6) {
    SyntheticSpec spec;
    spec.series = series;
    spec.length = 70;
    spec.horizon = 6;
    spec.seasonality = 6;
    return make_synthetic_dataset(spec);
}

}  // namespace

TEST_CASE("strategy names") {
    const auto all = all_strategies();
    REQUIRE(all.size() == 21);
    CHECK(all[0].name() == "LSTM.Baseline");
    CHECK(all[1].name() == "MBB.Pooled");
    CHECK(all[2].name() == "DBA.Pooled");
    CHECK(all[3].name() == "MBB.TL.Dense.Freeze");
    CHECK(all[20].name() == "GRATIS.TL.LSTM.Retrain");
    std::set<std::string> names;
    for (const auto& s : all) {
        names.insert(s.name());
        const auto back = Strategy::parse(s.name());
        CHECK(back.name() == s.name());
        CHECK(back.q == s.q);
    }
    CHECK(names.size() == 21);
    CHECK_THROWS_AS(Strategy::parse("GRATIS.Pooled"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("MBB.TL.Conv.Freeze"), std::invalid_argument);
    CHECK_THROWS_AS(Strategy::parse("Baseline"), std::invalid_argument);
    auto s = Strategy::transfer(AugmentMethod::MBB, TlScheme::AddDense, TlMode::Freeze);
    CHECK(s.q == 2);
    CHECK(Strategy::transfer(AugmentMethod::MBB, TlScheme::Lstm, TlMode::Freeze).q == 1);
    s.q = 0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("Dense scheme appends one projection") {
    const auto base = base_net(10, 8);
    Rng rng(2);
    const auto t = build_target(base, TlScheme::Dense, TlMode::Freeze, 1, 8, rng);
    CHECK(t.parameter_count() == base.parameter_count() + 64);
    REQUIRE(t.head.size() == 2);
    CHECK(t.head[1].D.rows() == 8);
    CHECK(t.head[1].D.cols() == 8);
    for (const auto& l : t.lstm) {
        CHECK(l.frozen);
    }
    CHECK(t.head[0].frozen);
    CHECK_FALSE(t.head[1].frozen);
}

TEST_CASE("AddDense scheme appends q layers") {
    const auto base = base_net(10, 8);
    Rng rng(3);
    const auto t = build_target(base, TlScheme::AddDense, TlMode::Retrain, 3, 5, rng);
    REQUIRE(t.head.size() == 4);
    CHECK(t.head[1].D.rows() == 8);
    CHECK(t.head[2].D.rows() == 8);
    CHECK(t.head[3].D.rows() == 5);
    CHECK(t.output_width() == 5);
    CHECK(t.parameter_count() == base.parameter_count() + 64 + 64 + 40);
    for (const auto& b : parameter_blocks(t)) {
        CHECK_FALSE(b.frozen);
    }
}

TEST_CASE("LSTM scheme adds a residual recurrent layer and a new projection") {
    const auto base = base_net(10, 8, 20, 2);
    Rng rng(4);
    const auto t = build_target(base, TlScheme::Lstm, TlMode::Freeze, 1, 8, rng);
    REQUIRE(t.lstm.size() == 3);
    CHECK(t.lstm[2].residual);
    CHECK_FALSE(t.lstm[2].frozen);
    CHECK(t.lstm[0].frozen);
    CHECK(t.lstm[1].frozen);
    REQUIRE(t.head.size() == 1);
    CHECK(t.head[0].D.rows() == 8);
    CHECK(t.head[0].D.cols() == 20);
    CHECK_FALSE(t.head[0].frozen);
}

TEST_CASE("Freeze keeps every base block bit-identical during target training") {
    const auto d = toy();
    const auto pre = preprocess(d);
    std::vector<WindowSet> ws;
    for (const auto& [id, w] : pre.windowsets) {
        ws.push_back(w);
    }
    auto hp = quick_hp();
    hp.layers = 2;
    Rng init(5);
    const Network base = make_network(pre.input_width, pre.output_width, hp, init);
    for (auto scheme : {TlScheme::Dense, TlScheme::AddDense, TlScheme::Lstm}) {
        for (auto mode : {TlMode::Freeze, TlMode::Retrain}) {
            Rng rng(6);
            auto target = build_target(base, scheme, mode, default_q(scheme), d.horizon, rng);
            const auto trained = train(target, ws, 9).net;
            const auto before = parameter_blocks(base);
            const auto after = parameter_blocks(trained);
            // base blocks keep their positions; new blocks are appended after them
            std::size_t changed = 0;
            for (std::size_t i = 0; i < before.size(); ++i) {
                if (scheme == TlScheme::Lstm && before[i].name.rfind("dense", 0) == 0) {
                    continue;  // replaced, not transferred
                }
                const auto& a = after[i];
                REQUIRE(a.name == before[i].name);
                if (!same_block(before[i], a)) {
                    ++changed;
                }
            }
            if (mode == TlMode::Freeze) {
                CHECK(changed == 0);
            } else {
                CHECK(changed > 0);
            }
        }
    }
}

TEST_CASE("Baseline produces one forecast of length M per series") {
    const auto d = toy(20);
    const std::vector<std::uint64_t> seeds{1};
    const auto f = run_strategy(Strategy::baseline(), d, {}, quick_hp(), seeds);
    CHECK(f.size() == 20);
    for (const auto& s : d.series) {
        REQUIRE(f.count(s.id) == 1);
        CHECK(f.at(s.id).size() == 6);
        for (double v : f.at(s.id)) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("Pooled forecasts only original series") {
    const auto d = toy(4);
    AugmentConfig cfg;
    cfg.per_series = 2;
    const auto aug = augment(d, cfg);
    const std::vector<std::uint64_t> seeds{1, 2};
    const auto f = run_strategy(Strategy::pooled(AugmentMethod::MBB), d, aug, quick_hp(), seeds);
    CHECK(f.size() == 4);
    for (const auto& [id, v] : f) {
        CHECK_FALSE(is_augmented_id(id));
    }
    CHECK_THROWS_AS(run_strategy(Strategy::pooled(AugmentMethod::MBB), d, {}, quick_hp(), seeds),
                    std::invalid_argument);
}

TEST_CASE("transfer strategy end to end") {
    const auto d = toy(4);
    AugmentConfig cfg;
    cfg.method = AugmentMethod::GRATIS;
    cfg.per_series = 2;
    const auto aug = augment(d, cfg);
    const std::vector<std::uint64_t> seeds{3};
    const auto s = Strategy::transfer(AugmentMethod::GRATIS, TlScheme::Lstm, TlMode::Retrain);
    const auto f = run_strategy(s, d, aug, quick_hp(), seeds);
    CHECK(f.size() == 4);
    const auto g = transfer_forecast(pretrain_base(d, aug, quick_hp(), 3), s, d, 3);
    CHECK(f == g);
}

TEST_CASE("augmented dataset filtering") {
    const auto d = toy(2);
    std::vector<TimeSeries> aug{{"a__aug0", std::vector<double>(5, 1.0)},
                                {"a__aug1", std::vector<double>(40, 0.0)},
                                {"a__aug2", std::vector<double>(40, 2.0)}};
    const auto kept = augmented_dataset(d, aug);
    REQUIRE(kept.series.size() == 1);
    CHECK(kept.series[0].id == "a__aug2");
    CHECK_THROWS_AS(augmented_dataset(d, {aug[0]}), std::invalid_argument);
}

TEST_CASE("elementwise median") {
    const std::vector<std::vector<double>> odd{{1, 5}, {3, 1}, {2, 9}};
    CHECK(elementwise_median(odd) == std::vector<double>{2, 5});
    const std::vector<std::vector<double>> even{{1, 5}, {3, 1}};
    CHECK(elementwise_median(even) == std::vector<double>{2, 3});
    CHECK_THROWS(elementwise_median(std::vector<std::vector<double>>{}));
}
