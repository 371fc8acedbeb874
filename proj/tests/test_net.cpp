#include "augcast/checkpoint.hpp"
#include "augcast/net.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace augcast;

namespace {

Hyperparameters small_hp(int layers = 2, int cell = 6) {
    Hyperparameters hp;
    hp.layers = layers;
    hp.cell_dim = cell;
    hp.init_std = 0.3;  // outside the tuning box on purpose: larger weights exercise the nonlinearities
    hp.l2_weight = 1e-3;
    return hp;
}

SeriesData random_series(std::mt19937_64& rng, int in, int m, int t) {
    std::normal_distribution<double> g(0.0, 1.0);
    SeriesData s;
    s.inputs.resize(in, t);
    s.targets.resize(m, t);
    for (Eigen::Index i = 0; i < s.inputs.size(); ++i) {
        s.inputs.data()[i] = g(rng);
    }
    for (Eigen::Index i = 0; i < s.targets.size(); ++i) {
        s.targets.data()[i] = 2.0 * g(rng);
    }
    return s;
}

void randomize(Network& net, std::mt19937_64& rng, double sd) {
    std::normal_distribution<double> g(0.0, sd);
    for (auto& b : parameter_blocks(net)) {
        for (double& v : b.values) {
            v = g(rng);
        }
    }
}

}  // namespace

TEST_CASE("hyperparameter box") {
    Hyperparameters hp;
    CHECK_NOTHROW(hp.validate());
    CHECK(hp.cell_dim == 20);
    hp.cell_dim = 51;
    CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
    hp = {};
    hp.l2_weight = 9e-4;
    CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
    hp = {};
    hp.layers = 0;
    CHECK_THROWS_AS(hp.validate(), std::invalid_argument);
}

TEST_CASE("architecture and parameter blocks") {
    Rng rng(1);
    const auto net = make_network(7, 3, small_hp(3, 5), rng);
    REQUIRE(net.lstm.size() == 3);
    CHECK_FALSE(net.lstm[0].residual);
    CHECK(net.lstm[1].residual);
    CHECK(net.lstm[2].residual);
    CHECK(net.input_width() == 7);
    CHECK(net.output_width() == 3);
    for (const auto& l : net.lstm) {
        CHECK(l.b.segment(0, 5).isZero());
        CHECK(l.b.segment(5, 5).isOnes());
        CHECK(l.b.segment(10, 10).isZero());
    }
    const std::size_t expected = (20 * 7 + 20 * 5 + 20) + 2 * (20 * 5 + 20 * 5 + 20) + 3 * 5;
    CHECK(net.parameter_count() == expected);
    const auto blocks = parameter_blocks(net);
    REQUIRE(blocks.size() == 10);
    CHECK(blocks[0].name == "lstm0.W");
    CHECK(blocks[2].name == "lstm0.b");
    CHECK_FALSE(blocks[2].weight);
    CHECK(blocks[9].name == "dense0.D");
    auto zero = net.zeros_like();
    CHECK(zero.parameter_count() == expected);
    for (const auto& b : parameter_blocks(zero)) {
        CHECK(std::all_of(b.values.begin(), b.values.end(), [](double v) { return v == 0.0; }));
    }
    CHECK_THROWS_AS(make_lstm_layer(4, 5, true, 0.1, rng), std::invalid_argument);
}

TEST_CASE("zero parameters predict zero; zero residual layers pass through") {
    std::mt19937_64 g(2);
    Rng rng(2);
    auto net = make_network(4, 3, small_hp(3, 5), rng).zeros_like();
    const auto s = random_series(g, 4, 3, 6);
    CHECK(predict_sequence(net, s.inputs).isZero());

    Rng rng2(3);
    auto deep = make_network(4, 3, small_hp(3, 5), rng2);
    randomize(deep, g, 0.4);
    for (std::size_t l = 1; l < deep.lstm.size(); ++l) {
        deep.lstm[l].W.setZero();
        deep.lstm[l].U.setZero();
        deep.lstm[l].b.setZero();
    }
    Network shallow = deep;
    shallow.lstm.resize(1);
    // zero residual layer: h = 0.5 * tanh(0.5 * tanh(0)) = 0, output = input
    CHECK((predict_sequence(deep, s.inputs) - predict_sequence(shallow, s.inputs)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("each series starts from a zero state") {
    std::mt19937_64 g(4);
    Rng rng(4);
    auto net = make_network(3, 2, small_hp(), rng);
    randomize(net, g, 0.5);
    std::vector<SeriesData> batch{random_series(g, 3, 2, 5), random_series(g, 3, 2, 7), random_series(g, 3, 2, 4)};
    std::vector<SeriesData> reversed(batch.rbegin(), batch.rend());
    Network ga;
    Network gb;
    const double la = loss_and_gradient(net, batch, nullptr, &ga);
    const double lb = loss_and_gradient(net, reversed, nullptr, &gb);
    CHECK(la == doctest::Approx(lb).epsilon(1e-14));
    const auto pa = predict_sequence(net, batch[1].inputs);
    predict_sequence(net, batch[0].inputs);
    CHECK(predict_sequence(net, batch[1].inputs) == pa);
}

TEST_CASE("loss arithmetic") {
    Rng rng(5);
    Hyperparameters hp;
    auto net = make_network(2, 2, hp, rng).zeros_like();
    net.hp.l2_weight = 0.0;
    const std::vector<std::vector<double>> preds{{1.0, 1.0}};
    const std::vector<std::vector<double>> targets{{0.0, 2.0}};
    CHECK(loss(preds, preds, net) == 0.0);
    CHECK(loss(preds, targets, net) == 1.0);

    net.hp.l2_weight = 2e-4;
    net.head[0].D(0, 0) = 3.0;
    CHECK(loss(preds, targets, net) == doctest::Approx(1.0 + 9.0 * 2e-4).epsilon(1e-15));
    net.lstm[0].b(0) = 5.0;  // biases are not regularised
    CHECK(l2_penalty(net) == doctest::Approx(9.0 * 2e-4).epsilon(1e-15));
    net.head[0].frozen = true;
    CHECK(l2_penalty(net) == 0.0);
}

TEST_CASE("L2 gradient term is 2 * l2_weight * w") {
    std::mt19937_64 g(6);
    Rng rng(6);
    auto net = make_network(3, 2, small_hp(), rng);
    randomize(net, g, 0.5);
    const std::vector<SeriesData> batch{random_series(g, 3, 2, 5)};
    Network with;
    loss_and_gradient(net, batch, nullptr, &with);
    Network plain_net = net;
    plain_net.hp.l2_weight = 0.0;
    Network without;
    loss_and_gradient(plain_net, batch, nullptr, &without);
    const auto pw = parameter_blocks(net);
    const auto a = parameter_blocks(with);
    const auto b = parameter_blocks(without);
    for (std::size_t i = 0; i < pw.size(); ++i) {
        for (std::size_t j = 0; j < pw[i].values.size(); ++j) {
            const double expected = pw[i].weight ? 2.0 * net.hp.l2_weight * pw[i].values[j] : 0.0;
            CHECK(a[i].values[j] - b[i].values[j] == doctest::Approx(expected).epsilon(1e-9).scale(1e-12));
        }
    }
}

TEST_CASE("analytic gradient matches central differences") {
    std::mt19937_64 g(7);
    Rng rng(7);
    auto net = make_network(4, 3, small_hp(2, 5), rng);
    randomize(net, g, 0.5);
    const std::vector<SeriesData> batch{random_series(g, 4, 3, 6), random_series(g, 4, 3, 4)};
    Network grad;
    loss_and_gradient(net, batch, nullptr, &grad);
    const auto gb = parameter_blocks(grad);
    auto pb = parameter_blocks(net);
    const double h = 1e-5;
    double worst = 0.0;
    for (std::size_t i = 0; i < pb.size(); ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, pb[i].values.size() - 1);
        for (int k = 0; k < 20; ++k) {
            const auto j = pick(g);
            const double keep = pb[i].values[j];
            pb[i].values[j] = keep + h;
            const double up = loss_and_gradient(net, batch, nullptr, nullptr);
            pb[i].values[j] = keep - h;
            const double down = loss_and_gradient(net, batch, nullptr, nullptr);
            pb[i].values[j] = keep;
            const double numeric = (up - down) / (2.0 * h);
            const double analytic = gb[i].values[j];
            const double rel = std::abs(numeric - analytic) / std::max({std::abs(numeric), std::abs(analytic), 1e-6});
            worst = std::max(worst, rel);
        }
    }
    CHECK(worst < 1e-4);
}

TEST_CASE("frozen blocks receive zero gradient") {
    std::mt19937_64 g(8);
    Rng rng(8);
    auto net = make_network(3, 2, small_hp(3, 4), rng);
    randomize(net, g, 0.5);
    net.lstm[0].frozen = true;
    net.lstm[1].frozen = true;
    const std::vector<SeriesData> batch{random_series(g, 3, 2, 5)};
    Network grad;
    loss_and_gradient(net, batch, nullptr, &grad);
    for (const auto& b : parameter_blocks(grad)) {
        const bool zero = std::all_of(b.values.begin(), b.values.end(), [](double v) { return v == 0.0; });
        if (b.name.rfind("lstm0", 0) == 0 || b.name.rfind("lstm1", 0) == 0) {
            CHECK(zero);
        } else {
            CHECK_FALSE(zero);
        }
    }
}

TEST_CASE("checkpoint roundtrip is bit-identical") {
    std::mt19937_64 g(9);
    Rng rng(9);
    auto net = make_network(5, 3, small_hp(3, 4), rng);
    randomize(net, g, 1.0 / 3.0);
    net.lstm[1].frozen = true;
    net.head.push_back(make_dense_layer(3, 2, 0.1, rng));
    const auto text = checkpoint_json(net);
    const auto back = network_from_json(text);
    CHECK(back.hp == net.hp);
    REQUIRE(back.lstm.size() == net.lstm.size());
    REQUIRE(back.head.size() == net.head.size());
    CHECK(back.lstm[1].frozen);
    CHECK(back.lstm[2].residual);
    const auto a = parameter_blocks(net);
    const auto b = parameter_blocks(back);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(std::equal(a[i].values.begin(), a[i].values.end(), b[i].values.begin(), b[i].values.end()));
    }
    CHECK(checkpoint_json(back) == text);
    CHECK_THROWS(network_from_json("{\"format\": \"other\"}"));
    CHECK(hyperparameters_from_json(hyperparameters_json(net.hp)) == net.hp);
}
