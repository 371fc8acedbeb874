#include "augcast/transfer.hpp"

#include "augcast/pipeline.hpp"
#include "augcast/train.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace augcast {

std::string to_string(TlScheme s) {
    switch (s) {
        case TlScheme::Dense:
            return "Dense";
        case TlScheme::AddDense:
            return "AddDense";
        case TlScheme::Lstm:
            return "LSTM";
    }
    return "?";
}

std::string to_string(TlMode m) { return m == TlMode::Freeze ? "Freeze" : "Retrain"; }

int default_q(TlScheme scheme) { return scheme == TlScheme::AddDense ? 2 : 1; }

Strategy Strategy::baseline() { return Strategy{}; }

Strategy Strategy::pooled(AugmentMethod method) {
    Strategy s;
    s.kind = StrategyKind::Pooled;
    s.method = method;
    return s;
}

Strategy Strategy::transfer(AugmentMethod method, TlScheme scheme, TlMode mode) {
    Strategy s;
    s.kind = StrategyKind::Transfer;
    s.method = method;
    s.scheme = scheme;
    s.mode = mode;
    s.q = default_q(scheme);
    return s;
}

Strategy Strategy::parse(const std::string& name) {
    std::vector<std::string> parts;
    std::stringstream ss(name);
    for (std::string p; std::getline(ss, p, '.');) {
        parts.push_back(p);
    }
    auto fail = [&]() -> Strategy { throw std::invalid_argument("unknown strategy '" + name + "'"); };
    if (parts.size() == 2 && parts[0] == "LSTM" && parts[1] == "Baseline") {
        return baseline();
    }
    if (parts.size() == 2 && parts[1] == "Pooled") {
        auto s = pooled(parse_augment_method(parts[0]));
        s.validate();
        return s;
    }
    if (parts.size() == 4 && parts[1] == "TL") {
        TlScheme scheme;
        if (parts[2] == "Dense") {
            scheme = TlScheme::Dense;
        } else if (parts[2] == "AddDense") {
            scheme = TlScheme::AddDense;
        } else if (parts[2] == "LSTM") {
            scheme = TlScheme::Lstm;
        } else {
            return fail();
        }
        TlMode mode;
        if (parts[3] == "Freeze") {
            mode = TlMode::Freeze;
        } else if (parts[3] == "Retrain") {
            mode = TlMode::Retrain;
        } else {
            return fail();
        }
        return transfer(parse_augment_method(parts[0]), scheme, mode);
    }
    return fail();
}

std::string Strategy::name() const {
    switch (kind) {
        case StrategyKind::Baseline:
            return "LSTM.Baseline";
        case StrategyKind::Pooled:
            return to_string(method) + ".Pooled";
        case StrategyKind::Transfer:
            return to_string(method) + ".TL." + to_string(scheme) + "." + to_string(mode);
    }
    return "?";
}

void Strategy::validate() const {
    if (kind == StrategyKind::Pooled && method == AugmentMethod::GRATIS) {
        throw std::invalid_argument("GRATIS series are only used for transfer, not pooled training");
    }
    if (kind == StrategyKind::Transfer && q < 1) {
        throw std::invalid_argument("transfer strategies need q >= 1");
    }
}

std::vector<Strategy> all_strategies() {
    std::vector<Strategy> out{Strategy::baseline(), Strategy::pooled(AugmentMethod::MBB),
                              Strategy::pooled(AugmentMethod::DBA)};
    for (auto method : {AugmentMethod::MBB, AugmentMethod::DBA, AugmentMethod::GRATIS}) {
        for (auto scheme : {TlScheme::Dense, TlScheme::AddDense, TlScheme::Lstm}) {
            for (auto mode : {TlMode::Freeze, TlMode::Retrain}) {
                out.push_back(Strategy::transfer(method, scheme, mode));
            }
        }
    }
    return out;
}

Network build_target(const Network& base, TlScheme scheme, TlMode mode, int q, int target_m, Rng& rng) {
    if (base.lstm.empty() || base.head.empty()) {
        throw std::invalid_argument("build_target: base network has no layers");
    }
    if (target_m < 1) {
        throw std::invalid_argument("build_target: target horizon must be positive");
    }
    if ((scheme == TlScheme::AddDense || scheme == TlScheme::Lstm) && q < 1) {
        throw std::invalid_argument("build_target: q must be >= 1 for AddDense and LSTM schemes");
    }
    Network net = base;
    net.set_frozen(mode == TlMode::Freeze);
    const double init = base.hp.init_std;
    const int base_out = base.output_width();

    switch (scheme) {
        case TlScheme::Dense:
            net.head.push_back(make_dense_layer(base_out, target_m, init, rng));
            break;
        case TlScheme::AddDense:
            for (int k = 0; k + 1 < q; ++k) {
                net.head.push_back(make_dense_layer(base_out, base_out, init, rng));
            }
            net.head.push_back(make_dense_layer(base_out, target_m, init, rng));
            break;
        case TlScheme::Lstm: {
            const int width = base.lstm.back().hidden();
            for (int k = 0; k < q; ++k) {
                net.lstm.push_back(make_lstm_layer(width, width, true, init, rng));
            }
            net.head.clear();
            net.head.push_back(make_dense_layer(width, target_m, init, rng));
            break;
        }
    }
    return net;
}

namespace {

std::vector<WindowSet> window_sets(const Preprocessed& pre) {
    std::vector<WindowSet> out;
    out.reserve(pre.windowsets.size());
    for (const auto& [id, ws] : pre.windowsets) {
        out.push_back(ws);
    }
    return out;
}

std::map<std::string, std::vector<double>> forecast_preprocessed(const Network& net, const Preprocessed& pre,
                                                                 const Dataset& d) {
    std::map<std::string, std::vector<double>> out;
    for (const auto& s : d.series) {
        const auto& ws = pre.windowsets.at(s.id);
        const auto f = forecast(net, ws);
        out[s.id] = postprocess(f, ws.forecast_window, pre.states.at(s.id));
    }
    return out;
}

}  // namespace

Network fit_network(const Dataset& d, const Hyperparameters& hp, std::uint64_t seed) {
    const auto pre = preprocess(d);
    auto rng = make_rng(seed, {0});
    Network net = make_network(pre.input_width, pre.output_width, hp, rng);
    return train(std::move(net), window_sets(pre), derive_seed(seed, {1})).net;
}

std::map<std::string, std::vector<double>> forecast_dataset(const Network& net, const Dataset& d) {
    return forecast_preprocessed(net, preprocess(d), d);
}

Dataset augmented_dataset(const Dataset& like, std::vector<TimeSeries> augmented) {
    Dataset d = like;
    d.series.clear();
    const auto min_len = static_cast<std::size_t>(like.input_window + like.horizon);
    for (auto& s : augmented) {
        const bool usable = s.values.size() >= min_len &&
                            std::any_of(s.values.begin(), s.values.end(), [](double v) { return v > 0.0; });
        if (usable) {
            d.series.push_back(std::move(s));
        }
    }
    if (d.series.empty()) {
        throw std::invalid_argument("no usable augmented series (all too short or identically zero)");
    }
    return d;
}

Network pretrain_base(const Dataset& original, const std::vector<TimeSeries>& augmented, const Hyperparameters& hp,
                      std::uint64_t seed) {
    return fit_network(augmented_dataset(original, augmented), hp, derive_seed(seed, {10}));
}

std::map<std::string, std::vector<double>> transfer_forecast(const Network& base, const Strategy& s,
                                                             const Dataset& original, std::uint64_t seed) {
    s.validate();
    if (s.kind != StrategyKind::Transfer) {
        throw std::invalid_argument("transfer_forecast: not a transfer strategy");
    }
    auto rng = make_rng(seed, {2});
    Network target = build_target(base, s.scheme, s.mode, s.q, original.horizon, rng);
    const auto pre = preprocess(original);
    if (target.input_width() != pre.input_width) {
        throw std::invalid_argument("transfer_forecast: base input width does not match target data");
    }
    target = train(std::move(target), window_sets(pre), derive_seed(seed, {3})).net;
    return forecast_preprocessed(target, pre, original);
}

std::vector<double> elementwise_median(std::span<const std::vector<double>> values) {
    if (values.empty()) {
        throw std::invalid_argument("elementwise_median: no inputs");
    }
    const auto len = values.front().size();
    std::vector<double> out(len);
    std::vector<double> col(values.size());
    for (std::size_t h = 0; h < len; ++h) {
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k].size() != len) {
                throw std::invalid_argument("elementwise_median: length mismatch");
            }
            col[k] = values[k][h];
        }
        std::sort(col.begin(), col.end());
        const auto mid = col.size() / 2;
        out[h] = col.size() % 2 == 1 ? col[mid] : 0.5 * (col[mid - 1] + col[mid]);
    }
    return out;
}

std::map<std::string, std::vector<double>> run_strategy(const Strategy& s, const Dataset& original,
                                                        const std::vector<TimeSeries>& augmented,
                                                        const Hyperparameters& hp,
                                                        std::span<const std::uint64_t> seeds) {
    s.validate();
    if (seeds.empty()) {
        throw std::invalid_argument("run_strategy: at least one training seed required");
    }
    if (s.uses_augmentation() && augmented.empty()) {
        throw std::invalid_argument("run_strategy: " + s.name() + " needs augmented series");
    }

    std::vector<std::map<std::string, std::vector<double>>> runs;
    for (auto seed : seeds) {
        switch (s.kind) {
            case StrategyKind::Baseline:
                runs.push_back(forecast_dataset(fit_network(original, hp, seed), original));
                break;
            case StrategyKind::Pooled: {
                Dataset pooled = original;
                for (const auto& a : augmented_dataset(original, augmented).series) {
                    pooled.series.push_back(a);
                }
                const Network net = fit_network(pooled, hp, seed);
                runs.push_back(forecast_preprocessed(net, preprocess(pooled), original));
                break;
            }
            case StrategyKind::Transfer: {
                const Network base = pretrain_base(original, augmented, hp, seed);
                runs.push_back(transfer_forecast(base, s, original, seed));
                break;
            }
        }
    }

    std::map<std::string, std::vector<double>> out;
    for (const auto& series : original.series) {
        std::vector<std::vector<double>> per_seed;
        per_seed.reserve(runs.size());
        for (const auto& r : runs) {
            per_seed.push_back(r.at(series.id));
        }
        out[series.id] = elementwise_median(per_seed);
    }
    return out;
}

}  // namespace augcast
