#include "augcast/experiment.hpp"

#include "augcast/checkpoint.hpp"
#include "augcast/train.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace augcast {

SmapeMode parse_smape_mode(const std::string& s) {
    if (s == "auto") {
        return SmapeMode::Auto;
    }
    if (s == "standard") {
        return SmapeMode::Standard;
    }
    if (s == "modified") {
        return SmapeMode::Modified;
    }
    throw std::invalid_argument("sMAPE mode must be auto, standard or modified");
}

void ExperimentConfig::validate() const {
    if (strategies.empty()) {
        throw std::invalid_argument("experiment: no strategies selected");
    }
    std::set<std::string> names;
    for (const auto& s : strategies) {
        s.validate();
        if (!names.insert(s.name()).second) {
            throw std::invalid_argument("experiment: strategy " + s.name() + " listed twice");
        }
    }
    if (training_seeds < 1 || generator_seeds < 1) {
        throw std::invalid_argument("experiment: seed counts must be >= 1");
    }
    if (!hyperparameters && budget < 1) {
        throw std::invalid_argument("experiment: tuning budget must be >= 1");
    }
    if (hyperparameters) {
        hyperparameters->validate();
    }
    if (!(smape_epsilon > 0.0)) {
        throw std::invalid_argument("experiment: sMAPE epsilon must be positive");
    }
    if (jobs < 0) {
        throw std::invalid_argument("experiment: jobs must be >= 0");
    }
    augment.validate();
}

namespace {

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. fn must not throw.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const auto workers = std::min<std::size_t>(
        n, static_cast<std::size_t>(jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                fn(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
}

int sample_int(Rng& rng, Hyperparameters::IntRange r) { return std::uniform_int_distribution<int>(r.lo, r.hi)(rng); }

double sample_log(Rng& rng, Hyperparameters::RealRange r) {
    const double v = std::exp(std::uniform_real_distribution<double>(std::log(r.lo), std::log(r.hi))(rng));
    return std::clamp(v, r.lo, r.hi);
}

using ForecastMap = std::map<std::string, std::vector<double>>;

struct Outcome {
    ForecastMap forecasts;
    std::string error;
};

struct Scorer {
    const HoldoutSplit& split;
    int seasonality;
    bool modified;
    double epsilon;

    std::pair<double, double> operator()(const std::string& id, const std::vector<double>& f) const {
        const auto& actual = split.actuals.at(id);
        if (f.size() != actual.size()) {
            throw std::invalid_argument("forecast for '" + id + "' has " + std::to_string(f.size()) +
                                        " steps, expected " + std::to_string(actual.size()));
        }
        const double s = modified ? smape_modified(f, actual, epsilon) : smape(f, actual);
        const double m = mase(f, actual, split.train.at(id).values, seasonality);
        return {s, m};
    }
};

bool dataset_needs_modified(const HoldoutSplit& split) {
    for (const auto& s : split.train.series) {
        if (needs_modified_smape(s.values)) {
            return true;
        }
    }
    for (const auto& [id, a] : split.actuals) {
        if (needs_modified_smape(a)) {
            return true;
        }
    }
    return false;
}

/// Fills result matrices from per-strategy lists of forecast maps (one per generator seed).
void score_all(ExperimentResult& res, const HoldoutSplit& split, const std::vector<std::string>& order,
               const std::map<std::string, std::vector<ForecastMap>>& runs, SmapeMode mode, double epsilon) {
    res.modified_smape = mode == SmapeMode::Modified || (mode == SmapeMode::Auto && dataset_needs_modified(split));
    const Scorer score{split, split.train.seasonality, res.modified_smape, epsilon};

    std::vector<std::string> ids;
    for (const auto& s : split.train.series) {
        ids.push_back(s.id);
    }
    res.smape = ErrorMatrix{ids, {}, std::vector<std::vector<double>>(ids.size())};
    res.mase = ErrorMatrix{ids, {}, std::vector<std::vector<double>>(ids.size())};

    for (const auto& name : order) {
        auto it = runs.find(name);
        if (it == runs.end() || res.failures.count(name) > 0) {
            continue;
        }
        const auto& per_gen = it->second;
        std::vector<double> s_col(ids.size(), 0.0);
        std::vector<double> m_col(ids.size(), 0.0);
        ForecastMap mean_forecast;
        try {
            for (std::size_t r = 0; r < ids.size(); ++r) {
                std::vector<double> avg;
                for (const auto& fm : per_gen) {
                    const auto& f = fm.at(ids[r]);
                    const auto [se, me] = score(ids[r], f);
                    s_col[r] += se / static_cast<double>(per_gen.size());
                    m_col[r] += me / static_cast<double>(per_gen.size());
                    if (avg.empty()) {
                        avg.assign(f.size(), 0.0);
                    }
                    for (std::size_t h = 0; h < f.size(); ++h) {
                        avg[h] += f[h] / static_cast<double>(per_gen.size());
                    }
                }
                if (!std::isfinite(s_col[r]) || !std::isfinite(m_col[r])) {
                    throw std::domain_error("non-finite error for series '" + ids[r] + "'");
                }
                mean_forecast[ids[r]] = std::move(avg);
            }
        } catch (const std::exception& e) {
            res.failures[name] = std::string("scoring failed: ") + e.what();
            continue;
        }
        res.smape.columns.push_back(name);
        res.mase.columns.push_back(name);
        for (std::size_t r = 0; r < ids.size(); ++r) {
            res.smape.cells[r].push_back(s_col[r]);
            res.mase.cells[r].push_back(m_col[r]);
        }
        res.forecasts[name] = std::move(mean_forecast);
    }

    res.benchmark_smape.clear();
    res.benchmark_mase.clear();
    for (const auto& s : split.train.series) {
        const auto f = seasonal_naive(s.values, split.train.seasonality, split.train.horizon);
        const auto [se, me] = score(s.id, f);
        res.benchmark_smape.push_back(se);
        res.benchmark_mase.push_back(me);
    }
}

std::string fmt_num(double v) { return fmt::format("{:.10g}", v); }

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace

Hyperparameters sample_hyperparameters(Rng& rng) {
    Hyperparameters hp;
    hp.cell_dim = sample_int(rng, Hyperparameters::kCellDim);
    hp.minibatch = sample_int(rng, Hyperparameters::kMinibatch);
    hp.epoch_size = sample_int(rng, Hyperparameters::kEpochSize);
    hp.max_epochs = sample_int(rng, Hyperparameters::kMaxEpochs);
    hp.layers = sample_int(rng, Hyperparameters::kLayers);
    hp.noise_std = sample_log(rng, Hyperparameters::kNoiseStd);
    hp.init_std = sample_log(rng, Hyperparameters::kInitStd);
    hp.l2_weight = sample_log(rng, Hyperparameters::kL2Weight);
    return hp;
}

TuneResult tune(const Dataset& train_set, int budget, std::uint64_t seed) {
    if (budget < 1) {
        throw std::invalid_argument("tune: budget must be >= 1");
    }
    const auto pre = preprocess(train_set);
    std::vector<WindowSet> windows;
    for (const auto& [id, ws] : pre.windowsets) {
        windows.push_back(ws);
    }
    Rng sampler = make_rng(seed, {0});
    TuneResult res;
    res.best_loss = std::numeric_limits<double>::infinity();
    for (int c = 0; c < budget; ++c) {
        const auto hp = sample_hyperparameters(sampler);
        const auto cs = derive_seed(seed, {1, static_cast<std::uint64_t>(c)});
        auto init = make_rng(cs, {0});
        const auto tr = train(make_network(pre.input_width, pre.output_width, hp, init), windows, derive_seed(cs, {1}));
        const double best = tr.validation_losses.at(static_cast<std::size_t>(tr.best_epoch));
        res.trials.emplace_back(hp, best);
        if (best < res.best_loss) {
            res.best_loss = best;
            res.best = hp;
        }
    }
    return res;
}

ExperimentResult run_experiment(const Dataset& full, const ExperimentConfig& cfg) {
    cfg.validate();
    const auto split = split_holdout(full);
    const Dataset& original = split.train;

    ExperimentResult res;
    res.dataset = full.name;
    res.hyperparameters = cfg.hyperparameters ? *cfg.hyperparameters
                                              : tune(original, cfg.budget, derive_seed(cfg.seed, {1})).best;
    for (int s = 0; s < cfg.training_seeds; ++s) {
        res.training_seeds.push_back(derive_seed(cfg.seed, {3, static_cast<std::uint64_t>(s)}));
    }
    for (int g = 0; g < cfg.generator_seeds; ++g) {
        res.generator_seeds.push_back(derive_seed(cfg.seed, {2, static_cast<std::uint64_t>(g)}));
    }
    const auto n_seeds = res.training_seeds.size();
    const auto n_gen = res.generator_seeds.size();
    const auto& hp = res.hyperparameters;

    std::set<AugmentMethod> methods;
    std::set<AugmentMethod> transfer_methods;
    for (const auto& s : cfg.strategies) {
        if (s.uses_augmentation()) {
            methods.insert(s.method);
        }
        if (s.kind == StrategyKind::Transfer) {
            transfer_methods.insert(s.method);
        }
    }

    // Phase 1: augmented series per (method, generator seed).
    struct AugSlot {
        std::vector<TimeSeries> series;
        std::string error;
    };
    std::map<std::pair<AugmentMethod, std::size_t>, AugSlot> aug;
    std::vector<std::pair<AugmentMethod, std::size_t>> aug_keys;
    for (auto m : methods) {
        for (std::size_t g = 0; g < n_gen; ++g) {
            aug_keys.emplace_back(m, g);
            aug[{m, g}];
        }
    }
    parallel_for(aug_keys.size(), cfg.jobs, [&](std::size_t i) {
        const auto [m, g] = aug_keys[i];
        auto& slot = aug.at(aug_keys[i]);
        try {
            AugmentConfig ac = cfg.augment;
            ac.method = m;
            ac.seed = derive_seed(res.generator_seeds[g], {static_cast<std::uint64_t>(m)});
            slot.series = augment(original, ac);
        } catch (const std::exception& e) {
            slot.error = fmt::format("{} augmentation (generator seed {}): {}", to_string(m), g, e.what());
        }
    });

    // Phase 2: base networks shared by every transfer variant of a method.
    struct BaseSlot {
        std::optional<Network> net;
        std::string error;
    };
    std::map<std::tuple<AugmentMethod, std::size_t, std::size_t>, BaseSlot> bases;
    std::vector<std::tuple<AugmentMethod, std::size_t, std::size_t>> base_keys;
    for (auto m : transfer_methods) {
        for (std::size_t g = 0; g < n_gen; ++g) {
            for (std::size_t s = 0; s < n_seeds; ++s) {
                base_keys.emplace_back(m, g, s);
                bases[{m, g, s}];
            }
        }
    }
    parallel_for(base_keys.size(), cfg.jobs, [&](std::size_t i) {
        const auto [m, g, s] = base_keys[i];
        auto& slot = bases.at(base_keys[i]);
        const auto& a = aug.at({m, g});
        if (!a.error.empty()) {
            slot.error = a.error;
            return;
        }
        try {
            slot.net = pretrain_base(original, a.series, hp, res.training_seeds[s]);
        } catch (const std::exception& e) {
            slot.error = fmt::format("{} base training: {}", to_string(m), e.what());
        }
    });

    // Phase 3: one forecast per (strategy, generator seed, training seed).
    struct Cell {
        std::size_t strategy;
        std::size_t gen;
        std::size_t seed;
        ForecastMap forecast;
        std::string error;
    };
    std::vector<Cell> cells;
    for (std::size_t k = 0; k < cfg.strategies.size(); ++k) {
        const auto gens = cfg.strategies[k].uses_augmentation() ? n_gen : 1;
        for (std::size_t g = 0; g < gens; ++g) {
            for (std::size_t s = 0; s < n_seeds; ++s) {
                cells.push_back(Cell{k, g, s, {}, {}});
            }
        }
    }
    static const std::vector<TimeSeries> kNone;
    parallel_for(cells.size(), cfg.jobs, [&](std::size_t i) {
        auto& c = cells[i];
        const auto& st = cfg.strategies[c.strategy];
        const auto seed = res.training_seeds[c.seed];
        try {
            if (st.kind == StrategyKind::Transfer) {
                const auto& b = bases.at({st.method, c.gen, c.seed});
                if (!b.error.empty()) {
                    c.error = b.error;
                    return;
                }
                c.forecast = transfer_forecast(*b.net, st, original, seed);
                return;
            }
            const std::vector<TimeSeries>* series = &kNone;
            if (st.uses_augmentation()) {
                const auto& a = aug.at({st.method, c.gen});
                if (!a.error.empty()) {
                    c.error = a.error;
                    return;
                }
                series = &a.series;
            }
            c.forecast = run_strategy(st, original, *series, hp, std::span<const std::uint64_t>(&seed, 1));
        } catch (const std::exception& e) {
            c.error = e.what();
        }
    });

    // Median across training seeds, kept per generator seed.
    std::map<std::string, std::vector<ForecastMap>> runs;
    std::vector<std::string> order;
    std::size_t pos = 0;
    for (std::size_t k = 0; k < cfg.strategies.size(); ++k) {
        const auto name = cfg.strategies[k].name();
        order.push_back(name);
        const auto gens = cfg.strategies[k].uses_augmentation() ? n_gen : 1;
        std::vector<ForecastMap> per_gen;
        for (std::size_t g = 0; g < gens; ++g) {
            std::vector<const Cell*> group;
            for (std::size_t s = 0; s < n_seeds; ++s) {
                group.push_back(&cells[pos++]);
            }
            if (res.failures.count(name) > 0) {
                continue;
            }
            ForecastMap merged;
            for (const auto* c : group) {
                if (!c->error.empty()) {
                    res.failures[name] = c->error;
                    break;
                }
            }
            if (res.failures.count(name) > 0) {
                continue;
            }
            for (const auto& series : original.series) {
                std::vector<std::vector<double>> per_seed;
                for (const auto* c : group) {
                    per_seed.push_back(c->forecast.at(series.id));
                }
                merged[series.id] = elementwise_median(per_seed);
            }
            per_gen.push_back(std::move(merged));
        }
        if (res.failures.count(name) == 0) {
            runs[name] = std::move(per_gen);
        }
    }

    score_all(res, split, order, runs, cfg.smape_mode, cfg.smape_epsilon);
    return res;
}

ExperimentResult evaluate_forecasts(const Dataset& full,
                                    const std::map<std::string, std::map<std::string, std::vector<double>>>& forecasts,
                                    SmapeMode mode, double epsilon) {
    const auto split = split_holdout(full);
    ExperimentResult res;
    res.dataset = full.name;

    std::vector<std::string> order;
    for (const auto& s : all_strategies()) {
        if (forecasts.count(s.name()) > 0) {
            order.push_back(s.name());
        }
    }
    for (const auto& [name, f] : forecasts) {
        if (std::find(order.begin(), order.end(), name) == order.end()) {
            order.push_back(name);
        }
    }
    std::map<std::string, std::vector<ForecastMap>> runs;
    for (const auto& name : order) {
        const auto& f = forecasts.at(name);
        for (const auto& s : split.train.series) {
            if (f.count(s.id) == 0) {
                res.failures[name] = "missing forecast for series '" + s.id + "'";
                break;
            }
        }
        runs[name] = {f};
    }
    score_all(res, split, order, runs, mode, epsilon);
    return res;
}

std::map<std::string, std::map<std::string, std::vector<double>>> read_forecasts_csv(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::map<std::string, std::map<std::string, std::vector<double>>> out;
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw ParseError(path.string() + ": " + msg, line_no);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1) {
            if (line != "strategy,series_id,h,value") {
                fail("expected header 'strategy,series_id,h,value'");
            }
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            fields.push_back(f);
        }
        if (fields.size() != 4) {
            fail("expected 4 fields");
        }
        std::size_t h = 0;
        double v = 0.0;
        try {
            std::size_t used = 0;
            h = std::stoul(fields[2], &used);
            if (used != fields[2].size()) {
                fail("bad horizon index");
            }
            v = std::stod(fields[3], &used);
            if (used != fields[3].size()) {
                fail("bad value");
            }
        } catch (const std::logic_error&) {
            fail("bad number");
        }
        auto& vec = out[fields[0]][fields[1]];
        if (h != vec.size() + 1) {
            fail("horizon index must count up from 1");
        }
        vec.push_back(v);
    }
    if (line_no == 0) {
        throw ParseError(path.string() + ": empty file", 1);
    }
    return out;
}

void write_forecasts_csv(const std::filesystem::path& path,
                         const std::map<std::string, std::map<std::string, std::vector<double>>>& forecasts,
                         const std::vector<std::string>& strategy_order, const std::vector<std::string>& series_order) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << "strategy,series_id,h,value\n";
    for (const auto& name : strategy_order) {
        auto it = forecasts.find(name);
        if (it == forecasts.end()) {
            continue;
        }
        for (const auto& id : series_order) {
            const auto& f = it->second.at(id);
            for (std::size_t h = 0; h < f.size(); ++h) {
                out << name << ',' << id << ',' << h + 1 << ',' << fmt::format("{}", f[h]) << '\n';
            }
        }
    }
}

std::string config_fingerprint(const ExperimentConfig& cfg, const std::string& dataset) {
    std::string s = "dataset=" + dataset + "\nstrategies=";
    for (const auto& st : cfg.strategies) {
        s += st.name() + fmt::format("[q={}];", st.q);
    }
    const auto& a = cfg.augment;
    s += fmt::format("\ntraining_seeds={}\ngenerator_seeds={}\nseed={}\n", cfg.training_seeds, cfg.generator_seeds,
                     cfg.seed);
    s += fmt::format("per_series={}\ntotal={}\nblock_length={}\ndba_iterations={}\nmar_components={}\nmar_length={}\n",
                     a.per_series, a.total_override.value_or(-1), a.block_length.value_or(-1), a.dba_iterations,
                     a.mar_components, a.mar_length.value_or(-1));
    if (cfg.hyperparameters) {
        s += "hyperparameters=" + hyperparameters_json(*cfg.hyperparameters) + "\n";
    } else {
        s += fmt::format("budget={}\n", cfg.budget);
    }
    const char* modes[] = {"auto", "standard", "modified"};
    s += fmt::format("smape={}\nepsilon={}\n", modes[static_cast<int>(cfg.smape_mode)], fmt_num(cfg.smape_epsilon));
    return s;
}

void write_experiment_outputs(const ExperimentResult& r, const ExperimentConfig& cfg,
                              const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) {
            throw std::runtime_error("cannot write " + (dir / name).string());
        }
        return out;
    };

    const auto& names = r.smape.columns;
    write_forecasts_csv(dir / "forecasts.csv", r.forecasts, names, r.smape.rows);

    const Summary ss = aggregate(r.smape);
    const Summary ms = aggregate(r.mase);
    {
        auto out = open("metrics.csv");
        out << "dataset,method,metric,mean,median\n";
        for (std::size_t c = 0; c < names.size(); ++c) {
            out << r.dataset << ',' << names[c] << ",sMAPE," << fmt_num(ss.mean[c]) << ',' << fmt_num(ss.median[c])
                << '\n';
            out << r.dataset << ',' << names[c] << ",MASE," << fmt_num(ms.mean[c]) << ',' << fmt_num(ms.median[c])
                << '\n';
        }
    }
    {
        auto out = open("benchmarks.csv");
        out << "dataset,method,metric,mean,median\n";
        if (!r.benchmark_smape.empty()) {
            auto mean = [](const std::vector<double>& v) {
                return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
            };
            out << r.dataset << ",SeasonalNaive,sMAPE," << fmt_num(mean(r.benchmark_smape)) << ','
                << fmt_num(median(r.benchmark_smape)) << '\n';
            out << r.dataset << ",SeasonalNaive,MASE," << fmt_num(mean(r.benchmark_mase)) << ','
                << fmt_num(median(r.benchmark_mase)) << '\n';
        }
    }
    {
        std::vector<double> rs(names.size(), 1.0);
        std::vector<double> rm(names.size(), 1.0);
        if (names.size() >= 2) {
            rs = average_ranks(r.smape);
            rm = average_ranks(r.mase);
        }
        std::vector<std::size_t> idx(names.size());
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return rs[a] < rs[b]; });
        auto out = open("ranks.csv");
        out << "method,rank_smape,rank_mase\n";
        for (auto c : idx) {
            out << names[c] << ',' << fmt_num(rs[c]) << ',' << fmt_num(rm[c]) << '\n';
        }
    }
    {
        auto out = open("stats.txt");
        out << "dataset: " << r.dataset << '\n';
        out << "sMAPE variant: " << (r.modified_smape ? "modified" : "standard") << "\n\n";
        for (const auto& [label, m] : {std::pair<const char*, const ErrorMatrix*>{"sMAPE", &r.smape},
                                       std::pair<const char*, const ErrorMatrix*>{"MASE", &r.mase}}) {
            if (m->columns.size() < 2) {
                out << label << ": fewer than two methods, no test performed\n\n";
                continue;
            }
            out << format_stat_report(statistical_report(*m), label) << '\n';
        }
    }
    {
        nlohmann::ordered_json j;
        const auto fp = config_fingerprint(cfg, r.dataset);
        j["version"] = std::string(kVersion);
        j["dataset"] = r.dataset;
        j["config_hash"] = fmt::format("{:016x}", fnv1a(fp));
        j["seed"] = cfg.seed;
        j["training_seeds"] = r.training_seeds;
        j["generator_seeds"] = r.generator_seeds;
        j["strategies"] = names;
        j["failed"] = nlohmann::ordered_json::object();
        for (const auto& [k, v] : r.failures) {
            j["failed"][k] = v;
        }
        j["modified_smape"] = r.modified_smape;
        auto out = open("manifest.json");
        out << j.dump(2) << '\n';
    }
    {
        auto out = open("hyperparameters.json");
        out << hyperparameters_json(r.hyperparameters) << '\n';
    }
    const auto err = dir / "errors.log";
    if (r.failures.empty()) {
        std::filesystem::remove(err);
    } else {
        auto out = open("errors.log");
        for (const auto& [k, v] : r.failures) {
            out << k << ": " << v << '\n';
        }
    }
}

}  // namespace augcast
