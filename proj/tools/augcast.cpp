// augcast: command-line front end for augmentation, training, forecasting and experiments.

#include "augcast/augment.hpp"
#include "augcast/checkpoint.hpp"
#include "augcast/data.hpp"
#include "augcast/experiment.hpp"
#include "augcast/synthetic.hpp"
#include "augcast/train.hpp"
#include "augcast/transfer.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace augcast;

namespace {

enum Exit { kOk = 0, kConfig = 1, kRuntime = 2 };

/// Raised for problems with user input, mapped to exit code 1.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataArgs {
    std::string dataset;
    std::string meta;

    void add(CLI::App* app) {
        app->add_option("--dataset", dataset, "Series CSV (series_id,t,value)")->required();
        app->add_option("--meta", meta, "Metadata file")->required();
    }

    Dataset load() const {
        try {
            return load_dataset(dataset, fs::path(meta));
        } catch (const std::exception& e) {
            throw ConfigError(e.what());
        }
    }
};

struct AugmentArgs {
    std::optional<int> block_length;
    int dba_iters = 10;
    int per_series = 10;
    std::optional<int> total;

    void add(CLI::App* app) {
        app->add_option("--block-length", block_length, "MBB block length (default max(2S, 8))");
        app->add_option("--dba-iters", dba_iters, "DBA iterations")->capture_default_str();
        app->add_option("--per-series", per_series, "Generated series per original series")->capture_default_str();
        app->add_option("--total", total, "Total generated series (overrides --per-series)");
    }

    AugmentConfig config() const {
        AugmentConfig c;
        c.block_length = block_length;
        c.dba_iterations = dba_iters;
        c.per_series = per_series;
        c.total_override = total;
        return c;
    }
};

Hyperparameters hyperparameters_or_default(const std::string& path) {
    if (path.empty()) {
        return Hyperparameters{};
    }
    try {
        auto hp = load_hyperparameters(path);
        hp.validate();
        return hp;
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::vector<Strategy> parse_strategies(const std::vector<std::string>& names, int q) {
    if (names.empty()) {
        return all_strategies();
    }
    std::vector<Strategy> out;
    for (const auto& list : names) {
        std::stringstream ss(list);
        for (std::string n; std::getline(ss, n, ',');) {
            if (n == "all") {
                for (auto s : all_strategies()) {
                    out.push_back(s);
                }
                continue;
            }
            auto s = Strategy::parse(n);
            if (q > 0 && s.kind == StrategyKind::Transfer) {
                s.q = q;
            }
            out.push_back(s);
        }
    }
    return out;
}

TlScheme parse_scheme(const std::string& s) {
    if (s == "Dense") {
        return TlScheme::Dense;
    }
    if (s == "AddDense") {
        return TlScheme::AddDense;
    }
    if (s == "LSTM") {
        return TlScheme::Lstm;
    }
    throw ConfigError("unknown scheme '" + s + "' (expected Dense, AddDense or LSTM)");
}

TlMode parse_mode(const std::string& s) {
    if (s == "Freeze") {
        return TlMode::Freeze;
    }
    if (s == "Retrain") {
        return TlMode::Retrain;
    }
    throw ConfigError("unknown mode '" + s + "' (expected Freeze or Retrain)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time series augmentation and transfer learning for global LSTM forecasters"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // augment
    auto* aug = app.add_subcommand("augment", "Generate augmented series");
    DataArgs aug_data;
    AugmentArgs aug_args;
    std::string aug_method = "MBB";
    std::uint64_t aug_seed = 0;
    std::string aug_out;
    aug_data.add(aug);
    aug_args.add(aug);
    aug->add_option("--method", aug_method, "MBB, DBA or GRATIS")->capture_default_str();
    aug->add_option("--seed", aug_seed, "Generator seed")->capture_default_str();
    aug->add_option("--out", aug_out, "Output CSV")->required();

    // tune
    auto* tun = app.add_subcommand("tune", "Random search over the hyperparameter box");
    DataArgs tun_data;
    int tun_budget = 20;
    std::uint64_t tun_seed = 0;
    std::string tun_out;
    tun_data.add(tun);
    tun->add_option("--budget", tun_budget, "Number of candidates")->capture_default_str();
    tun->add_option("--seed", tun_seed, "Search seed")->capture_default_str();
    tun->add_option("--out", tun_out, "Output hyperparameter JSON")->required();

    // train
    auto* trn = app.add_subcommand("train", "Train a network (optionally fine-tune a base checkpoint)");
    DataArgs trn_data;
    std::string trn_hp;
    std::string trn_augmented;
    std::string trn_base;
    std::string trn_scheme = "Dense";
    std::string trn_mode = "Freeze";
    int trn_q = 0;
    std::uint64_t trn_seed = 0;
    std::string trn_out;
    trn_data.add(trn);
    trn->add_option("--hp", trn_hp, "Hyperparameter JSON (defaults when absent)");
    trn->add_option("--augmented", trn_augmented, "Augmented series CSV pooled with the dataset");
    trn->add_option("--base", trn_base, "Base checkpoint to transfer from");
    trn->add_option("--scheme", trn_scheme, "Dense, AddDense or LSTM")->capture_default_str();
    trn->add_option("--mode", trn_mode, "Freeze or Retrain")->capture_default_str();
    trn->add_option("--q", trn_q, "Number of added layers (scheme default when 0)");
    trn->add_option("--seed", trn_seed, "Training seed")->capture_default_str();
    trn->add_option("--out", trn_out, "Output checkpoint")->required();

    // forecast
    auto* fct = app.add_subcommand("forecast", "Forecast the next M steps with a checkpoint");
    DataArgs fct_data;
    std::string fct_model;
    std::string fct_strategy = "LSTM.Baseline";
    std::string fct_out;
    fct_data.add(fct);
    fct->add_option("--model", fct_model, "Checkpoint")->required();
    fct->add_option("--strategy", fct_strategy, "Label written to the strategy column")->capture_default_str();
    fct->add_option("--out", fct_out, "Output forecast CSV")->required();

    // evaluate
    auto* evl = app.add_subcommand("evaluate", "Score forecasts against the last M observations");
    DataArgs evl_data;
    std::string evl_forecasts;
    std::string evl_out;
    std::string evl_smape = "auto";
    double evl_eps = 0.1;
    evl_data.add(evl);
    evl->add_option("--forecasts", evl_forecasts, "Forecast CSV (strategy,series_id,h,value)")->required();
    evl->add_option("--out", evl_out, "Output directory")->required();
    evl->add_option("--smape", evl_smape, "auto, standard or modified")->capture_default_str();
    evl->add_option("--epsilon-smape", evl_eps, "Modified sMAPE epsilon")->capture_default_str();

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run the strategy matrix on the holdout split");
    DataArgs exp_data;
    AugmentArgs exp_aug;
    std::vector<std::string> exp_strategies;
    int exp_q = 0;
    int exp_seeds = 10;
    int exp_gen_seeds = 3;
    int exp_budget = 20;
    std::string exp_hp;
    std::uint64_t exp_seed = 0;
    int exp_jobs = 0;
    std::string exp_out;
    std::string exp_smape = "auto";
    double exp_eps = 0.1;
    exp_data.add(exp);
    exp_aug.add(exp);
    exp->add_option("--strategy", exp_strategies, "Strategy names, repeatable or comma separated (default all)");
    exp->add_option("--q", exp_q, "Added layers for transfer strategies (scheme default when 0)");
    exp->add_option("--seeds", exp_seeds, "Training seeds")->capture_default_str();
    exp->add_option("--gen-seeds", exp_gen_seeds, "Generator seeds")->capture_default_str();
    exp->add_option("--budget", exp_budget, "Tuning budget when --hp is absent")->capture_default_str();
    exp->add_option("--hp", exp_hp, "Fixed hyperparameter JSON");
    exp->add_option("--seed", exp_seed, "Master seed")->capture_default_str();
    exp->add_option("--jobs", exp_jobs, "Worker threads (0: all cores)")->capture_default_str();
    exp->add_option("--out", exp_out, "Output directory")->required();
    exp->add_option("--smape", exp_smape, "auto, standard or modified")->capture_default_str();
    exp->add_option("--epsilon-smape", exp_eps, "Modified sMAPE epsilon")->capture_default_str();

    // synthesize
    auto* syn = app.add_subcommand("synthesize", "Write a synthetic seasonal dataset");
    SyntheticSpec spec;
    std::string syn_paradigm = "DS";
    std::string syn_out;
    syn->add_option("--series", spec.series)->capture_default_str();
    syn->add_option("--length", spec.length)->capture_default_str();
    syn->add_option("--seasonality", spec.seasonality)->capture_default_str();
    syn->add_option("--horizon", spec.horizon)->capture_default_str();
    syn->add_option("--noise", spec.noise)->capture_default_str();
    syn->add_option("--paradigm", syn_paradigm)->capture_default_str();
    syn->add_option("--seed", spec.seed)->capture_default_str();
    syn->add_option("--out", syn_out, "Output directory (series.csv, meta.txt)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*aug) {
            const auto d = aug_data.load();
            auto cfg = aug_args.config();
            cfg.method = parse_augment_method(aug_method);
            cfg.seed = aug_seed;
            const auto out = augment(d, cfg);
            write_series_csv(fs::path(aug_out), out);
            fmt::print("{} series written to {}\n", out.size(), aug_out);
        } else if (*tun) {
            const auto d = tun_data.load();
            const auto res = tune(split_holdout(d).train, tun_budget, tun_seed);
            std::ofstream(tun_out) << hyperparameters_json(res.best) << '\n';
            fmt::print("best validation loss {:.6g} over {} candidates\n", res.best_loss, res.trials.size());
        } else if (*trn) {
            auto d = trn_data.load();
            Network net;
            if (!trn_base.empty()) {
                const Network base = load_checkpoint(trn_base);
                auto s = Strategy::transfer(AugmentMethod::MBB, parse_scheme(trn_scheme), parse_mode(trn_mode));
                if (trn_q > 0) {
                    s.q = trn_q;
                }
                s.validate();
                auto rng = make_rng(trn_seed, {2});
                Network target = build_target(base, s.scheme, s.mode, s.q, d.horizon, rng);
                const auto pre = preprocess(d);
                std::vector<WindowSet> ws;
                for (const auto& [id, w] : pre.windowsets) {
                    ws.push_back(w);
                }
                net = train(std::move(target), ws, derive_seed(trn_seed, {3})).net;
            } else {
                const auto hp = hyperparameters_or_default(trn_hp);
                if (!trn_augmented.empty()) {
                    for (auto& s : augmented_dataset(d, read_series_csv(fs::path(trn_augmented))).series) {
                        d.series.push_back(std::move(s));
                    }
                }
                net = fit_network(d, hp, trn_seed);
            }
            save_checkpoint(trn_out, net);
            fmt::print("checkpoint written to {} ({} parameters)\n", trn_out, net.parameter_count());
        } else if (*fct) {
            const auto d = fct_data.load();
            const Network net = load_checkpoint(fct_model);
            const auto f = forecast_dataset(net, d);
            std::vector<std::string> ids;
            for (const auto& s : d.series) {
                ids.push_back(s.id);
            }
            write_forecasts_csv(fct_out, {{fct_strategy, f}}, {fct_strategy}, ids);
        } else if (*evl) {
            const auto d = evl_data.load();
            const auto forecasts = read_forecasts_csv(evl_forecasts);
            const auto res = evaluate_forecasts(d, forecasts, parse_smape_mode(evl_smape), evl_eps);
            ExperimentConfig cfg;
            cfg.smape_mode = parse_smape_mode(evl_smape);
            cfg.smape_epsilon = evl_eps;
            write_experiment_outputs(res, cfg, evl_out);
            for (const auto& [k, v] : res.failures) {
                fmt::print(stderr, "{}: {}\n", k, v);
            }
            return res.failures.empty() ? kOk : kRuntime;
        } else if (*exp) {
            ExperimentConfig cfg;
            try {
                cfg.strategies = parse_strategies(exp_strategies, exp_q);
                cfg.training_seeds = exp_seeds;
                cfg.generator_seeds = exp_gen_seeds;
                cfg.augment = exp_aug.config();
                cfg.budget = exp_budget;
                if (!exp_hp.empty()) {
                    cfg.hyperparameters = hyperparameters_or_default(exp_hp);
                }
                cfg.seed = exp_seed;
                cfg.jobs = exp_jobs;
                cfg.smape_mode = parse_smape_mode(exp_smape);
                cfg.smape_epsilon = exp_eps;
                cfg.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
            const auto d = exp_data.load();
            const auto res = run_experiment(d, cfg);
            write_experiment_outputs(res, cfg, exp_out);
            fmt::print("{} strategies completed, {} failed; results in {}\n", res.smape.columns.size(),
                       res.failures.size(), exp_out);
            for (const auto& [k, v] : res.failures) {
                fmt::print(stderr, "{}: {}\n", k, v);
            }
            return res.failures.empty() ? kOk : kRuntime;
        } else if (*syn) {
            spec.paradigm = parse_paradigm(syn_paradigm);
            const auto d = make_synthetic_dataset(spec);
            fs::create_directories(syn_out);
            write_series_csv(fs::path(syn_out) / "series.csv", d.series);
            std::ofstream meta(fs::path(syn_out) / "meta.txt");
            write_meta(meta, d.meta());
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfig;
    } catch (const ParseError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfig;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kRuntime;
    }
    return kOk;
}
