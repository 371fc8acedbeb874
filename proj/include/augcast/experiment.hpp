#pragma once

#include "augcast/augment.hpp"
#include "augcast/data.hpp"
#include "augcast/metrics.hpp"
#include "augcast/net.hpp"
#include "augcast/stats.hpp"
#include "augcast/transfer.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace augcast {

inline constexpr std::string_view kVersion = "0.1.0";

enum class SmapeMode { Auto, Standard, Modified };

SmapeMode parse_smape_mode(const std::string& s);

struct ExperimentConfig {
    std::vector<Strategy> strategies = all_strategies();
    int training_seeds = 10;
    int generator_seeds = 3;
    /// Method is overridden per strategy; seed is derived per generator seed.
    AugmentConfig augment;
    /// Fixed hyperparameters; when absent, random search with `budget` candidates.
    std::optional<Hyperparameters> hyperparameters;
    int budget = 20;
    std::uint64_t seed = 0;
    SmapeMode smape_mode = SmapeMode::Auto;
    double smape_epsilon = 0.1;
    /// Worker threads; 0 uses the hardware concurrency.
    int jobs = 0;

    /// Throws std::invalid_argument on any inconsistency.
    void validate() const;
};

/// One draw from the hyperparameter box: integers uniform, reals log-uniform.
Hyperparameters sample_hyperparameters(Rng& rng);

struct TuneResult {
    Hyperparameters best;
    double best_loss = 0.0;
    std::vector<std::pair<Hyperparameters, double>> trials;
};

/// Random search: trains the baseline model per candidate and keeps the lowest best-epoch validation loss.
TuneResult tune(const Dataset& train, int budget, std::uint64_t seed);

struct ExperimentResult {
    std::string dataset;
    Hyperparameters hyperparameters;
    bool modified_smape = false;
    /// Strategy name -> series id -> forecast, averaged over generator seeds.
    std::map<std::string, std::map<std::string, std::vector<double>>> forecasts;
    /// Successful strategies only, in configuration order.
    ErrorMatrix smape;
    ErrorMatrix mase;
    /// Seasonal-naive benchmark errors per series (same row order).
    std::vector<double> benchmark_smape;
    std::vector<double> benchmark_mase;
    /// Strategy name -> error message.
    std::map<std::string, std::string> failures;
    std::vector<std::uint64_t> training_seeds;
    std::vector<std::uint64_t> generator_seeds;
};

/**
 * @brief Runs every configured strategy on the holdout split of `full`.
 *
 * Augmented strategies run once per generator seed and their per-series errors
 * are averaged across generator seeds. A failing strategy is recorded in
 * `failures` and excluded from the error matrices without affecting the others.
 */
ExperimentResult run_experiment(const Dataset& full, const ExperimentConfig& cfg);

/// Writes forecasts.csv, metrics.csv, ranks.csv, stats.txt, benchmarks.csv, manifest.json, hyperparameters.json
/// and errors.log (only on failures) to `dir`.
void write_experiment_outputs(const ExperimentResult& r, const ExperimentConfig& cfg,
                              const std::filesystem::path& dir);

/// Evaluation of externally produced forecasts (strategy -> id -> horizon values) against the holdout.
ExperimentResult evaluate_forecasts(const Dataset& full,
                                    const std::map<std::string, std::map<std::string, std::vector<double>>>& forecasts,
                                    SmapeMode mode, double epsilon);

/// Reads `strategy,series_id,h,value`.
std::map<std::string, std::map<std::string, std::vector<double>>> read_forecasts_csv(
    const std::filesystem::path& path);
void write_forecasts_csv(const std::filesystem::path& path,
                         const std::map<std::string, std::map<std::string, std::vector<double>>>& forecasts,
                         const std::vector<std::string>& strategy_order, const std::vector<std::string>& series_order);

/// Canonical text form of a configuration; hashed into the run manifest.
std::string config_fingerprint(const ExperimentConfig& cfg, const std::string& dataset);

}  // namespace augcast
