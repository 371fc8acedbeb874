#include "augcast/synthetic.hpp"

#include "augcast/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace augcast {

Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
    std::vector<TimeSeries> series;
    for (int i = 0; i < spec.series; ++i) {
        auto rng = make_rng(spec.seed, {static_cast<std::uint64_t>(i)});
        std::uniform_real_distribution<double> level_d(50.0, 150.0);
        std::uniform_real_distribution<double> amp_d(0.1, 0.3);
        std::uniform_real_distribution<double> slope_d(0.1, 0.5);
        std::uniform_real_distribution<double> phase_d(0.0, static_cast<double>(spec.seasonality));
        const double level = level_d(rng);
        const double amp = amp_d(rng);
        const double slope = slope_d(rng) * level / 100.0;
        const double phase = phase_d(rng);
        std::normal_distribution<double> noise(0.0, spec.noise * level);

        TimeSeries s;
        s.id = "syn" + std::to_string(i);
        s.values.resize(static_cast<std::size_t>(spec.length));
        for (int t = 0; t < spec.length; ++t) {
            const double season = std::sin(2.0 * std::numbers::pi * (t + phase) / spec.seasonality);
            s.values[static_cast<std::size_t>(t)] =
                std::max(0.0, level * (1.0 + amp * season) + slope * t + noise(rng));
        }
        series.push_back(std::move(s));
    }
    DatasetMeta meta;
    meta.name = "synthetic";
    meta.seasonality = spec.seasonality;
    meta.horizon = spec.horizon;
    meta.paradigm = spec.paradigm;
    return make_dataset(std::move(series), meta);
}

}  // namespace augcast
