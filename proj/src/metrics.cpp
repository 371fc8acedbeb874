#include "augcast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace augcast {

namespace {

void require_same_length(std::span<const double> f, std::span<const double> a, const char* who) {
    if (f.size() != a.size()) {
        throw std::invalid_argument(std::string(who) + ": forecast and actual lengths differ");
    }
    if (f.empty()) {
        throw std::invalid_argument(std::string(who) + ": empty horizon");
    }
}

}  // namespace

double smape(std::span<const double> forecast, std::span<const double> actual) {
    require_same_length(forecast, actual, "smape");
    double sum = 0.0;
    for (std::size_t t = 0; t < forecast.size(); ++t) {
        const double denom = std::abs(forecast[t]) + std::abs(actual[t]);
        if (denom == 0.0) {
            throw std::domain_error("smape: |F| + |A| = 0 at step " + std::to_string(t + 1) +
                                    "; use smape_modified for series with zeros");
        }
        sum += std::abs(forecast[t] - actual[t]) / denom;
    }
    return 2.0 * sum / static_cast<double>(forecast.size());
}

double smape_modified(std::span<const double> forecast, std::span<const double> actual, double epsilon) {
    require_same_length(forecast, actual, "smape_modified");
    double sum = 0.0;
    for (std::size_t t = 0; t < forecast.size(); ++t) {
        const double denom = std::max(std::abs(forecast[t]) + std::abs(actual[t]) + epsilon, 0.5 + epsilon);
        sum += std::abs(forecast[t] - actual[t]) / denom;
    }
    return 2.0 * sum / static_cast<double>(forecast.size());
}

double mase(std::span<const double> forecast, std::span<const double> actual, std::span<const double> train,
            int seasonality) {
    require_same_length(forecast, actual, "mase");
    if (seasonality < 1) {
        throw std::invalid_argument("mase: seasonality must be >= 1");
    }
    const auto s = static_cast<std::size_t>(seasonality);
    if (train.size() <= s) {
        throw std::invalid_argument("mase: training series must be longer than the seasonal period");
    }
    double scale = 0.0;
    for (std::size_t t = s; t < train.size(); ++t) {
        scale += std::abs(train[t] - train[t - s]);
    }
    scale /= static_cast<double>(train.size() - s);
    if (scale == 0.0) {
        throw std::domain_error("mase: seasonal-naive in-sample error is zero (degenerate denominator)");
    }
    double mae = 0.0;
    for (std::size_t t = 0; t < forecast.size(); ++t) {
        mae += std::abs(forecast[t] - actual[t]);
    }
    mae /= static_cast<double>(forecast.size());
    return mae / scale;
}

bool needs_modified_smape(std::span<const double> values) {
    return std::any_of(values.begin(), values.end(), [](double v) { return std::abs(v) < 0.5; });
}

void ErrorMatrix::validate() const {
    if (cells.size() != rows.size()) {
        throw std::invalid_argument("ErrorMatrix: row count mismatch");
    }
    for (const auto& r : cells) {
        if (r.size() != columns.size()) {
            throw std::invalid_argument("ErrorMatrix: ragged row");
        }
        for (double v : r) {
            if (!std::isfinite(v) || v < 0.0) {
                throw std::domain_error("ErrorMatrix: cells must be finite and non-negative");
            }
        }
    }
}

std::vector<double> ErrorMatrix::column(std::size_t col) const {
    std::vector<double> out;
    out.reserve(cells.size());
    for (const auto& r : cells) {
        out.push_back(r.at(col));
    }
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("median: empty input");
    }
    std::sort(values.begin(), values.end());
    const auto mid = values.size() / 2;
    return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

Summary aggregate(const ErrorMatrix& m) {
    m.validate();
    if (m.rows.empty() || m.columns.empty()) {
        throw std::invalid_argument("aggregate: empty matrix");
    }
    Summary s;
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        auto col = m.column(c);
        s.mean.push_back(std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size()));
        s.median.push_back(median(std::move(col)));
    }
    return s;
}

}  // namespace augcast
