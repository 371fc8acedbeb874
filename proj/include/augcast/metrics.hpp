#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace augcast {

/// (2/m) * sum |F - A| / (|F| + |A|). Throws if any denominator is zero.
double smape(std::span<const double> forecast, std::span<const double> actual);

/// sMAPE with denominator max(|F| + |A| + epsilon, 0.5 + epsilon); defined for zeros.
double smape_modified(std::span<const double> forecast, std::span<const double> actual, double epsilon = 0.1);

/// Forecast MAE scaled by the in-sample seasonal-naive MAE of `train`.
double mase(std::span<const double> forecast, std::span<const double> actual, std::span<const double> train,
            int seasonality);

/// True when any value is below 0.5, i.e. where plain sMAPE becomes unstable.
bool needs_modified_smape(std::span<const double> values);

/// Per-series errors: cells[row][col] is the error of method `columns[col]` on series `rows[row]`.
struct ErrorMatrix {
    std::vector<std::string> rows;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> cells;

    /// Rectangular, finite, non-negative.
    void validate() const;
    std::vector<double> column(std::size_t col) const;
};

struct Summary {
    std::vector<double> mean;    ///< per column
    std::vector<double> median;  ///< per column; midpoint for even counts
};

double median(std::vector<double> values);

Summary aggregate(const ErrorMatrix& m);

}  // namespace augcast
