#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace augcast {

/// How seasonality reaches the network: removed up front (DS) or fed as extra inputs (SE).
enum class Paradigm { DS, SE };

std::string to_string(Paradigm p);
Paradigm parse_paradigm(const std::string& s);

/// Malformed CSV or metadata input. `line` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Dataset that parses but violates a structural invariant (length, metadata ranges).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct TimeSeries {
    std::string id;
    std::vector<double> values;
};

struct DatasetMeta {
    std::string name;
    int seasonality = 1;
    int horizon = 1;
    Paradigm paradigm = Paradigm::DS;
    std::optional<int> input_window;
    /// Informational only (e.g. "weekly").
    std::string sampling_rate;
};

/**
 * @brief A collection of non-negative series sharing seasonality S, horizon M and input window n.
 *
 * Datasets built by load_dataset() satisfy validate_dataset(); derived datasets
 * (holdout training portions, pooled unions) are only guaranteed to hold n + M
 * observations per series.
 */
struct Dataset {
    std::string name;
    std::vector<TimeSeries> series;
    int seasonality = 1;
    int horizon = 1;
    int input_window = 1;
    Paradigm paradigm = Paradigm::DS;
    std::string sampling_rate;

    std::size_t max_length() const;
    const TimeSeries& at(const std::string& id) const;
    DatasetMeta meta() const;
};

/// ceil(1.25 * horizon)
int default_input_window(int horizon);

/// Checks every invariant of a freshly ingested dataset; throws ValidationError / std::domain_error.
void validate_dataset(const Dataset& d);

/// Checks a single series: non-empty, finite, non-negative, not identically zero.
void validate_series(const TimeSeries& s);

DatasetMeta read_meta(std::istream& in);
DatasetMeta read_meta(const std::filesystem::path& path);
void write_meta(std::ostream& out, const DatasetMeta& meta);

/// Long-format CSV `series_id,t,value`. Series keep first-appearance order.
std::vector<TimeSeries> read_series_csv(std::istream& in);
std::vector<TimeSeries> read_series_csv(const std::filesystem::path& path);
void write_series_csv(std::ostream& out, std::span<const TimeSeries> series);
void write_series_csv(const std::filesystem::path& path, std::span<const TimeSeries> series);

Dataset make_dataset(std::vector<TimeSeries> series, const DatasetMeta& meta);
Dataset load_dataset(const std::filesystem::path& csv, const DatasetMeta& meta);
Dataset load_dataset(const std::filesystem::path& csv, const std::filesystem::path& meta);

struct HoldoutSplit {
    Dataset train;
    std::map<std::string, std::vector<double>> actuals;
};

/// Removes the last M points of every series and returns them keyed by id.
HoldoutSplit split_holdout(const Dataset& d);

/// Repeats the last observed cycle of length S for M steps.
std::vector<double> seasonal_naive(std::span<const double> train, int seasonality, int horizon);

}  // namespace augcast
