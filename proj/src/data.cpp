#include "augcast/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace augcast {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && first != last;
}

int parse_positive_int(const std::string& key, const std::string& value, std::size_t line) {
    int v = 0;
    if (!parse_number(value, v)) {
        throw ParseError("metadata key '" + key + "' expects an integer, got '" + value + "'", line);
    }
    if (v < 1) {
        throw ValidationError("metadata key '" + key + "' must be positive");
    }
    return v;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

std::string to_string(Paradigm p) { return p == Paradigm::DS ? "DS" : "SE"; }

Paradigm parse_paradigm(const std::string& s) {
    if (s == "DS" || s == "ds") {
        return Paradigm::DS;
    }
    if (s == "SE" || s == "se") {
        return Paradigm::SE;
    }
    throw ParseError("paradigm must be DS or SE, got '" + s + "'", 0);
}

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

std::size_t Dataset::max_length() const {
    std::size_t m = 0;
    for (const auto& s : series) {
        m = std::max(m, s.values.size());
    }
    return m;
}

const TimeSeries& Dataset::at(const std::string& id) const {
    auto it = std::find_if(series.begin(), series.end(), [&](const TimeSeries& s) { return s.id == id; });
    if (it == series.end()) {
        throw std::out_of_range("no series with id '" + id + "'");
    }
    return *it;
}

DatasetMeta Dataset::meta() const {
    return DatasetMeta{name, seasonality, horizon, paradigm, input_window, sampling_rate};
}

int default_input_window(int horizon) {
    // ceil(1.25 * M) in integer arithmetic
    return (5 * horizon + 3) / 4;
}

void validate_series(const TimeSeries& s) {
    if (s.values.empty()) {
        throw ValidationError("series '" + s.id + "' is empty");
    }
    bool any_positive = false;
    for (double v : s.values) {
        if (!std::isfinite(v)) {
            throw std::domain_error("series '" + s.id + "' contains a non-finite value");
        }
        if (v < 0.0) {
            throw std::domain_error("series '" + s.id + "' contains a negative value");
        }
        any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) {
        throw std::domain_error("series '" + s.id + "' is identically zero");
    }
}

void validate_dataset(const Dataset& d) {
    if (d.seasonality < 1) {
        throw ValidationError("seasonality must be >= 1");
    }
    if (d.horizon < 1) {
        throw ValidationError("horizon must be >= 1");
    }
    if (d.input_window < 1) {
        throw ValidationError("input_window must be >= 1");
    }
    if (d.series.empty()) {
        throw ValidationError("dataset '" + d.name + "' has no series");
    }
    const std::size_t min_len = static_cast<std::size_t>(d.input_window) + 2 * static_cast<std::size_t>(d.horizon);
    std::unordered_map<std::string, int> seen;
    for (const auto& s : d.series) {
        if (seen[s.id]++ > 0) {
            throw ValidationError("duplicate series id '" + s.id + "'");
        }
        validate_series(s);
        if (s.values.size() < min_len) {
            throw ValidationError("series '" + s.id + "' has " + std::to_string(s.values.size()) +
                                  " observations; at least n + 2M = " + std::to_string(min_len) + " required");
        }
    }
}

DatasetMeta read_meta(std::istream& in) {
    DatasetMeta meta;
    bool have_s = false;
    bool have_m = false;
    bool have_p = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        const std::string content = trim(line);
        if (content.empty()) {
            continue;
        }
        const auto sep = content.find_first_of("=:");
        if (sep == std::string::npos) {
            throw ParseError("expected 'key = value'", lineno);
        }
        const std::string key = trim(std::string_view(content).substr(0, sep));
        const std::string value = trim(std::string_view(content).substr(sep + 1));
        if (key == "name") {
            meta.name = value;
        } else if (key == "seasonality") {
            meta.seasonality = parse_positive_int(key, value, lineno);
            have_s = true;
        } else if (key == "horizon") {
            meta.horizon = parse_positive_int(key, value, lineno);
            have_m = true;
        } else if (key == "paradigm") {
            try {
                meta.paradigm = parse_paradigm(value);
            } catch (const ParseError& e) {
                throw ParseError(e.what(), lineno);
            }
            have_p = true;
        } else if (key == "input_window") {
            meta.input_window = parse_positive_int(key, value, lineno);
        } else if (key == "sampling_rate") {
            meta.sampling_rate = value;
        } else {
            throw ParseError("unknown metadata key '" + key + "'", lineno);
        }
    }
    if (!have_s || !have_m || !have_p) {
        throw ParseError("metadata requires seasonality, horizon and paradigm", 0);
    }
    return meta;
}

DatasetMeta read_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open metadata file " + path.string());
    }
    return read_meta(in);
}

void write_meta(std::ostream& out, const DatasetMeta& meta) {
    out << "name = " << meta.name << '\n';
    out << "seasonality = " << meta.seasonality << '\n';
    out << "horizon = " << meta.horizon << '\n';
    out << "paradigm = " << to_string(meta.paradigm) << '\n';
    if (meta.input_window) {
        out << "input_window = " << *meta.input_window << '\n';
    }
    if (!meta.sampling_rate.empty()) {
        out << "sampling_rate = " << meta.sampling_rate << '\n';
    }
}

std::vector<TimeSeries> read_series_csv(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty CSV; expected header 'series_id,t,value'", 1);
    }
    ++lineno;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3);  // UTF-8 BOM
    }
    if (split_csv_line(line) != std::vector<std::string>{"series_id", "t", "value"}) {
        throw ParseError("expected header 'series_id,t,value'", 1);
    }

    std::vector<TimeSeries> out;
    std::unordered_map<std::string, std::size_t> index;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) {
            throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), lineno);
        }
        const auto& id = fields[0];
        if (id.empty()) {
            throw ParseError("empty series_id", lineno);
        }
        long long t = 0;
        if (!parse_number(fields[1], t)) {
            throw ParseError("t must be an integer, got '" + fields[1] + "'", lineno);
        }
        double v = 0.0;
        if (!parse_number(fields[2], v) || !std::isfinite(v)) {
            throw ParseError("value must be a finite decimal, got '" + fields[2] + "'", lineno);
        }
        if (v < 0.0) {
            throw std::domain_error("line " + std::to_string(lineno) + ": negative value in series '" + id + "'");
        }
        auto [it, inserted] = index.try_emplace(id, out.size());
        if (inserted) {
            out.push_back(TimeSeries{id, {}});
        }
        auto& values = out[it->second].values;
        if (t != static_cast<long long>(values.size())) {
            throw ParseError("series '" + id + "' expects t = " + std::to_string(values.size()) + ", got " +
                                 std::to_string(t),
                             lineno);
        }
        values.push_back(v);
    }
    return out;
}

std::vector<TimeSeries> read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open dataset file " + path.string());
    }
    return read_series_csv(in);
}

void write_series_csv(std::ostream& out, std::span<const TimeSeries> series) {
    out << "series_id,t,value\n";
    for (const auto& s : series) {
        for (std::size_t t = 0; t < s.values.size(); ++t) {
            out << s.id << ',' << t << ',' << format_double(s.values[t]) << '\n';
        }
    }
}

void write_series_csv(const std::filesystem::path& path, std::span<const TimeSeries> series) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    write_series_csv(out, series);
}

Dataset make_dataset(std::vector<TimeSeries> series, const DatasetMeta& meta) {
    Dataset d;
    d.name = meta.name;
    d.series = std::move(series);
    d.seasonality = meta.seasonality;
    d.horizon = meta.horizon;
    d.paradigm = meta.paradigm;
    d.sampling_rate = meta.sampling_rate;
    d.input_window = meta.input_window.value_or(default_input_window(meta.horizon));
    validate_dataset(d);
    return d;
}

Dataset load_dataset(const std::filesystem::path& csv, const DatasetMeta& meta) {
    return make_dataset(read_series_csv(csv), meta);
}

Dataset load_dataset(const std::filesystem::path& csv, const std::filesystem::path& meta) {
    return load_dataset(csv, read_meta(meta));
}

HoldoutSplit split_holdout(const Dataset& d) {
    HoldoutSplit split;
    split.train = d;
    const auto m = static_cast<std::size_t>(d.horizon);
    for (auto& s : split.train.series) {
        if (s.values.size() <= m) {
            throw ValidationError("series '" + s.id + "' is too short for a holdout of " + std::to_string(m));
        }
        const auto cut = s.values.end() - static_cast<std::ptrdiff_t>(m);
        split.actuals[s.id] = std::vector<double>(cut, s.values.end());
        s.values.erase(cut, s.values.end());
    }
    return split;
}

std::vector<double> seasonal_naive(std::span<const double> train, int seasonality, int horizon) {
    if (seasonality < 1 || horizon < 1) {
        throw std::invalid_argument("seasonal_naive: seasonality and horizon must be positive");
    }
    const auto s = static_cast<std::size_t>(seasonality);
    if (train.size() < s) {
        throw std::invalid_argument("seasonal_naive: series shorter than one seasonal cycle");
    }
    const auto last_cycle = train.subspan(train.size() - s);
    std::vector<double> out(static_cast<std::size_t>(horizon));
    for (std::size_t h = 0; h < out.size(); ++h) {
        out[h] = last_cycle[h % s];
    }
    return out;
}

}  // namespace augcast
