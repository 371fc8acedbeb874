#include "augcast/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace augcast {

std::vector<double> Window::features() const {
    std::vector<double> f;
    f.reserve(input.size() + seasonal_exo.size());
    f.insert(f.end(), input.begin(), input.end());
    f.insert(f.end(), seasonal_exo.begin(), seasonal_exo.end());
    return f;
}

std::size_t window_count(std::size_t p, int n, int m) {
    const auto need = static_cast<std::size_t>(n + m);
    return p >= need ? p - need + 1 : 0;
}

namespace {

Window make_window(const std::vector<double>& model, const PreprocessState& st, std::size_t start, int n, int m,
                   bool with_target) {
    Window w;
    const auto nn = static_cast<std::size_t>(n);
    const auto mm = static_cast<std::size_t>(m);
    w.position = start + nn - 1;
    w.input.assign(model.begin() + static_cast<std::ptrdiff_t>(start),
                   model.begin() + static_cast<std::ptrdiff_t>(start + nn));
    if (st.paradigm == Paradigm::DS) {
        w.norm_factor = st.decomposition.trend[w.position];
    } else {
        w.norm_factor = std::accumulate(w.input.begin(), w.input.end(), 0.0) / static_cast<double>(nn);
        w.seasonal_exo.resize(mm);
        for (std::size_t h = 0; h < mm; ++h) {
            w.seasonal_exo[h] = seasonal_at(st.decomposition, st.seasonality, w.position + 1 + h);
        }
    }
    for (double& v : w.input) {
        v -= w.norm_factor;
    }
    if (with_target) {
        w.target.assign(model.begin() + static_cast<std::ptrdiff_t>(start + nn),
                        model.begin() + static_cast<std::ptrdiff_t>(start + nn + mm));
        for (double& v : w.target) {
            v -= w.norm_factor;
        }
    }
    return w;
}

}  // namespace

Preprocessed preprocess(const Dataset& d) {
    if (d.series.empty()) {
        throw std::invalid_argument("preprocess: empty dataset");
    }
    const int n = d.input_window;
    const int m = d.horizon;
    if (n < 1 || m < 1 || d.seasonality < 1) {
        throw std::invalid_argument("preprocess: invalid dataset metadata");
    }

    double global_min = std::numeric_limits<double>::infinity();
    for (const auto& s : d.series) {
        validate_series(s);
        if (s.values.size() < static_cast<std::size_t>(n + m)) {
            throw ValidationError("series '" + s.id + "' is shorter than n + m");
        }
        global_min = std::min(global_min, *std::min_element(s.values.begin(), s.values.end()));
    }

    Preprocessed out;
    out.log_offset = global_min == 0.0;
    out.output_width = m;
    out.input_width = d.paradigm == Paradigm::SE ? n + m : n;

    for (const auto& s : d.series) {
        PreprocessState st;
        st.series_id = s.id;
        st.paradigm = d.paradigm;
        st.log_offset = out.log_offset;
        const auto p = s.values.size();
        st.scale = std::accumulate(s.values.begin(), s.values.end(), 0.0) / static_cast<double>(p);

        std::vector<double> logged(p);
        for (std::size_t t = 0; t < p; ++t) {
            const double v = s.values[t] / st.scale;
            logged[t] = st.log_offset ? std::log(v + 1.0) : std::log(v);
        }
        st.seasonality = p >= 2 * static_cast<std::size_t>(d.seasonality) ? d.seasonality : 1;
        st.decomposition = stl_decompose(logged, st.seasonality);

        std::vector<double> model(p);
        for (std::size_t t = 0; t < p; ++t) {
            model[t] = d.paradigm == Paradigm::DS ? logged[t] - st.decomposition.seasonal[t] : logged[t];
        }

        WindowSet ws;
        ws.series_id = s.id;
        const auto count = window_count(p, n, m);
        ws.windows.reserve(count);
        for (std::size_t start = 0; start < count; ++start) {
            ws.windows.push_back(make_window(model, st, start, n, m, true));
        }
        ws.forecast_window = make_window(model, st, p - static_cast<std::size_t>(n), n, m, false);

        out.windowsets.emplace(s.id, std::move(ws));
        out.states.emplace(s.id, std::move(st));
    }
    return out;
}

std::vector<double> postprocess(std::span<const double> pred, const Window& w, const PreprocessState& st) {
    std::vector<double> out(pred.size());
    for (std::size_t h = 0; h < pred.size(); ++h) {
        if (!std::isfinite(pred[h])) {
            throw std::domain_error("postprocess: non-finite prediction for series '" + st.series_id + "'");
        }
        double v = pred[h] + w.norm_factor;
        if (st.paradigm == Paradigm::DS) {
            v += seasonal_at(st.decomposition, st.seasonality, w.position + 1 + h);
        }
        v = std::exp(v);
        if (st.log_offset) {
            v -= 1.0;
        }
        out[h] = std::max(0.0, v * st.scale);
    }
    return out;
}

}  // namespace augcast
