#include "causalrl/data/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "causalrl/errors.hpp"

namespace causalrl::data {

namespace {

struct Moments {
    double mean = 0.0;
    double ss = 0.0;  // sum of squared deviations
};

Moments moments(const NumericColumn& x) {
    Moments m;
    for (double v : x) m.mean += v;
    m.mean /= static_cast<double>(x.size());
    for (double v : x) m.ss += (v - m.mean) * (v - m.mean);
    return m;
}

void add_unique(std::vector<std::string>& list, const std::string& name) {
    if (std::find(list.begin(), list.end(), name) == list.end()) list.push_back(name);
}

Dataset keep_columns(const Dataset& ds, const std::vector<std::size_t>& keep, DatasetNotes notes) {
    std::vector<Column> cols;
    cols.reserve(keep.size());
    for (std::size_t j : keep) cols.push_back(ds.column(j));
    return Dataset(ds.variables().subset(keep), std::move(cols), std::move(notes));
}

}  // namespace

Dataset encode_categoricals(const Dataset& ds) {
    DatasetNotes notes = ds.notes();
    std::vector<Column> cols;
    cols.reserve(ds.cols());
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        if (!ds.is_text_column(j)) {
            cols.push_back(ds.column(j));
            continue;
        }
        const auto& text = std::get<TextColumn>(ds.column(j));
        std::unordered_map<std::string, std::size_t> codes;
        std::vector<std::string> labels;
        NumericColumn out;
        out.reserve(text.size());
        for (const auto& s : text) {
            auto [it, inserted] = codes.try_emplace(s, labels.size());
            if (inserted) labels.push_back(s);
            out.push_back(static_cast<double>(it->second));
        }
        notes.category_labels[ds.variables()[j].name] = std::move(labels);
        cols.emplace_back(std::move(out));
    }
    return Dataset(ds.variables(), std::move(cols), std::move(notes));
}

std::vector<std::string> decode_column(const Dataset& ds, std::size_t j) {
    if (ds.is_text_column(j)) return std::get<TextColumn>(ds.column(j));
    const auto& name = ds.variables()[j].name;
    const auto& col = ds.numeric_column(j);
    auto it = ds.notes().category_labels.find(name);
    std::vector<std::string> out;
    out.reserve(col.size());
    for (double v : col) {
        if (it == ds.notes().category_labels.end()) {
            out.push_back(std::to_string(v));
            continue;
        }
        const auto code = static_cast<std::size_t>(v);
        if (v < 0 || code >= it->second.size()) throw UsageError("decode_column: code out of range in '" + name + "'");
        out.push_back(it->second[code]);
    }
    return out;
}

CorrelationResult correlation_matrix(const Dataset& ds) {
    const std::size_t d = ds.cols();
    if (ds.rows() < 2) throw UsageError("correlation_matrix: need at least 2 rows");
    std::vector<NumericColumn> centered(d);
    std::vector<double> norms(d);
    CorrelationResult res;
    for (std::size_t j = 0; j < d; ++j) {
        const auto& col = ds.numeric_column(j);
        const auto m = moments(col);
        centered[j].resize(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) centered[j][i] = col[i] - m.mean;
        norms[j] = std::sqrt(m.ss);
        if (m.ss == 0.0) res.constant_columns.push_back(j);
    }
    res.r = numeric::Matrix(d, d);
    for (std::size_t a = 0; a < d; ++a) {
        res.r(a, a) = 1.0;
        for (std::size_t b = a + 1; b < d; ++b) {
            double v = 0.0;
            if (norms[a] > 0.0 && norms[b] > 0.0) {
                double dot = 0.0;
                for (std::size_t i = 0; i < ds.rows(); ++i) dot += centered[a][i] * centered[b][i];
                v = std::clamp(dot / (norms[a] * norms[b]), -1.0, 1.0);
            }
            res.r(a, b) = v;
            res.r(b, a) = v;
        }
    }
    return res;
}

FilterResult multicollinearity_filter(const Dataset& ds, const PreprocessConfig& cfg) {
    if (!(cfg.correlation_threshold > 0.0 && cfg.correlation_threshold <= 1.0)) {
        throw ValidationError("correlation threshold must lie in (0, 1]");
    }
    if (!cfg.target.empty() &&
        std::find(cfg.drop_columns.begin(), cfg.drop_columns.end(), cfg.target) != cfg.drop_columns.end()) {
        throw ValidationError("target '" + cfg.target + "' is listed in drop_columns");
    }
    DatasetNotes notes = ds.notes();
    std::vector<std::string> dropped;
    std::vector<std::size_t> manual_keep;
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto& name = ds.variables()[j].name;
        if (std::find(cfg.drop_columns.begin(), cfg.drop_columns.end(), name) != cfg.drop_columns.end()) {
            dropped.push_back(name);
        } else {
            manual_keep.push_back(j);
        }
    }
    Dataset stage = keep_columns(ds, manual_keep, notes);

    const auto corr = correlation_matrix(stage);
    const std::size_t d = stage.cols();
    std::vector<bool> removed(d, false);
    const auto target = cfg.target.empty() ? std::nullopt : stage.variables().find(cfg.target);
    for (std::size_t i = 0; i < d; ++i) {
        if (removed[i]) continue;
        for (std::size_t j = i + 1; j < d; ++j) {
            if (removed[j]) continue;
            const bool identical = stage.numeric_column(i) == stage.numeric_column(j);
            if (!identical && !(std::abs(corr.r(i, j)) > cfg.correlation_threshold)) continue;
            if (target && *target == j) {
                removed[i] = true;
                break;
            }
            removed[j] = true;
        }
    }
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < d; ++j) {
        if (removed[j]) dropped.push_back(stage.variables()[j].name);
        else keep.push_back(j);
    }
    for (const auto& name : dropped) add_unique(notes.dropped_columns, name);
    return FilterResult{keep_columns(stage, keep, std::move(notes)), std::move(dropped)};
}

Dataset standardize(const Dataset& ds) {
    if (ds.rows() < 2) throw UsageError("standardize: need at least 2 rows");
    DatasetNotes notes = ds.notes();
    std::vector<Column> cols;
    cols.reserve(ds.cols());
    const double n1 = static_cast<double>(ds.rows() - 1);
    for (std::size_t j = 0; j < ds.cols(); ++j) {
        const auto& col = ds.numeric_column(j);
        const auto m = moments(col);
        NumericColumn out(col.size(), 0.0);
        if (m.ss > 0.0) {
            const double sd = std::sqrt(m.ss / n1);
            for (std::size_t i = 0; i < col.size(); ++i) out[i] = (col[i] - m.mean) / sd;
        } else {
            add_unique(notes.constant_columns, ds.variables()[j].name);
        }
        cols.emplace_back(std::move(out));
    }
    return Dataset(ds.variables(), std::move(cols), std::move(notes));
}

PreprocessResult preprocess(const Dataset& raw, const PreprocessConfig& cfg) {
    if (!cfg.target.empty() && !raw.variables().find(cfg.target)) {
        throw ValidationError("target variable '" + cfg.target + "' not in dataset");
    }
    Dataset encoded = encode_categoricals(raw);
    auto filtered = multicollinearity_filter(encoded, cfg);
    if (!cfg.target.empty() && !filtered.dataset.variables().find(cfg.target)) {
        throw ValidationError("target variable '" + cfg.target + "' removed by preprocessing");
    }
    Dataset processed = cfg.standardize ? standardize(filtered.dataset) : filtered.dataset;
    return PreprocessResult{std::move(filtered.dataset), std::move(processed)};
}

}  // namespace causalrl::data
