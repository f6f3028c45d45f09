#include "causalrl/data/dataset.hpp"

#include <numeric>

#include "causalrl/errors.hpp"
#include "causalrl/util/random.hpp"

namespace causalrl::data {

namespace {

std::size_t column_length(const Column& c) {
    return std::visit([](const auto& v) { return v.size(); }, c);
}

}  // namespace

Dataset::Dataset(VariableTable variables, std::vector<Column> columns, DatasetNotes notes)
    : variables_(std::move(variables)), columns_(std::move(columns)), notes_(std::move(notes)) {
    if (columns_.size() != variables_.size()) {
        throw ShapeError("dataset: " + std::to_string(columns_.size()) + " columns for " +
                         std::to_string(variables_.size()) + " variables");
    }
    rows_ = columns_.empty() ? 0 : column_length(columns_.front());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        if (column_length(columns_[j]) != rows_) {
            throw ShapeError("dataset: column '" + variables_[j].name + "' has " +
                             std::to_string(column_length(columns_[j])) + " rows, expected " + std::to_string(rows_));
        }
        if (std::holds_alternative<TextColumn>(columns_[j])) numeric_ = false;
    }
    if (numeric_) {
        samples_ = numeric::Matrix(rows_, columns_.size());
        for (std::size_t j = 0; j < columns_.size(); ++j) {
            const auto& col = std::get<NumericColumn>(columns_[j]);
            for (std::size_t i = 0; i < rows_; ++i) samples_(i, j) = col[i];
        }
    }
}

Dataset::Dataset(VariableTable variables, numeric::Matrix samples, DatasetNotes notes)
    : variables_(std::move(variables)), notes_(std::move(notes)), samples_(std::move(samples)) {
    if (samples_.cols() != variables_.size()) {
        throw ShapeError("dataset: matrix has " + std::to_string(samples_.cols()) + " columns for " +
                         std::to_string(variables_.size()) + " variables");
    }
    rows_ = samples_.rows();
    columns_.reserve(samples_.cols());
    for (std::size_t j = 0; j < samples_.cols(); ++j) columns_.emplace_back(samples_.column(j));
}

const NumericColumn& Dataset::numeric_column(std::size_t j) const {
    if (is_text_column(j)) throw UsageError("column '" + variables_[j].name + "' is not numeric; encode it first");
    return std::get<NumericColumn>(columns_[j]);
}

const numeric::Matrix& Dataset::samples() const {
    if (!numeric_) throw UsageError("dataset still has text columns; run encode_categoricals first");
    return samples_;
}

numeric::Matrix sample_batch(const Dataset& ds, std::size_t s, std::uint64_t seed) {
    const std::size_t m = ds.rows();
    if (s < 1 || s > m) {
        throw UsageError("sample_batch: batch size " + std::to_string(s) + " outside [1, " + std::to_string(m) + "]");
    }
    const auto& x = ds.samples();
    Rng rng(seed);
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates: the first s slots are a uniform draw without replacement.
    for (std::size_t i = 0; i < s; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(m - i));
        std::swap(idx[i], idx[j]);
    }
    numeric::Matrix out(ds.cols(), s);
    for (std::size_t k = 0; k < s; ++k)
        for (std::size_t v = 0; v < ds.cols(); ++v) out(v, k) = x(idx[k], v);
    return out;
}

}  // namespace causalrl::data
