#ifndef CAUSALRL_DATA_DATASET_HPP
#define CAUSALRL_DATA_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "causalrl/data/variables.hpp"
#include "causalrl/numeric/matrix.hpp"

namespace causalrl::data {

using NumericColumn = std::vector<double>;
using TextColumn = std::vector<std::string>;
using Column = std::variant<NumericColumn, TextColumn>;

// Bookkeeping carried along the preprocessing chain for the report.
struct DatasetNotes {
    std::size_t dropped_rows = 0;                          // rows with missing cells
    std::vector<std::string> dropped_columns;              // manual + multicollinearity
    std::vector<std::string> constant_columns;             // flagged by standardize / correlation
    std::map<std::string, std::vector<std::string>> category_labels;  // code -> label per column

    bool operator==(const DatasetNotes&) const = default;
};

// m samples of d variables. Immutable once built. Text columns only exist
// between ingestion and encode_categoricals; numeric views require none remain.
class Dataset {
public:
    Dataset() = default;
    Dataset(VariableTable variables, std::vector<Column> columns, DatasetNotes notes = {});
    Dataset(VariableTable variables, numeric::Matrix samples, DatasetNotes notes = {});

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return variables_.size(); }
    const VariableTable& variables() const { return variables_; }
    const DatasetNotes& notes() const { return notes_; }

    bool is_numeric() const { return numeric_; }
    bool is_text_column(std::size_t j) const { return std::holds_alternative<TextColumn>(columns_.at(j)); }
    const Column& column(std::size_t j) const { return columns_.at(j); }
    // Throws UsageError for a text column.
    const NumericColumn& numeric_column(std::size_t j) const;

    // m x d matrix; throws UsageError when text columns remain.
    const numeric::Matrix& samples() const;

    bool operator==(const Dataset& o) const {
        return variables_ == o.variables_ && columns_ == o.columns_ && notes_ == o.notes_;
    }

private:
    VariableTable variables_;
    std::vector<Column> columns_;
    DatasetNotes notes_;
    numeric::Matrix samples_;
    std::size_t rows_ = 0;
    bool numeric_ = true;
};

// Draws s distinct rows (without replacement) and returns them transposed:
// d x s, one row per variable. Deterministic per seed.
numeric::Matrix sample_batch(const Dataset& ds, std::size_t s, std::uint64_t seed);

}  // namespace causalrl::data

#endif  // CAUSALRL_DATA_DATASET_HPP
