#ifndef CAUSALRL_DATA_PREPROCESS_HPP
#define CAUSALRL_DATA_PREPROCESS_HPP

#include <string>
#include <vector>

#include "causalrl/data/dataset.hpp"
#include "causalrl/numeric/matrix.hpp"

namespace causalrl::data {

struct PreprocessConfig {
    std::vector<std::string> drop_columns;
    double correlation_threshold = 0.95;  // in (0, 1]
    bool standardize = true;
    std::string target;  // exempt from every drop; may be empty
};

// Replaces text columns with integer codes in order of first appearance.
// The code -> label table is kept in notes().category_labels.
Dataset encode_categoricals(const Dataset& ds);

// Inverse of encode_categoricals for one column.
std::vector<std::string> decode_column(const Dataset& ds, std::size_t j);

struct CorrelationResult {
    numeric::Matrix r;                      // d x d Pearson, unit diagonal
    std::vector<std::size_t> constant_columns;  // given correlation 0 with everything
};

CorrelationResult correlation_matrix(const Dataset& ds);

struct FilterResult {
    Dataset dataset;
    std::vector<std::string> dropped;
};

// Removes cfg.drop_columns, then for every pair (i < j) with |r| > threshold
// (or bitwise-identical columns) drops j, or i when j is the target.
FilterResult multicollinearity_filter(const Dataset& ds, const PreprocessConfig& cfg);

// z-score with the n-1 standard deviation; constant columns become 0 and are flagged.
Dataset standardize(const Dataset& ds);

struct PreprocessResult {
    Dataset raw_encoded;   // after encoding and column filtering, before scaling
    Dataset processed;     // what the search and strength modules consume
};

// encode -> filter -> (standardize). Validates that the target survives.
PreprocessResult preprocess(const Dataset& raw, const PreprocessConfig& cfg);

}  // namespace causalrl::data

#endif  // CAUSALRL_DATA_PREPROCESS_HPP
