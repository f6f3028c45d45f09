#ifndef CAUSALRL_DATA_CSV_HPP
#define CAUSALRL_DATA_CSV_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "causalrl/data/dataset.hpp"
#include "causalrl/data/variables.hpp"

namespace causalrl::data {

// RFC 4180 records: comma separated, double-quoted fields may contain commas,
// newlines and "" escapes. A trailing newline does not produce an empty record.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// Reads a CSV with a header row. With a schema, only the schema's columns are
// kept, in schema order, with the declared kinds; otherwise all columns are kept
// and a column is categorical when any cell fails to parse as a number.
// Rows with an empty cell in a kept column are dropped and counted.
Dataset load_csv(const std::filesystem::path& path, const std::optional<VariableTable>& schema = std::nullopt);
Dataset load_csv(std::istream& in, const std::optional<VariableTable>& schema = std::nullopt);

// {"variables": [{"name": ..., "kind": "continuous"|"categorical", "denotation": "X1"}, ...]}
VariableTable load_schema(const std::filesystem::path& path);

void write_csv(std::ostream& out, const Dataset& ds);

}  // namespace causalrl::data

#endif  // CAUSALRL_DATA_CSV_HPP
