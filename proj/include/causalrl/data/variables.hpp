#ifndef CAUSALRL_DATA_VARIABLES_HPP
#define CAUSALRL_DATA_VARIABLES_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace causalrl::data {

enum class VariableKind { Continuous, Categorical };

std::string_view to_string(VariableKind kind);
VariableKind parse_variable_kind(std::string_view text);

struct Variable {
    std::string name;
    VariableKind kind = VariableKind::Continuous;
    std::optional<std::string> denotation;  // e.g. "X7"

    bool operator==(const Variable&) const = default;
};

// Ordered variable list; the order is the column order of every matrix built
// from the same dataset. Names are unique.
class VariableTable {
public:
    VariableTable() = default;
    explicit VariableTable(std::vector<Variable> vars);

    std::size_t size() const { return vars_.size(); }
    bool empty() const { return vars_.empty(); }
    const Variable& operator[](std::size_t i) const { return vars_[i]; }
    Variable& operator[](std::size_t i) { return vars_[i]; }
    auto begin() const { return vars_.begin(); }
    auto end() const { return vars_.end(); }

    std::optional<std::size_t> find(std::string_view name) const;
    std::size_t index_of(std::string_view name) const;  // throws UsageError when absent
    void push_back(Variable v);
    VariableTable subset(const std::vector<std::size_t>& keep) const;

    // "name (X7)" when a denotation exists, otherwise the name.
    std::string label(std::size_t i) const;

    bool operator==(const VariableTable&) const = default;

private:
    std::vector<Variable> vars_;
};

}  // namespace causalrl::data

#endif  // CAUSALRL_DATA_VARIABLES_HPP
