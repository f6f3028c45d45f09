#include "causalrl/data/variables.hpp"

#include <unordered_set>

#include "causalrl/errors.hpp"

namespace causalrl::data {

std::string_view to_string(VariableKind kind) {
    return kind == VariableKind::Continuous ? "continuous" : "categorical";
}

VariableKind parse_variable_kind(std::string_view text) {
    if (text == "continuous") return VariableKind::Continuous;
    if (text == "categorical") return VariableKind::Categorical;
    throw ValidationError("unknown variable kind '" + std::string(text) + "'");
}

VariableTable::VariableTable(std::vector<Variable> vars) : vars_(std::move(vars)) {
    std::unordered_set<std::string> seen;
    for (const auto& v : vars_) {
        if (!seen.insert(v.name).second) throw ValidationError("duplicate variable name '" + v.name + "'");
    }
}

std::optional<std::size_t> VariableTable::find(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return i;
    return std::nullopt;
}

std::size_t VariableTable::index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw UsageError("unknown variable '" + std::string(name) + "'");
}

void VariableTable::push_back(Variable v) {
    if (find(v.name)) throw ValidationError("duplicate variable name '" + v.name + "'");
    vars_.push_back(std::move(v));
}

VariableTable VariableTable::subset(const std::vector<std::size_t>& keep) const {
    std::vector<Variable> out;
    out.reserve(keep.size());
    for (std::size_t i : keep) out.push_back(vars_.at(i));
    return VariableTable(std::move(out));
}

std::string VariableTable::label(std::size_t i) const {
    const auto& v = vars_.at(i);
    if (v.denotation) return v.name + " (" + *v.denotation + ")";
    return v.name;
}

}  // namespace causalrl::data
