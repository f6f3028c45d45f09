#include "causalrl/data/csv.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "causalrl/errors.hpp"

namespace causalrl::data {

namespace {

std::optional<double> parse_number(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    if (b == e) return std::nullopt;
    const char* first = s.data() + b;
    if (*first == '+') ++first;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, s.data() + e, v);
    if (ec != std::errc() || ptr != s.data() + e) return std::nullopt;
    return v;
}

bool is_blank(const std::string& s) {
    return s.find_first_not_of(" \t") == std::string::npos;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any = false;  // current record has content
    char c;
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                any = true;
                break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r':
                break;
            case '\n':
                if (any || !field.empty()) {
                    record.push_back(std::move(field));
                    records.push_back(std::move(record));
                }
                record.clear();
                field.clear();
                any = false;
                break;
            default:
                field += c;
                any = true;
        }
    }
    if (in_quotes) throw IngestionError("csv: unterminated quoted field in record " + std::to_string(records.size()));
    if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<VariableTable>& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestionError("cannot open '" + path.string() + "'");
    try {
        return load_csv(in, schema);
    } catch (const IngestionError& e) {
        throw IngestionError(path.string() + ": " + e.what());
    }
}

Dataset load_csv(std::istream& in, const std::optional<VariableTable>& schema) {
    auto records = parse_csv(in);
    if (records.empty()) throw IngestionError("csv: missing header row");
    const auto& header = records.front();
    if (records.size() < 2) throw IngestionError("csv: no data rows");
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != header.size()) {
            throw IngestionError("csv: data row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                                 " fields, header has " + std::to_string(header.size()));
        }
    }

    // Source column index per output variable.
    std::vector<std::size_t> source;
    VariableTable vars;
    if (schema) {
        for (const auto& v : *schema) {
            std::size_t found = header.size();
            for (std::size_t c = 0; c < header.size(); ++c)
                if (header[c] == v.name) found = c;
            if (found == header.size()) throw IngestionError("csv: schema column '" + v.name + "' not in header");
            source.push_back(found);
            vars.push_back(v);
        }
    } else {
        for (std::size_t c = 0; c < header.size(); ++c) {
            source.push_back(c);
            vars.push_back(Variable{header[c], VariableKind::Continuous, std::nullopt});
        }
    }

    DatasetNotes notes;
    std::vector<std::size_t> keep_rows;
    for (std::size_t r = 1; r < records.size(); ++r) {
        bool complete = true;
        for (std::size_t c : source) complete = complete && !is_blank(records[r][c]);
        if (complete) keep_rows.push_back(r);
        else ++notes.dropped_rows;
    }
    if (keep_rows.empty()) throw IngestionError("csv: every data row has a missing cell");

    std::vector<Column> columns;
    for (std::size_t j = 0; j < source.size(); ++j) {
        const std::size_t c = source[j];
        NumericColumn num;
        num.reserve(keep_rows.size());
        std::optional<std::size_t> bad_row;
        for (std::size_t r : keep_rows) {
            auto v = parse_number(records[r][c]);
            if (!v) {
                bad_row = r;
                break;
            }
            num.push_back(*v);
        }
        if (!bad_row) {
            columns.emplace_back(std::move(num));
            continue;
        }
        if (schema && (*schema)[j].kind == VariableKind::Continuous) {
            throw IngestionError("csv: row " + std::to_string(*bad_row) + ", column '" + vars[j].name +
                                 "': non-numeric value '" + records[*bad_row][c] + "' in continuous column");
        }
        TextColumn text;
        text.reserve(keep_rows.size());
        for (std::size_t r : keep_rows) text.push_back(records[r][c]);
        vars[j].kind = VariableKind::Categorical;
        columns.emplace_back(std::move(text));
    }
    return Dataset(std::move(vars), std::move(columns), std::move(notes));
}

VariableTable load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestionError("cannot open schema '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestionError("schema '" + path.string() + "': " + e.what());
    }
    if (!j.contains("variables") || !j["variables"].is_array()) {
        throw IngestionError("schema '" + path.string() + "': missing 'variables' array");
    }
    VariableTable table;
    for (const auto& v : j["variables"]) {
        Variable var;
        var.name = v.at("name").get<std::string>();
        var.kind = parse_variable_kind(v.value("kind", std::string("continuous")));
        if (v.contains("denotation") && !v["denotation"].is_null()) var.denotation = v["denotation"].get<std::string>();
        table.push_back(std::move(var));
    }
    return table;
}

void write_csv(std::ostream& out, const Dataset& ds) {
    for (std::size_t j = 0; j < ds.cols(); ++j) out << (j ? "," : "") << quote(ds.variables()[j].name);
    out << '\n';
    for (std::size_t i = 0; i < ds.rows(); ++i) {
        for (std::size_t j = 0; j < ds.cols(); ++j) {
            if (j) out << ',';
            const auto& col = ds.column(j);
            if (const auto* num = std::get_if<NumericColumn>(&col)) {
                char buf[32];
                auto res = std::to_chars(buf, buf + sizeof buf, (*num)[i]);
                out.write(buf, res.ptr - buf);
            } else {
                out << quote(std::get<TextColumn>(col)[i]);
            }
        }
        out << '\n';
    }
}

}  // namespace causalrl::data
