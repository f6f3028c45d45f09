#include "causalrl/pipeline/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>

#include "causalrl/errors.hpp"

namespace causalrl::pipeline {

namespace {

using nlohmann::json;

std::size_t as_count(const json& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ValidationError("config: '" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

double as_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ValidationError("config: '" + key + "' must be a number");
    return v.get<double>();
}

bool as_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ValidationError("config: '" + key + "' must be true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string()) throw ValidationError("config: '" + key + "' must be a string");
    return v.get<std::string>();
}

using Setter = std::function<void(PipelineConfig&, const json&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table{
        {"data", [](auto& c, const json& v, const auto& k) { c.data = as_string(v, k); }},
        {"schema",
         [](auto& c, const json& v, const auto& k) {
             if (v.is_null()) {
                 c.schema.reset();
             } else {
                 c.schema = as_string(v, k);
             }
         }},
        {"target", [](auto& c, const json& v, const auto& k) { c.target = as_string(v, k); }},
        {"out", [](auto& c, const json& v, const auto& k) { c.out = as_string(v, k); }},
        {"seed",
         [](auto& c, const json& v, const auto& k) {
             if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                 throw ValidationError("config: '" + k + "' must be a non-negative integer");
             }
             c.trainer.seed = v.get<std::uint64_t>();
         }},
        {"iterations", [](auto& c, const json& v, const auto& k) { c.trainer.iterations = as_count(v, k); }},
        {"graphs-per-iter", [](auto& c, const json& v, const auto& k) { c.trainer.graphs_per_iteration = as_count(v, k); }},
        {"batch-size", [](auto& c, const json& v, const auto& k) { c.trainer.batch_size = as_count(v, k); }},
        {"lr", [](auto& c, const json& v, const auto& k) { c.trainer.actor_lr = as_number(v, k); }},
        {"critic-lr", [](auto& c, const json& v, const auto& k) { c.trainer.critic_lr = as_number(v, k); }},
        {"d-model", [](auto& c, const json& v, const auto& k) { c.trainer.d_model = as_count(v, k); }},
        {"heads", [](auto& c, const json& v, const auto& k) { c.trainer.heads = as_count(v, k); }},
        {"layers", [](auto& c, const json& v, const auto& k) { c.trainer.layers = as_count(v, k); }},
        {"ff-width", [](auto& c, const json& v, const auto& k) { c.trainer.ff_width = as_count(v, k); }},
        {"decoder-hidden", [](auto& c, const json& v, const auto& k) { c.trainer.decoder_hidden = as_count(v, k); }},
        {"critic-hidden", [](auto& c, const json& v, const auto& k) { c.trainer.critic_hidden = as_count(v, k); }},
        {"positional-encoding", [](auto& c, const json& v, const auto& k) { c.trainer.positional_encoding = as_bool(v, k); }},
        {"refine", [](auto& c, const json& v, const auto& k) { c.trainer.refine = as_bool(v, k); }},
        {"lambda1", [](auto& c, const json& v, const auto& k) { c.trainer.reward.lambda1 = as_number(v, k); }},
        {"lambda2", [](auto& c, const json& v, const auto& k) { c.trainer.reward.lambda2 = as_number(v, k); }},
        {"lambda1-cap", [](auto& c, const json& v, const auto& k) { c.trainer.reward.lambda1_cap = as_number(v, k); }},
        {"lambda2-cap", [](auto& c, const json& v, const auto& k) { c.trainer.reward.lambda2_cap = as_number(v, k); }},
        {"lambda-growth", [](auto& c, const json& v, const auto& k) { c.trainer.reward.growth = as_number(v, k); }},
        {"lambda-interval", [](auto& c, const json& v, const auto& k) { c.trainer.reward.interval = as_count(v, k); }},
        {"lambda-relative", [](auto& c, const json& v, const auto& k) { c.trainer.reward.relative = as_bool(v, k); }},
        {"regression",
         [](auto& c, const json& v, const auto& k) {
             try {
                 c.regression = scoring::parse_regression_kind(as_string(v, k));
             } catch (const std::invalid_argument& e) {
                 throw ValidationError(std::string("config: ") + e.what());
             }
         }},
        {"correlation-threshold",
         [](auto& c, const json& v, const auto& k) { c.preprocess.correlation_threshold = as_number(v, k); }},
        {"standardize", [](auto& c, const json& v, const auto& k) { c.preprocess.standardize = as_bool(v, k); }},
        {"drop-columns",
         [](auto& c, const json& v, const auto& k) {
             if (!v.is_array()) throw ValidationError("config: '" + k + "' must be an array of names");
             c.preprocess.drop_columns.clear();
             for (const auto& name : v) c.preprocess.drop_columns.push_back(as_string(name, k));
         }},
        {"prune-threshold",
         [](auto& c, const json& v, const auto& k) {
             // JSON has no infinity; null means "keep every edge".
             c.prune_threshold = v.is_null() ? -std::numeric_limits<double>::infinity() : as_number(v, k);
         }},
        {"max-path-length", [](auto& c, const json& v, const auto& k) { c.max_path_length = as_count(v, k); }},
    };
    return table;
}

}  // namespace

void PipelineConfig::validate() const {
    if (data.empty()) throw ValidationError("config: a data file is required");
    if (target.empty()) throw ValidationError("config: a target variable is required");
    if (!(preprocess.correlation_threshold > 0.0 && preprocess.correlation_threshold <= 1.0)) {
        throw ValidationError("config: correlation threshold must lie in (0, 1]");
    }
    if (std::isnan(prune_threshold) || prune_threshold == std::numeric_limits<double>::infinity()) {
        throw ValidationError("config: prune threshold must be a finite number or -inf");
    }
    if (max_path_length < 2) throw ValidationError("config: max path length must be >= 2");
    if (out.empty()) throw ValidationError("config: an output directory is required");
    trainer.validate();
}

void apply_json(PipelineConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
    const auto& table = setters();
    for (const auto& [key, value] : j.items()) {
        const auto it = table.find(key);
        if (it == table.end()) throw ValidationError("config: unknown key '" + key + "'");
        it->second(cfg, value, key);
    }
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config '" + path.string() + "': " + e.what());
    }
    PipelineConfig cfg;
    apply_json(cfg, j);
    return cfg;
}

nlohmann::json to_json(const PipelineConfig& cfg, bool include_output) {
    const auto& t = cfg.trainer;
    nlohmann::json j{
        {"data", cfg.data.generic_string()},
        {"schema", cfg.schema ? nlohmann::json(cfg.schema->generic_string()) : nlohmann::json(nullptr)},
        {"target", cfg.target},
        {"seed", t.seed},
        {"iterations", t.iterations},
        {"graphs-per-iter", t.graphs_per_iteration},
        {"batch-size", t.batch_size},
        {"lr", t.actor_lr},
        {"critic-lr", t.critic_lr},
        {"d-model", t.d_model},
        {"heads", t.heads},
        {"layers", t.layers},
        {"ff-width", t.ff_width},
        {"decoder-hidden", t.decoder_hidden},
        {"critic-hidden", t.critic_hidden},
        {"positional-encoding", t.positional_encoding},
        {"refine", t.refine},
        {"lambda1", t.reward.lambda1},
        {"lambda2", t.reward.lambda2},
        {"lambda1-cap", t.reward.lambda1_cap},
        {"lambda2-cap", t.reward.lambda2_cap},
        {"lambda-growth", t.reward.growth},
        {"lambda-interval", t.reward.interval},
        {"lambda-relative", t.reward.relative},
        {"regression", std::string(scoring::to_string(cfg.regression))},
        {"correlation-threshold", cfg.preprocess.correlation_threshold},
        {"standardize", cfg.preprocess.standardize},
        {"drop-columns", cfg.preprocess.drop_columns},
        {"prune-threshold", std::isfinite(cfg.prune_threshold) ? nlohmann::json(cfg.prune_threshold) : nlohmann::json(nullptr)},
        {"max-path-length", cfg.max_path_length},
    };
    if (include_output) j["out"] = cfg.out.generic_string();
    return j;
}

}  // namespace causalrl::pipeline
