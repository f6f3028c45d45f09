#ifndef CAUSALRL_PIPELINE_CONFIG_HPP
#define CAUSALRL_PIPELINE_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "causalrl/data/preprocess.hpp"
#include "causalrl/policy/trainer.hpp"
#include "causalrl/scoring/bic.hpp"
#include "causalrl/strength/iie.hpp"

namespace causalrl::pipeline {

struct PipelineConfig {
    std::filesystem::path data;
    std::optional<std::filesystem::path> schema;
    std::string target;
    data::PreprocessConfig preprocess;
    policy::TrainerConfig trainer;
    scoring::RegressionKind regression = scoring::RegressionKind::Linear;
    double prune_threshold = strength::kDefaultPruneThreshold;
    std::size_t max_path_length = 3;  // longest indirect path listed in the report
    std::filesystem::path out = "out";

    void validate() const;
};

// Keys mirror the command-line flags ("graphs-per-iter", "lambda1", ...).
// Unknown keys and mistyped values raise ValidationError.
void apply_json(PipelineConfig& cfg, const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

// Every setting that influences the result. The output directory is only
// included on request so that runs differing only in --out serialise equally.
nlohmann::json to_json(const PipelineConfig& cfg, bool include_output = true);

}  // namespace causalrl::pipeline

#endif  // CAUSALRL_PIPELINE_CONFIG_HPP
