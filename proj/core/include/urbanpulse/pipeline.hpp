#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "urbanpulse/cluster.hpp"
#include "urbanpulse/error.hpp"
#include "urbanpulse/sentiment.hpp"
#include "urbanpulse/sitescore.hpp"

namespace urbanpulse::pipeline {

/// Bad or missing configuration. Exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Nothing left to cluster after filtering. Exit status 3.
class EmptyDatasetError : public Error {
public:
    using Error::Error;
};

/// Every knob of a pipeline run. Loaded from a JSON file whose keys match the
/// command-line flags (`min_pts` <-> `--min-pts`); relative paths resolve
/// against the config file's directory.
struct PipelineConfig {
    std::filesystem::path checkins;
    std::filesystem::path checkins_schema;
    std::filesystem::path reports;
    std::filesystem::path reports_schema;
    std::filesystem::path comments;
    std::filesystem::path comments_schema;
    std::filesystem::path articles;
    std::filesystem::path category_map;
    std::filesystem::path lexicon;
    std::filesystem::path language;
    std::filesystem::path annotations;
    std::filesystem::path out = "out";

    cluster::DbscanParams dbscan;
    double radius_m = 200.0;
    sitescore::Thresholds thresholds;
    sentiment::ScoringOptions scoring;
    std::optional<std::string> date_from;
    std::optional<std::string> date_to;
    std::set<std::string> share_subset;
    bool deterministic = true;

    /// Keys accepted in config files and as flags.
    static const std::vector<std::string>& keys();

    static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static PipelineConfig load(const std::filesystem::path& path);

    /// Applies one key=value override; paths resolve against `base_dir`.
    void set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir = {});

    /// Parameters that determine outputs (no paths), in a stable order.
    nlohmann::json parameters() const;
};

/// Files produced by a command, in the order they were written.
struct StageResult {
    std::vector<std::filesystem::path> outputs;
    std::vector<std::string> messages;
};

StageResult cmd_cluster(const PipelineConfig& config);
StageResult cmd_enrich(const PipelineConfig& config);
StageResult cmd_score_sites(const PipelineConfig& config);
StageResult cmd_react(const PipelineConfig& config);
/// Runs all four stages and writes manifest.json with input and output SHA-256 digests.
StageResult cmd_pipeline(const PipelineConfig& config);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Splits an articles file on lines consisting solely of `---`. Empty articles are dropped.
std::vector<std::string> read_articles(const std::filesystem::path& path);

}  // namespace urbanpulse::pipeline
