#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/filters.hpp"
#include "curator/manifest.hpp"
#include "curator/report.hpp"
#include "curator/sampling.hpp"
#include "curator/segmenter.hpp"

namespace curator::config {

// The fixed stage graph. Configs may disable a suffix/subset but never
// reorder; CLI subcommand `match-locations` drives the annotate-match stage.
inline const std::vector<std::string> kCanonicalStages = {
    "collect", "segment", "filter", "annotate-match", "sample", "report"};

struct ProviderConfig {
  enum class Mode { kFixture, kHttp };
  Mode mode = Mode::kFixture;
  std::filesystem::path fixture_dir;
  std::string endpoint;  // http mode; CURATE_PROVIDER_ENDPOINT overrides
  int max_attempts = 4;
  int base_backoff_ms = 50;
};

// Pipeline-level switches around the core filters: which source classes the
// luminance filter applies to, and whether the trajectory filter is restricted
// to clips that actually carry pose annotations.
struct FilterStageOptions {
  bool luma_on_real = true;
  bool luma_on_game = true;
  bool trajectory_only_annotated = true;
};

struct PipelineConfig {
  std::filesystem::path workspace;
  std::filesystem::path input_manifest;  // empty = start from an empty manifest
  unsigned parallelism = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> stages = kCanonicalStages;
  segment::SegmenterConfig segmenter;
  filters::FilterConfig filters;
  FilterStageOptions filter_options;
  sampling::SamplingConfig sampling;  // sampling.seed mirrors the top-level seed
  report::ReportConfig report;
  ProviderConfig provider;
  LabelVocabulary vocabulary = LabelVocabulary::defaults();
};

struct ConfigIssue {
  std::string path;  // dotted field path, e.g. "sampling.alpha_location"
  std::string message;
};

struct ConfigResult {
  std::optional<PipelineConfig> config;  // set iff issues is empty
  std::vector<ConfigIssue> issues;
};

// Parses and validates a config document. Relative paths resolve against
// base_dir; every violation is reported with its field path. Absent fields
// keep their defaults.
ConfigResult parse_config(const nlohmann::json& root,
                          const std::filesystem::path& base_dir);

ConfigResult load_config(const std::filesystem::path& path);

// Effective configuration with all defaults materialized; `validate` prints
// this, and stage digests hash its per-stage subtrees.
nlohmann::json config_to_json(const PipelineConfig& config);

}  // namespace curator::config
