#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/checkpoints.hpp"
#include "curator/config.hpp"
#include "curator/manifest.hpp"
#include "curator/providers.hpp"
#include "curator/trajectory.hpp"

namespace curator::pipeline {

struct StageResult {
  std::string stage;
  bool skipped = false;  // checkpoint matched; nothing executed
  nlohmann::json details;
};

// Trajectory summaries for the active clips that carry pose artifacts, plus
// the data-driven jitter decile edges they were binned with.
struct SummaryBundle {
  std::vector<traj::TrajectorySummary> summaries;
  std::vector<double> jitter_edges;
};

// Stage-graph runner over a workspace directory. Every stage reads one
// manifest, writes the next one atomically, and records a checkpoint keyed by
// a digest of (input bytes, config subtree, seed); stages whose digest is
// unchanged are skipped on rerun.
//
// Workspace layout:
//   manifests/<stage output>.jsonl    stage outputs (see manifest_path)
//   artifacts/trajectories/<clip>.traj
//   artifacts/embeddings.jsonl
//   reports/stage_<name>.json         per-stage diagnostics
//   reports/sample_trace.json         full five-stage sampling trace
//   reports/report.json, hist_*.tsv   corpus statistics
//   checkpoints.json
class Pipeline {
 public:
  explicit Pipeline(config::PipelineConfig config);

  // Runs the requested stages (canonical order enforced); empty = all stages
  // enabled in the config.
  std::vector<StageResult> run(std::vector<std::string> stages = {});

  // Output manifest (or report file) a stage commits.
  std::filesystem::path stage_output(const std::string& stage) const;

  const config::PipelineConfig& config() const { return cfg_; }
  providers::CachingProvider& provider() { return *provider_; }

  // Loads trajectory artifacts referenced by the manifest's active clips and
  // summarizes them for camera sampling / reporting.
  SummaryBundle load_summaries(const Manifest& manifest) const;

 private:
  StageResult run_stage(const std::string& stage);
  std::string stage_digest(const std::string& stage,
                           const std::string& input_bytes) const;
  std::filesystem::path stage_input(const std::string& stage) const;
  Manifest parse_stage_input(const std::string& stage, const std::string& bytes,
                             nlohmann::json* details) const;

  Manifest stage_collect(Manifest in, nlohmann::json* details);
  Manifest stage_segment(Manifest in, nlohmann::json* details);
  Manifest stage_filter(Manifest in, nlohmann::json* details);
  Manifest stage_annotate_match(Manifest in, nlohmann::json* details);
  Manifest stage_sample(Manifest in, nlohmann::json* details);
  void stage_report(const Manifest& in, nlohmann::json* details);

  config::PipelineConfig cfg_;
  std::shared_ptr<providers::CachingProvider> provider_;
  checkpoints::CheckpointStore store_;
};

// Builds the provider stack from the config; CURATE_PROVIDER_ENDPOINT, when
// set, redirects to an HTTP provider at that endpoint (endpoint override is
// the only environment hook).
std::shared_ptr<providers::CachingProvider> make_provider(
    const config::ProviderConfig& config);

}  // namespace curator::pipeline
