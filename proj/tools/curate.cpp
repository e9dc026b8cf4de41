// Command-line front end for the curation pipeline. Stage subcommands run the
// canonical stage graph up to and including the named stage; checkpointing
// makes already-completed prefixes free, so `curate filter` after a finished
// `curate segment` only executes the filter stage.

#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curator/config.hpp"
#include "curator/manifest_io.hpp"
#include "curator/pipeline.hpp"
#include "curator/transcode.hpp"
#include "curator/util.hpp"

namespace {

struct Overrides {
  std::string config_path = "curate.json";
  std::string workspace;
  std::string fixtures;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

curator::config::PipelineConfig load_config_or_exit(const Overrides& overrides) {
  auto result = curator::config::load_config(overrides.config_path);
  if (!result.config) {
    for (const auto& issue : result.issues) {
      std::fprintf(stderr, "config error at %s: %s\n", issue.path.c_str(),
                   issue.message.c_str());
    }
    std::exit(2);
  }
  auto config = std::move(*result.config);
  if (!overrides.workspace.empty()) {
    config.workspace = overrides.workspace;
  }
  if (!overrides.fixtures.empty()) {
    config.provider.mode = curator::config::ProviderConfig::Mode::kFixture;
    config.provider.fixture_dir = overrides.fixtures;
  }
  if (overrides.seed_set) {
    config.seed = overrides.seed;
    config.sampling.seed = overrides.seed;
  }
  return config;
}

// The enabled stages up to and including `target`, in canonical order.
std::vector<std::string> stages_through(const curator::config::PipelineConfig& config,
                                        const std::string& target) {
  if (std::find(config.stages.begin(), config.stages.end(), target) ==
      config.stages.end()) {
    std::fprintf(stderr, "error: stage '%s' is disabled in the config\n",
                 target.c_str());
    std::exit(2);
  }
  std::vector<std::string> stages;
  for (const std::string& stage : curator::config::kCanonicalStages) {
    if (std::find(config.stages.begin(), config.stages.end(), stage) !=
        config.stages.end()) {
      stages.push_back(stage);
    }
    if (stage == target) {
      break;
    }
  }
  return stages;
}

int run_stages(const curator::config::PipelineConfig& config,
               const std::vector<std::string>& stages) {
  curator::pipeline::Pipeline pipeline(config);
  const auto results = pipeline.run(stages);
  for (const auto& result : results) {
    if (result.skipped) {
      std::printf("stage %-14s skipped (checkpoint up to date)\n",
                  result.stage.c_str());
    } else {
      std::printf("stage %-14s done %s\n", result.stage.c_str(),
                  result.details.dump().c_str());
    }
  }
  return 0;
}

int plan_transcode(const curator::config::PipelineConfig& config,
                   const std::string& manifest_override,
                   const std::string& output_override) {
  std::filesystem::path manifest_path =
      manifest_override.empty() ? config.workspace / "manifests" / "sampled.jsonl"
                                : std::filesystem::path(manifest_override);
  auto loaded = curator::load_manifest(manifest_path);
  if (!loaded.clean()) {
    std::fprintf(stderr, "error: manifest %s has %zu invalid records\n",
                 manifest_path.string().c_str(), loaded.diagnostics.size());
    return 1;
  }
  const auto jobs = curator::transcode::emit_transcode_plan(loaded.manifest);
  const std::filesystem::path output =
      output_override.empty() ? config.workspace / "plans" / "transcode.jsonl"
                              : std::filesystem::path(output_override);
  std::filesystem::create_directories(output.parent_path());
  curator::util::atomic_write_file(output, curator::transcode::plan_to_string(jobs));
  std::printf("wrote %zu transcode jobs to %s\n", jobs.size(),
              output.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic video-corpus curation pipeline"};
  app.require_subcommand(1);

  Overrides overrides;
  app.add_option("-c,--config", overrides.config_path, "pipeline config file")
      ->capture_default_str();
  app.add_option("--workspace", overrides.workspace,
                 "override the workspace directory");
  app.add_option("--fixtures", overrides.fixtures,
                 "use fixture payloads from this directory");
  app.add_option("--seed", overrides.seed, "override the pipeline seed")
      ->each([&overrides](const std::string&) { overrides.seed_set = true; });

  auto* validate = app.add_subcommand(
      "validate", "check the config and print the effective settings");

  struct StageCommand {
    const char* name;
    const char* help;
    const char* target;
  };
  constexpr StageCommand kStageCommands[] = {
      {"segment", "detect shots and extract fixed-length clips", "segment"},
      {"filter", "apply luminance/subtitle/trajectory/quality filters", "filter"},
      {"match-locations", "match clips against chapter locations and annotate",
       "annotate-match"},
      {"sample", "run the five-stage diversity sampler", "sample"},
      {"report", "build corpus statistics", "report"},
  };
  std::vector<CLI::App*> stage_apps;
  for (const auto& command : kStageCommands) {
    stage_apps.push_back(app.add_subcommand(command.name, command.help));
  }

  auto* run = app.add_subcommand("run", "run the enabled stages end to end");
  std::vector<std::string> run_stage_list;
  run->add_option("stages", run_stage_list,
                  "stages to run (default: all enabled, canonical order)");

  auto* plan = app.add_subcommand("plan-transcode",
                                  "emit transcode jobs for active clips");
  std::string plan_manifest;
  std::string plan_output;
  plan->add_option("--manifest", plan_manifest,
                   "manifest to plan from (default: workspace sampled manifest)");
  plan->add_option("-o,--output", plan_output,
                   "plan file (default: <workspace>/plans/transcode.jsonl)");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = load_config_or_exit(overrides);
    if (validate->parsed()) {
      std::printf("%s\n", curator::config::config_to_json(config).dump(2).c_str());
      return 0;
    }
    for (std::size_t i = 0; i < stage_apps.size(); ++i) {
      if (stage_apps[i]->parsed()) {
        return run_stages(config, stages_through(config, kStageCommands[i].target));
      }
    }
    if (run->parsed()) {
      return run_stages(config, run_stage_list);
    }
    if (plan->parsed()) {
      return plan_transcode(config, plan_manifest, plan_output);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
