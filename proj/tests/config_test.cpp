#include <doctest.h>

#include <algorithm>

#include <json.hpp>

#include "curator/config.hpp"

#include "testutil.hpp"

using namespace curator;
using namespace curator::config;
using nlohmann::json;

namespace {

json minimal() {
  // Smallest valid document: fixture mode would demand an existing directory.
  return {{"workspace", "ws"}, {"provider", {{"mode", "http"}, {"endpoint", "e:1"}}}};
}

bool has_issue(const ConfigResult& result, const std::string& path) {
  return std::any_of(result.issues.begin(), result.issues.end(),
                     [&](const ConfigIssue& i) { return i.path == path; });
}

}  // namespace

TEST_CASE("a minimal config materializes all pipeline defaults") {
  const auto result = parse_config(minimal(), "/base");
  REQUIRE(result.issues.empty());
  const PipelineConfig& cfg = *result.config;

  CHECK(cfg.workspace == std::filesystem::path("/base/ws"));
  CHECK(cfg.parallelism == 1);
  CHECK(cfg.seed == 0);
  CHECK(cfg.stages == kCanonicalStages);

  CHECK(cfg.segmenter.boundary_threshold == 0.4);
  CHECK(cfg.segmenter.head_tail_trim_ms == 120'000);
  CHECK(cfg.segmenter.shot_trim_ms == 5'000);
  CHECK(cfg.segmenter.clip_len_ms == 60'000);

  CHECK(cfg.filters.luma_low == 16);
  CHECK(cfg.filters.luma_high == 235);
  CHECK(cfg.filters.luma_run_len == 15);
  CHECK(cfg.filters.quality_drop_frac == 0.10);
  CHECK(cfg.filters.subtitle_min_visible_s == 0.75);
  CHECK(cfg.filters.subtitle_region_frac == 1.0 / 3.0);
  CHECK(cfg.filters.reversal_angle_deg == 150);
  CHECK(cfg.filters.reversal_window_s == 10);
  CHECK(cfg.filters.reversal_min_count == 2);
  CHECK(cfg.filters.viewpoint_shift_deg == 60);
  CHECK(cfg.filters.displacement_factor == 5);
  CHECK(cfg.filters.displacement_window_frames == 30);
  CHECK(cfg.filter_options.luma_on_real);
  CHECK(cfg.filter_options.luma_on_game);
  CHECK(cfg.filter_options.trajectory_only_annotated);

  CHECK(cfg.sampling.alpha_quality == 0.7);
  CHECK(cfg.sampling.alpha_content == 0.7);
  CHECK(cfg.sampling.alpha_location == 0.6);
  CHECK(cfg.sampling.alpha_category == 0.6);
  CHECK(cfg.sampling.alpha_camera == 0.75);
  CHECK(!cfg.sampling.kmeans_k.has_value());
  CHECK(cfg.sampling.azimuth_bins == 8);
  CHECK(cfg.sampling.elevation_bins == 4);
  CHECK(cfg.sampling.jitter_bins == 10);

  CHECK(cfg.report.quality_bin_width == 0.05);
  CHECK(cfg.report.caption_token_bin_width == 20);

  CHECK(cfg.vocabulary.scene == LabelVocabulary::defaults().scene);
  CHECK(cfg.vocabulary.crowd_density == LabelVocabulary::defaults().crowd_density);
}

TEST_CASE("violations are reported under dotted field paths") {
  auto doc = minimal();
  doc["sampling"] = {{"alpha_location", 1.5}};
  auto result = parse_config(doc, ".");
  CHECK(!result.config.has_value());
  REQUIRE(result.issues.size() == 1);
  CHECK(result.issues[0].path == "sampling.alpha_location");
  CHECK(result.issues[0].message == "must be in (0, 1]");

  doc = minimal();
  doc["segmenter"] = {{"boundary_threshold", -0.1}};
  CHECK(has_issue(parse_config(doc, "."), "segmenter.boundary_threshold"));

  doc = minimal();
  doc["filters"] = {{"luma_low", 200.0}, {"luma_high", 100.0}};
  CHECK(has_issue(parse_config(doc, "."), "filters.luma_low"));

  doc = minimal();
  doc["filters"] = {{"quality_drop_frac", 1.0}};
  CHECK(has_issue(parse_config(doc, "."), "filters.quality_drop_frac"));

  doc = minimal();
  doc["parallelism"] = 0;
  CHECK(has_issue(parse_config(doc, "."), "parallelism"));

  doc = minimal();
  doc["seed"] = -4;
  CHECK(has_issue(parse_config(doc, "."), "seed"));

  CHECK(has_issue(parse_config(json::array(), "."), ""));
}

TEST_CASE("unknown fields are flagged rather than ignored") {
  auto doc = minimal();
  doc["segmneter"] = json::object();  // typo at the top level
  CHECK(has_issue(parse_config(doc, "."), "segmneter"));

  doc = minimal();
  doc["sampling"] = {{"alpha_qualty", 0.5}};
  CHECK(has_issue(parse_config(doc, "."), "sampling.alpha_qualty"));
}

TEST_CASE("stage lists may thin the canonical order but not break it") {
  auto doc = minimal();
  doc["stages"] = {"collect", "segment", "filter"};
  const auto ok = parse_config(doc, ".");
  REQUIRE(ok.config.has_value());
  CHECK(ok.config->stages == std::vector<std::string>{"collect", "segment", "filter"});

  doc["stages"] = {"segment", "collect"};
  auto bad = parse_config(doc, ".");
  REQUIRE(bad.issues.size() == 1);
  CHECK(bad.issues[0].path == "stages");
  CHECK(bad.issues[0].message == "stage 'collect' out of canonical order");

  doc["stages"] = {"collect", "transcode"};
  bad = parse_config(doc, ".");
  REQUIRE(bad.issues.size() == 1);
  CHECK(bad.issues[0].message == "unknown stage 'transcode'");
}

TEST_CASE("durations are given in seconds and stored as milliseconds") {
  auto doc = minimal();
  doc["segmenter"] = {{"head_tail_trim_s", 90.5}, {"clip_len_s", 45}};
  const auto result = parse_config(doc, ".");
  REQUIRE(result.config.has_value());
  CHECK(result.config->segmenter.head_tail_trim_ms == 90'500);
  CHECK(result.config->segmenter.clip_len_ms == 45'000);
  CHECK(result.config->segmenter.shot_trim_ms == 5'000);  // untouched default
}

TEST_CASE("the top-level seed mirrors into sampling") {
  auto doc = minimal();
  doc["seed"] = 12345;
  const auto result = parse_config(doc, ".");
  REQUIRE(result.config.has_value());
  CHECK(result.config->seed == 12345);
  CHECK(result.config->sampling.seed == 12345);
}

TEST_CASE("fixture mode demands an existing fixture directory") {
  const json doc = {{"workspace", "ws"}};
  CHECK(has_issue(parse_config(doc, "."), "provider.fixture_dir"));

  const json absent = {{"workspace", "ws"},
                       {"provider", {{"fixture_dir", "no_such_dir_here"}}}};
  CHECK(has_issue(parse_config(absent, "."), "provider.fixture_dir"));

  const testutil::TempDir dir("cfg_fixtures");
  const json present = {{"workspace", "ws"},
                        {"provider", {{"fixture_dir", dir.path().string()}}}};
  const auto result = parse_config(present, "/elsewhere");
  REQUIRE(result.config.has_value());
  CHECK(result.config->provider.fixture_dir == dir.path());
  CHECK(result.config->provider.mode == ProviderConfig::Mode::kFixture);

  // Relative fixture paths resolve against the config's directory.
  const json relative = {{"workspace", "ws"},
                         {"provider", {{"fixture_dir", dir.path().filename().string()}}}};
  const auto rel = parse_config(relative, dir.path().parent_path());
  REQUIRE(rel.config.has_value());
  CHECK(rel.config->provider.fixture_dir == dir.path());
}

TEST_CASE("config_to_json is a fixed point once paths are absolute") {
  const testutil::TempDir dir("cfg_rt");
  json doc = minimal();
  doc["seed"] = 7;
  doc["sampling"] = {{"kmeans_k", 16}, {"alpha_camera", 0.5}};
  doc["vocabulary"] = {{"scene", {"indoor", "outdoor"}}};

  const auto first = parse_config(doc, dir.path());
  REQUIRE(first.issues.empty());
  const json out1 = config_to_json(*first.config);

  const auto second = parse_config(out1, "/unused_base");
  REQUIRE(second.issues.empty());
  const json out2 = config_to_json(*second.config);
  CHECK(out1.dump(2) == out2.dump(2));
  CHECK(out1.at("sampling").at("kmeans_k") == 16);
  CHECK(out1.at("vocabulary").at("scene") == json({"indoor", "outdoor"}));
  CHECK(out1.at("vocabulary").at("weather").size() == 4);  // defaults retained
}

TEST_CASE("load_config surfaces file and JSON errors as issues") {
  const testutil::TempDir dir("cfg_load");
  CHECK(!load_config(dir.path() / "missing.json").config.has_value());

  testutil::spit(dir.path() / "broken.json", "{not json");
  const auto broken = load_config(dir.path() / "broken.json");
  REQUIRE(broken.issues.size() == 1);
  CHECK(broken.issues[0].message.find("not valid JSON") != std::string::npos);

  testutil::spit(dir.path() / "good.json",
                 json{{"workspace", "ws"},
                      {"provider", {{"mode", "http"}, {"endpoint", "h:1"}}}}
                     .dump());
  const auto good = load_config(dir.path() / "good.json");
  REQUIRE(good.config.has_value());
  // The workspace resolves relative to the config file's directory.
  CHECK(good.config->workspace == dir.path() / "ws");
}
