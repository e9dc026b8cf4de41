#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "curator/manifest_io.hpp"
#include "curator/pipeline.hpp"
#include "curator/synth.hpp"
#include "curator/transcode.hpp"
#include "curator/util.hpp"

#include "testutil.hpp"

using namespace curator;
namespace fs = std::filesystem;

namespace {

synth::CorpusSpec small_spec() {
  synth::CorpusSpec spec;
  spec.videos = 4;
  spec.target_clips = 24;
  spec.seed = 5;
  return spec;
}

// Lays out <dir>/fixtures and <dir>/input.jsonl and returns a ready config.
config::PipelineConfig corpus_config(const synth::Corpus& corpus, const fs::path& dir,
                                     const fs::path& workspace) {
  synth::write_fixtures(corpus, dir / "fixtures");
  save_manifest(corpus.input, dir / "input.jsonl");

  config::PipelineConfig cfg;
  cfg.workspace = workspace;
  cfg.input_manifest = dir / "input.jsonl";
  cfg.provider.mode = config::ProviderConfig::Mode::kFixture;
  cfg.provider.fixture_dir = dir / "fixtures";
  cfg.seed = 17;
  cfg.sampling.seed = cfg.seed;
  return cfg;
}

std::vector<std::string> clip_ids(const Manifest& m) {
  std::vector<std::string> ids;
  for (const auto& c : m.clips) {
    ids.push_back(c.clip_id);
  }
  return ids;
}

std::vector<std::string> expected_ids(const synth::Corpus& corpus) {
  std::vector<std::string> ids;
  for (const auto& c : corpus.expected_clips) {
    ids.push_back(c.clip_id);
  }
  return ids;
}

}  // namespace

TEST_CASE("the pipeline runs end to end over a synthetic corpus") {
  const testutil::TempDir dir("pipe_full");
  const auto corpus = synth::make_corpus(small_spec());
  auto cfg = corpus_config(corpus, dir.path(), dir.path() / "ws");

  pipeline::Pipeline pipe(cfg);
  const auto results = pipe.run();
  REQUIRE(results.size() == 6);
  for (const auto& r : results) {
    CHECK(!r.skipped);
  }

  // Every stage committed its output.
  for (const char* name :
       {"collected", "segmented", "filtered", "matched", "sampled"}) {
    CHECK(fs::exists(dir.path() / "ws" / "manifests" / (std::string(name) + ".jsonl")));
  }
  CHECK(fs::exists(dir.path() / "ws" / "reports" / "report.json"));
  CHECK(fs::exists(dir.path() / "ws" / "reports" / "sample_trace.json"));
  CHECK(fs::exists(dir.path() / "ws" / "reports" / "stage_segment.json"));
  CHECK(fs::exists(dir.path() / "ws" / "checkpoints.json"));

  // The segmenter recovered exactly the designed clip set.
  const auto segmented =
      load_manifest(dir.path() / "ws" / "manifests" / "segmented.jsonl");
  CHECK(segmented.diagnostics.empty());
  CHECK(clip_ids(segmented.manifest) == expected_ids(corpus));

  // The final manifest still carries every clip, annotated or tombstoned.
  const auto sampled =
      load_manifest(dir.path() / "ws" / "manifests" / "sampled.jsonl");
  CHECK(clip_ids(sampled.manifest) == expected_ids(corpus));
  std::size_t active = 0;
  for (const auto& clip : sampled.manifest.clips) {
    if (!clip.active()) {
      continue;
    }
    ++active;
    CHECK(clip.location.has_value());
    CHECK(clip.categories.has_value());
    CHECK(clip.caption.has_value());
    CHECK(clip.scores.has_value());
    CHECK(!clip.embedding_ref.empty());
    if (!clip.trajectory_ref.empty()) {
      CHECK(fs::exists(dir.path() / "ws" / fs::path(clip.trajectory_ref)));
    }
  }
  CHECK(active > 0);
  CHECK(active < corpus.expected_clips.size());

  // Rerunning the same configuration does nothing and changes nothing.
  const auto sampled_bytes =
      testutil::slurp(dir.path() / "ws" / "manifests" / "sampled.jsonl");
  pipeline::Pipeline again(cfg);
  const auto rerun = again.run();
  REQUIRE(rerun.size() == 6);
  for (const auto& r : rerun) {
    CHECK(r.skipped);
  }
  CHECK(testutil::slurp(dir.path() / "ws" / "manifests" / "sampled.jsonl") ==
        sampled_bytes);
}

TEST_CASE("a seed change invalidates sampling but not the earlier stages") {
  const testutil::TempDir dir("pipe_seed");
  const auto corpus = synth::make_corpus(small_spec());
  auto cfg = corpus_config(corpus, dir.path(), dir.path() / "ws");

  pipeline::Pipeline first(cfg);
  first.run();

  cfg.seed = 18;
  cfg.sampling.seed = cfg.seed;
  pipeline::Pipeline second(cfg);
  const auto results = second.run();
  REQUIRE(results.size() == 6);
  for (const auto& r : results) {
    if (r.stage == "sample") {
      CHECK(!r.skipped);  // its digest covers the seed
    } else if (r.stage != "report") {
      CHECK(r.skipped);  // upstream stages are seed-independent
    }
    // "report" may legitimately skip if the reshuffled sample kept the same
    // clips; its digest only sees the sampled manifest bytes.
  }
}

TEST_CASE("independent workspaces and thread counts give identical bytes") {
  const testutil::TempDir dir("pipe_repro");
  const auto corpus = synth::make_corpus(small_spec());

  const auto cfg_a = corpus_config(corpus, dir.path(), dir.path() / "ws_a");
  pipeline::Pipeline(cfg_a).run();

  auto cfg_b = corpus_config(corpus, dir.path(), dir.path() / "ws_b");
  cfg_b.parallelism = 3;
  pipeline::Pipeline(cfg_b).run();

  for (const char* rel :
       {"manifests/collected.jsonl", "manifests/segmented.jsonl",
        "manifests/filtered.jsonl", "manifests/matched.jsonl",
        "manifests/sampled.jsonl", "reports/report.json",
        "reports/sample_trace.json"}) {
    CHECK(testutil::slurp(dir.path() / "ws_a" / rel) ==
          testutil::slurp(dir.path() / "ws_b" / rel));
  }
}

TEST_CASE("an absent input manifest yields an empty but complete run") {
  const testutil::TempDir dir("pipe_empty");
  config::PipelineConfig cfg;
  cfg.workspace = dir.path() / "ws";
  cfg.provider.mode = config::ProviderConfig::Mode::kFixture;
  cfg.provider.fixture_dir = dir.path();  // never consulted: nothing to fetch

  pipeline::Pipeline pipe(cfg);
  const auto results = pipe.run();
  REQUIRE(results.size() == 6);

  const auto sampled =
      load_manifest(dir.path() / "ws" / "manifests" / "sampled.jsonl");
  CHECK(sampled.diagnostics.empty());
  CHECK(sampled.manifest.videos.empty());
  CHECK(sampled.manifest.clips.empty());

  const auto report = nlohmann::json::parse(
      testutil::slurp(dir.path() / "ws" / "reports" / "report.json"));
  CHECK(report.at("active_clips") == 0);
}

TEST_CASE("stages demand their upstream output") {
  const testutil::TempDir dir("pipe_missing");
  config::PipelineConfig cfg;
  cfg.workspace = dir.path() / "ws";
  cfg.provider.mode = config::ProviderConfig::Mode::kFixture;
  cfg.provider.fixture_dir = dir.path();

  pipeline::Pipeline pipe(cfg);
  try {
    pipe.run({"filter"});
    FAIL("expected a missing-input error");
  } catch (const std::runtime_error& e) {
    const std::string what = e.what();
    CHECK(what.find("input manifest missing for stage 'filter'") != std::string::npos);
    CHECK(what.find("run 'segment' first") != std::string::npos);
  }

  CHECK_THROWS_AS(pipe.run({"segment", "collect"}), std::invalid_argument);
  CHECK_THROWS_AS(pipe.run({"transcode"}), std::invalid_argument);

  cfg.stages = {"collect", "segment", "filter"};
  pipeline::Pipeline thin(cfg);
  CHECK_THROWS_AS(thin.run({"sample"}), std::invalid_argument);
}

TEST_CASE("transcode planning covers exactly the active clips") {
  Manifest m;
  VideoRecord real;
  real.video_id = "walk";
  real.source = SourceClass::kReal;
  real.view = ViewKind::kWalking;
  real.duration_ms = 600'000;
  real.fps = 30;
  m.videos.push_back(real);

  VideoRecord game = real;
  game.video_id = "game";
  game.source = SourceClass::kGame;
  m.videos.push_back(game);

  VideoRecord drone = real;
  drone.video_id = "drone";
  drone.view = ViewKind::kDrone;
  m.videos.push_back(drone);

  auto add_clip = [&](const std::string& id, const std::string& vid,
                      std::optional<RemovalReason> removed) {
    ClipRecord c;
    c.clip_id = id;
    c.video_id = vid;
    c.start_ms = 120'000;
    c.end_ms = 180'000;
    c.removed = removed;
    m.clips.push_back(c);
  };
  add_clip("c1", "walk", std::nullopt);
  add_clip("c2", "game", std::nullopt);
  add_clip("c0", "drone", std::nullopt);
  add_clip("c3", "walk", RemovalReason::kLuma);
  add_clip("c4", "game", RemovalReason::kSampler);
  m.sort_canonical();

  const auto jobs = transcode::emit_transcode_plan(m);
  REQUIRE(jobs.size() == 3);
  CHECK(jobs[0].clip_id == "c0");  // sorted by clip id
  CHECK(jobs[1].clip_id == "c1");
  CHECK(jobs[2].clip_id == "c2");
  CHECK(!jobs[0].mux_audio);  // drone view: no ambient audio track
  CHECK(jobs[1].mux_audio);   // real walking footage keeps audio
  CHECK(!jobs[2].mux_audio);  // game capture: no audio

  const auto text = transcode::plan_to_string(jobs);
  const auto lines = util::split_lines(text);
  REQUIRE(lines.size() == 3);
  const auto row = nlohmann::json::parse(lines[1]);
  CHECK(row.at("clip_id") == "c1");
  CHECK(row.at("start_s") == 120.0);
  CHECK(row.at("end_s") == 180.0);
  CHECK(row.at("target").at("height") == 720);
  CHECK(row.at("target").at("fps") == 30);
  CHECK(row.at("target").at("codec") == "h265");
  CHECK(row.at("target").at("video_bitrate_kbps") == 4000);
  CHECK(row.at("audio").at("mux") == true);
  CHECK(row.at("audio").at("sample_rate_hz") == 48'000);
  CHECK(row.at("audio").at("codec") == "aac");
}
