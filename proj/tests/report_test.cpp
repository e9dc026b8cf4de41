#include <doctest.h>

#include <filesystem>
#include <map>

#include <json.hpp>

#include "curator/report.hpp"
#include "curator/util.hpp"

#include "testutil.hpp"

using namespace curator;
using namespace curator::report;

namespace {

ClipRecord make_clip(const std::string& id, Millis start = 0) {
  ClipRecord c;
  c.clip_id = id;
  c.video_id = "vid";
  c.start_ms = start;
  c.end_ms = start + 60'000;
  return c;
}

Manifest small_manifest() {
  Manifest m;
  VideoRecord v;
  v.video_id = "vid";
  v.duration_ms = 3'600'000;
  v.fps = 30;
  m.videos.push_back(v);

  for (int i = 0; i < 6; ++i) {
    auto c = make_clip(util::strformat("clip%02d", i), i * 60'000);
    c.location = Location{"JP", "Tokyo", ""};
    c.categories = CategoryLabels{"urban", "clear", "day", "sparse"};
    c.caption = "a walk through the market";
    c.scores = QualityScores{0.61, 0.72, 0.83};
    m.clips.push_back(c);
  }
  // One active clip with nothing annotated.
  m.clips.push_back(make_clip("clip06", 6 * 60'000));
  // Different country, different labels.
  auto fr = make_clip("clip07", 7 * 60'000);
  fr.location = Location{"FR", "Paris", ""};
  fr.categories = CategoryLabels{"park", "rain", "night", "dense"};
  fr.caption = "  two  tokens ";
  fr.scores = QualityScores{0.1, 0.1, 0.1};
  m.clips.push_back(fr);
  // Removed clips must not count anywhere.
  auto dead = make_clip("clip08", 8 * 60'000);
  dead.location = Location{"BR", "Recife", ""};
  dead.mark_removed(RemovalReason::kLuma);
  m.clips.push_back(dead);
  m.sort_canonical();
  return m;
}

}  // namespace

TEST_CASE("token_count counts maximal whitespace-separated runs") {
  CHECK(token_count("") == 0);
  CHECK(token_count("   ") == 0);
  CHECK(token_count("one") == 1);
  CHECK(token_count("two tokens") == 2);
  CHECK(token_count("  leading and   trailing  ") == 3);
  CHECK(token_count("tabs\tand\nnewlines too") == 4);
  CHECK(token_count("punct, still; one-token") == 3);
}

TEST_CASE("build_report recounts only active clips") {
  const auto manifest = small_manifest();
  std::vector<traj::TrajectorySummary> summaries;
  for (int i = 0; i < 3; ++i) {
    traj::TrajectorySummary s;
    s.clip_id = util::strformat("clip%02d", i);
    s.jitter = 0.01 * (i + 1);
    summaries.push_back(s);
  }

  const auto rep = build_report(manifest, summaries, ReportConfig{});
  CHECK(rep.active_clips == 8);
  CHECK(rep.total_duration_h == doctest::Approx(8 * 60.0 / 3600.0));

  // Countries sorted by code; the removed BR clip contributes nothing and the
  // unannotated clip lands under "??".
  REQUIRE(rep.countries.size() == 3);
  CHECK(rep.countries[0].country_code == "??");
  CHECK(rep.countries[0].clips == 1);
  CHECK(rep.countries[1].country_code == "FR");
  CHECK(rep.countries[1].clips == 1);
  CHECK(rep.countries[2].country_code == "JP");
  CHECK(rep.countries[2].clips == 6);
  CHECK(rep.countries[2].duration_ms == 6 * 60'000);

  // Every histogram's mass equals the active clip count.
  REQUIRE(rep.label_histograms.size() == 4);
  for (const auto& h : rep.label_histograms) {
    CHECK(h.total() == rep.active_clips);
  }
  CHECK(rep.quality.total() == rep.active_clips);
  CHECK(rep.caption_tokens.total() == rep.active_clips);
  CHECK(rep.jitter.total() == rep.active_clips);

  // Scene labels: 6 urban, 1 park, 1 unannotated.
  const auto& scene = rep.label_histograms[0];
  CHECK(scene.name == "scene");
  std::map<std::string, std::size_t> by_label;
  for (std::size_t i = 0; i < scene.bin_labels.size(); ++i) {
    by_label[scene.bin_labels[i]] = scene.counts[i];
  }
  CHECK(by_label.at("urban") == 6);
  CHECK(by_label.at("park") == 1);
  CHECK(by_label.at(std::string(kUnannotatedBucket)) == 1);

  // Quality mean of (0.61, 0.72, 0.83) is 0.72: the "0.70-0.75" bin.
  REQUIRE(rep.quality.bin_labels.size() == 21);  // 20 bins + unannotated
  CHECK(rep.quality.bin_labels[14] == "0.70-0.75");
  CHECK(rep.quality.counts[14] == 6);
  CHECK(rep.quality.bin_labels.back() == std::string(kUnannotatedBucket));
  CHECK(rep.quality.counts.back() == 1);

  // Captions: six 5-token captions and one 2-token caption share bin "0-19".
  CHECK(rep.caption_tokens.bin_labels[0] == "0-19");
  CHECK(rep.caption_tokens.counts[0] == 7);
  CHECK(rep.caption_tokens.counts.back() == 1);

  // Three clips carry jitter summaries; the rest are unannotated.
  CHECK(rep.jitter.counts.back() == 5);
  CHECK(rep.jitter_edges.size() <= 9);
}

TEST_CASE("build_report is permutation invariant and byte-stable") {
  auto manifest = small_manifest();
  std::vector<traj::TrajectorySummary> summaries;
  traj::TrajectorySummary s;
  s.clip_id = "clip01";
  s.jitter = 0.25;
  summaries.push_back(s);

  const auto text_a = report_to_json_string(build_report(manifest, summaries, {}));

  std::reverse(manifest.clips.begin(), manifest.clips.end());
  std::reverse(manifest.videos.begin(), manifest.videos.end());
  const auto text_b = report_to_json_string(build_report(manifest, summaries, {}));
  CHECK(text_a == text_b);
  CHECK(text_a.back() == '\n');
}

TEST_CASE("empty manifest still yields a well-formed report") {
  const auto rep = build_report(Manifest{}, {}, ReportConfig{});
  CHECK(rep.active_clips == 0);
  CHECK(rep.total_duration_h == 0.0);
  CHECK(rep.countries.empty());
  CHECK(rep.quality.total() == 0);
  CHECK(rep.caption_tokens.total() == 0);
  CHECK(rep.jitter.total() == 0);
  // Serialization of the empty report must not throw.
  CHECK(!report_to_json_string(rep).empty());
}

TEST_CASE("write_report emits report.json plus one TSV per histogram") {
  const testutil::TempDir dir("report");
  const auto manifest = small_manifest();
  const auto rep = build_report(manifest, {}, ReportConfig{});
  write_report(rep, dir.path());

  namespace fs = std::filesystem;
  CHECK(fs::exists(dir.path() / "report.json"));
  for (const char* name :
       {"scene", "weather", "time_of_day", "crowd_density", "quality",
        "caption_tokens", "jitter"}) {
    CHECK(fs::exists(dir.path() / (std::string("hist_") + name + ".tsv")));
  }

  const auto tsv = testutil::slurp(dir.path() / "hist_scene.tsv");
  CHECK(tsv.find("urban\t6\n") != std::string::npos);

  const auto parsed = nlohmann::json::parse(testutil::slurp(dir.path() / "report.json"));
  CHECK(parsed.at("active_clips") == 8);
  CHECK(parsed.at("label_histograms").at("scene").at("total") == 8);
}
