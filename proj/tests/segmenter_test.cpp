#include <doctest.h>

#include <algorithm>

#include "curator/segmenter.hpp"
#include "curator/util.hpp"

using namespace curator;
using namespace curator::segment;

namespace {

VideoRecord make_video(SourceClass source, Millis duration_ms, double fps = 30) {
  VideoRecord v;
  v.video_id = "vid";
  v.source = source;
  v.duration_ms = duration_ms;
  v.fps = fps;
  v.width = 1280;
  v.height = 720;
  return v;
}

}  // namespace

TEST_CASE("head_tail_trim applies to real videos only") {
  const SegmenterConfig cfg;
  const auto real = head_tail_trim(make_video(SourceClass::kReal, 600'000), cfg.head_tail_trim_ms);
  REQUIRE(real.has_value());
  CHECK(real->start_ms == 120'000);
  CHECK(real->end_ms == 480'000);

  const auto game = head_tail_trim(make_video(SourceClass::kGame, 600'000), cfg.head_tail_trim_ms);
  REQUIRE(game.has_value());
  CHECK(game->start_ms == 0);
  CHECK(game->end_ms == 600'000);

  // Exactly twice the trim leaves nothing.
  CHECK(!head_tail_trim(make_video(SourceClass::kReal, 240'000), cfg.head_tail_trim_ms));
  CHECK(!head_tail_trim(make_video(SourceClass::kReal, 200'000), cfg.head_tail_trim_ms));
}

TEST_CASE("detect_boundaries collapses runs to their first frame") {
  TransitionSeries s;
  s.fps = 30;
  s.probs = {0.1, 0.5, 0.9, 0.3, 0.41, 0.2, 0.4, 0.4, 0.1};
  const auto b = detect_boundaries(s, 0.4);
  CHECK(b == std::vector<std::size_t>{1, 4, 6});

  // Threshold is inclusive.
  s.probs = {0.4};
  CHECK(detect_boundaries(s, 0.4) == std::vector<std::size_t>{0});
  s.probs = {0.39999};
  CHECK(detect_boundaries(s, 0.4).empty());
}

TEST_CASE("detect_boundaries matches a brute-force run finder") {
  // Note the run *count* is not monotone in the threshold: raising it can
  // split one long run into several shorter ones. What is monotone is the
  // set of qualifying frames, so check that alongside the oracle.
  util::Rng rng(11);
  TransitionSeries s;
  s.fps = 30;
  for (int i = 0; i < 2000; ++i) {
    s.probs.push_back(rng.next_double());
  }
  std::size_t previous_qualifying = s.probs.size() + 1;
  for (double t : {0.0, 0.2, 0.4, 0.6, 0.8, 1.01}) {
    std::vector<std::size_t> expected;
    std::size_t qualifying = 0;
    for (std::size_t i = 0; i < s.probs.size(); ++i) {
      if (s.probs[i] < t) {
        continue;
      }
      ++qualifying;
      if (i == 0 || s.probs[i - 1] < t) {
        expected.push_back(i);
      }
    }
    CHECK(detect_boundaries(s, t) == expected);
    CHECK(qualifying <= previous_qualifying);
    previous_qualifying = qualifying;
  }
  CHECK(previous_qualifying == 0);  // nothing exceeds 1.0
}

TEST_CASE("build_shots trims and drops empty pieces") {
  // Usable [10s, 100s), boundary at 50s, trim 5s.
  const auto shots =
      build_shots("vid", {10'000, 100'000}, {50'000}, 30, 5'000);
  REQUIRE(shots.size() == 2);
  CHECK(shots[0].start_ms == 15'000);
  CHECK(shots[0].end_ms == 45'000);
  CHECK(shots[1].start_ms == 55'000);
  CHECK(shots[1].end_ms == 95'000);

  // Boundaries outside the usable window are ignored.
  const auto clipped =
      build_shots("vid", {10'000, 100'000}, {5'000, 10'000, 100'000, 200'000}, 30, 5'000);
  REQUIRE(clipped.size() == 1);
  CHECK(clipped[0].start_ms == 15'000);

  // A piece fully consumed by trimming disappears.
  const auto tiny = build_shots("vid", {0, 9'000}, {}, 30, 5'000);
  CHECK(tiny.empty());
}

TEST_CASE("shot endpoints land on the frame grid") {
  // At 29.97-style fps the +5s offsets are off-grid and must be floored.
  const double fps = 30000.0 / 1001.0;
  const auto shots = build_shots("vid", {10'000, 100'000}, {}, fps, 5'000);
  REQUIRE(shots.size() == 1);
  CHECK(shots[0].start_ms == grid_floor(shots[0].start_ms, fps));
  CHECK(shots[0].end_ms == grid_floor(shots[0].end_ms, fps));
  CHECK(shots[0].start_ms <= 15'000);
  CHECK(shots[0].end_ms <= 95'000);
}

TEST_CASE("extract_clips tiles the shot prefix with the worked example") {
  // A 190 s shot yields exactly 3 one-minute clips and a 10 s remainder.
  std::size_t counter = 1;
  const ShotSegment shot{"vid", 0, 190'000};
  const auto clips = extract_clips(shot, 30, 60'000, &counter);
  REQUIRE(clips.size() == 3);
  CHECK(clips[0].start_ms == 0);
  CHECK(clips[0].end_ms == 60'000);
  CHECK(clips[2].start_ms == 120'000);
  CHECK(clips[2].end_ms == 180'000);
  CHECK(clips[0].clip_id == "vid_c0001");
  CHECK(clips[2].clip_id == "vid_c0003");
  CHECK(counter == 4);

  // 59.999 s shot: no clip fits.
  std::size_t c2 = 1;
  CHECK(extract_clips({"vid", 0, 59'999}, 30, 60'000, &c2).empty());
  // Exactly 60 s fits.
  CHECK(extract_clips({"vid", 0, 60'000}, 30, 60'000, &c2).size() == 1);
}

TEST_CASE("segment_video end to end with oracle tiling") {
  // Real video, 600 s at 2 fps; spikes at 300 s and 302 s (one run? no: a gap
  // below threshold between them makes two boundaries 2 s apart).
  VideoRecord video = make_video(SourceClass::kReal, 600'000, 2);
  TransitionSeries series;
  series.video_id = "vid";
  series.fps = 2;
  series.probs.assign(1200, 0.05);
  series.probs[600] = 0.95;  // t = 300 s
  series.probs[601] = 0.95;  // same run
  series.probs[700] = 0.50;  // t = 350 s
  series.probs[30] = 0.9;    // inside the head trim; must not matter

  const SegmenterConfig cfg;
  const auto outcome = segment_video(video, series, cfg);
  REQUIRE(!outcome.video_rejected);
  // Pieces: [120,300), [300,350), [350,480) -> shots [125,295), [305,345),
  // [355,475) -> 2 + 0 + 2 clips.
  REQUIRE(outcome.shots.size() == 3);
  CHECK(outcome.clips.size() == 4);

  // Oracle checks: clips tile shot prefixes without gap or overlap, and the
  // remainder is always shorter than one clip.
  for (const auto& shot : outcome.shots) {
    std::vector<const ClipRecord*> in_shot;
    for (const auto& clip : outcome.clips) {
      if (clip.start_ms >= shot.start_ms && clip.end_ms <= shot.end_ms) {
        in_shot.push_back(&clip);
      }
    }
    Millis cursor = shot.start_ms;
    for (const auto* clip : in_shot) {
      CHECK(clip->start_ms == cursor);
      CHECK(clip->end_ms - clip->start_ms == cfg.clip_len_ms);
      cursor = clip->end_ms;
    }
    CHECK(shot.end_ms - cursor < cfg.clip_len_ms);
  }

  // Clip ids are unique and ordered.
  std::vector<std::string> ids;
  for (const auto& clip : outcome.clips) {
    ids.push_back(clip.clip_id);
  }
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(std::adjacent_find(ids.begin(), ids.end()) == ids.end());
}

TEST_CASE("segment_video rejects too-short real videos") {
  VideoRecord video = make_video(SourceClass::kReal, 200'000);
  TransitionSeries series;
  series.video_id = "vid";
  series.fps = 30;
  series.probs.assign(6000, 0.0);
  const auto outcome = segment_video(video, series, SegmenterConfig{});
  CHECK(outcome.video_rejected);
  CHECK(!outcome.reject_reason.empty());
  CHECK(outcome.clips.empty());
}

TEST_CASE("grid_floor basics") {
  CHECK(grid_floor(15'000, 30) == 15'000);   // on grid stays put
  CHECK(grid_floor(15'001, 30) <= 15'001);
  CHECK(grid_floor(0, 30) == 0);
  // Result is itself on the grid (idempotent).
  for (Millis t : {1'234, 99'999, 100'000}) {
    const Millis g = grid_floor(t, 30000.0 / 1001.0);
    CHECK(grid_floor(g, 30000.0 / 1001.0) == g);
    CHECK(g <= t);
  }
}
