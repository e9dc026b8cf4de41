#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curator/manifest.hpp"
#include "curator/time.hpp"

namespace curator::segment {

struct SegmenterConfig {
  double boundary_threshold = 0.4;
  Millis head_tail_trim_ms = 120'000;  // real-source videos only
  Millis shot_trim_ms = 5'000;
  Millis clip_len_ms = 60'000;
};

// Per-frame shot-transition probabilities for one video.
struct TransitionSeries {
  std::string video_id;
  double fps = 0;
  std::vector<double> probs;  // each in [0, 1]
};

struct ShotSegment {
  std::string video_id;
  Millis start_ms = 0;
  Millis end_ms = 0;
};

// Usable interval after removing the head/tail trim. Real-source videos must
// be longer than twice the trim; game captures are used in full.
std::optional<Interval> head_tail_trim(const VideoRecord& video, Millis trim_ms);

// One boundary per maximal run of consecutive frames with prob >= threshold,
// placed at the run's first frame. The set of qualifying frames shrinks as
// the threshold rises, but the boundary count need not: a higher threshold
// can split one run into several.
std::vector<std::size_t> detect_boundaries(const TransitionSeries& series,
                                           double threshold);

// Cuts `usable` at the boundary times, trims shot_trim from both ends of each
// piece, drops empty results. Shot endpoints land on the frame grid.
std::vector<ShotSegment> build_shots(const std::string& video_id, Interval usable,
                                     const std::vector<Millis>& boundaries_ms,
                                     double fps, Millis shot_trim_ms);

// Tiles the shot prefix with consecutive fixed-length clips; the trailing
// remainder shorter than clip_len is discarded. Clip ids continue from
// *clip_counter which is advanced per emitted clip.
std::vector<ClipRecord> extract_clips(const ShotSegment& shot, double fps,
                                      Millis clip_len_ms, std::size_t* clip_counter);

struct SegmentOutcome {
  std::vector<ShotSegment> shots;
  std::vector<ClipRecord> clips;
  bool video_rejected = false;
  std::string reject_reason;
};

// Full per-video pipeline: trim, boundary detection, shot construction, clip
// extraction. Pure; safe to run per video in parallel.
SegmentOutcome segment_video(const VideoRecord& video, const TransitionSeries& series,
                             const SegmenterConfig& cfg);

std::string make_clip_id(const std::string& video_id, std::size_t index);

}  // namespace curator::segment
