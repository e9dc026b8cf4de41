#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curator/time.hpp"
#include "curator/trajectory.hpp"

namespace curator::filters {

struct FilterConfig {
  // Luminance: fail on a run of strictly more than luma_run_len consecutive
  // frames that are all darker than luma_low or all brighter than luma_high.
  double luma_low = 16;
  double luma_high = 235;
  int luma_run_len = 15;

  double quality_drop_frac = 0.10;

  // Subtitle events in the bottom region visible strictly longer than this.
  double subtitle_min_visible_s = 0.75;
  double subtitle_region_frac = 1.0 / 3.0;

  // Trajectory anomaly rules.
  double reversal_angle_deg = 150;
  double reversal_window_s = 10;
  int reversal_min_count = 2;
  double viewpoint_shift_deg = 60;
  double displacement_factor = 5;
  int displacement_window_frames = 30;
};

struct LumaSeries {
  std::string clip_id;
  std::vector<double> values;  // per-frame mean luma, [0, 255]
};

struct SubtitleEvent {
  double y_center_frac = 0;  // 0 = top of frame, 1 = bottom
  Millis start_ms = 0;
  Millis end_ms = 0;
};

struct SubtitleDetection {
  std::string clip_id;
  std::vector<SubtitleEvent> events;
};

// true = pass (keep the clip).
bool luminance_filter(const LumaSeries& series, const FilterConfig& cfg);

// true = pass; false = flagged for removal.
bool subtitle_filter(const SubtitleDetection& det, const FilterConfig& cfg);

struct ClipScore {
  std::string clip_id;
  double technical = 0;
};

// Ids of the floor(drop_frac * N) lowest-scoring clips; ties broken by
// lexicographically smaller clip_id first. Input order does not matter.
std::vector<std::string> quality_percentile_removals(std::vector<ClipScore> scored,
                                                     double drop_frac);

enum class TrajectoryRule { kReversal, kViewpoint, kDisplacement };
std::string_view to_string(TrajectoryRule rule);

struct TrajectoryVerdict {
  bool pass = true;
  std::optional<TrajectoryRule> failed_rule;
  bool insufficient_frames = false;  // pass-with-warning case
};

// Applies the three anomaly rules in fixed order (reversal, viewpoint,
// displacement) and reports the first failure. Trajectories shorter than the
// displacement window pass with insufficient_frames set.
TrajectoryVerdict trajectory_filter(const traj::CameraTrajectory& trajectory,
                                    const FilterConfig& cfg);

}  // namespace curator::filters
