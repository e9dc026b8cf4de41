#include "curator/filters.hpp"

#include <algorithm>
#include <cmath>

namespace curator::filters {

bool luminance_filter(const LumaSeries& series, const FilterConfig& cfg) {
  int dark_run = 0;
  int bright_run = 0;
  for (double v : series.values) {
    dark_run = v < cfg.luma_low ? dark_run + 1 : 0;
    bright_run = v > cfg.luma_high ? bright_run + 1 : 0;
    if (dark_run > cfg.luma_run_len || bright_run > cfg.luma_run_len) {
      return false;
    }
  }
  return true;
}

bool subtitle_filter(const SubtitleDetection& det, const FilterConfig& cfg) {
  for (const SubtitleEvent& e : det.events) {
    const bool in_bottom_region = e.y_center_frac > 1.0 - cfg.subtitle_region_frac;
    const double visible_s = seconds_from_millis(e.end_ms - e.start_ms);
    if (in_bottom_region && visible_s > cfg.subtitle_min_visible_s) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> quality_percentile_removals(std::vector<ClipScore> scored,
                                                     double drop_frac) {
  const std::size_t drop = static_cast<std::size_t>(
      std::floor(drop_frac * static_cast<double>(scored.size())));
  std::sort(scored.begin(), scored.end(), [](const ClipScore& a, const ClipScore& b) {
    if (a.technical != b.technical) {
      return a.technical < b.technical;
    }
    return a.clip_id < b.clip_id;
  });
  std::vector<std::string> removed;
  removed.reserve(drop);
  for (std::size_t i = 0; i < drop; ++i) {
    removed.push_back(std::move(scored[i].clip_id));
  }
  return removed;
}

std::string_view to_string(TrajectoryRule rule) {
  switch (rule) {
    case TrajectoryRule::kReversal: return "reversal";
    case TrajectoryRule::kViewpoint: return "viewpoint";
    case TrajectoryRule::kDisplacement: return "displacement";
  }
  return "unknown";
}

namespace {

// Rule 1: at least reversal_min_count direction changes exceeding the angle
// threshold within some reversal_window_s span. A change event is anchored at
// its middle frame's timestamp.
bool has_reversal_cluster(const traj::CameraTrajectory& t, const FilterConfig& cfg) {
  std::vector<double> event_times;
  for (std::size_t i = 1; i + 1 < t.frames.size(); ++i) {
    const auto angle = traj::direction_change(t, i);
    if (angle && *angle > cfg.reversal_angle_deg) {
      event_times.push_back(t.frames[i].t_s);
    }
  }
  const std::size_t m = static_cast<std::size_t>(cfg.reversal_min_count);
  if (m == 0) {
    return true;
  }
  if (event_times.size() < m) {
    return false;
  }
  for (std::size_t i = 0; i + m - 1 < event_times.size(); ++i) {
    if (event_times[i + m - 1] - event_times[i] <= cfg.reversal_window_s) {
      return true;
    }
  }
  return false;
}

// Rule 2: a viewpoint shift above the threshold between consecutive frames.
bool has_viewpoint_jump(const traj::CameraTrajectory& t, const FilterConfig& cfg) {
  for (std::size_t i = 0; i + 1 < t.frames.size(); ++i) {
    if (traj::viewpoint_shift(t.frames[i].orientation, t.frames[i + 1].orientation) >
        cfg.viewpoint_shift_deg) {
      return true;
    }
  }
  return false;
}

// Rule 3: a consecutive-frame displacement above displacement_factor times
// the mean displacement over the window-frame span containing the pair. The
// window is centered on the pair and clamped at the clip edges.
bool has_displacement_spike(const traj::CameraTrajectory& t, const FilterConfig& cfg) {
  const std::size_t n = t.frames.size();
  const std::size_t window = static_cast<std::size_t>(cfg.displacement_window_frames);
  if (n < window || window < 2) {
    return false;
  }
  std::vector<double> step(n - 1);
  std::vector<double> prefix(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    step[i] = (t.frames[i + 1].position - t.frames[i].position).norm();
    prefix[i + 1] = prefix[i] + step[i];
  }
  const std::size_t steps_per_window = window - 1;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    // First frame of the window holding the pair (i, i+1).
    std::size_t begin = i >= (window - 2) / 2 ? i - (window - 2) / 2 : 0;
    begin = std::min(begin, n - window);
    const double mean =
        (prefix[begin + steps_per_window] - prefix[begin]) / steps_per_window;
    if (step[i] > cfg.displacement_factor * mean) {
      return true;
    }
  }
  return false;
}

}  // namespace

TrajectoryVerdict trajectory_filter(const traj::CameraTrajectory& trajectory,
                                    const FilterConfig& cfg) {
  TrajectoryVerdict verdict;
  if (trajectory.frames.size() <
      static_cast<std::size_t>(cfg.displacement_window_frames)) {
    verdict.insufficient_frames = true;
    return verdict;
  }
  if (has_reversal_cluster(trajectory, cfg)) {
    verdict.pass = false;
    verdict.failed_rule = TrajectoryRule::kReversal;
    return verdict;
  }
  if (has_viewpoint_jump(trajectory, cfg)) {
    verdict.pass = false;
    verdict.failed_rule = TrajectoryRule::kViewpoint;
    return verdict;
  }
  if (has_displacement_spike(trajectory, cfg)) {
    verdict.pass = false;
    verdict.failed_rule = TrajectoryRule::kDisplacement;
    return verdict;
  }
  return verdict;
}

}  // namespace curator::filters
