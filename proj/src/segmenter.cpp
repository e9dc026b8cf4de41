#include "curator/segmenter.hpp"

#include <algorithm>

#include "curator/util.hpp"

namespace curator::segment {

std::optional<Interval> head_tail_trim(const VideoRecord& video, Millis trim_ms) {
  if (video.source == SourceClass::kGame) {
    return Interval{0, video.duration_ms};
  }
  if (video.duration_ms <= 2 * trim_ms) {
    return std::nullopt;
  }
  return Interval{trim_ms, video.duration_ms - trim_ms};
}

std::vector<std::size_t> detect_boundaries(const TransitionSeries& series,
                                           double threshold) {
  std::vector<std::size_t> boundaries;
  bool in_run = false;
  for (std::size_t i = 0; i < series.probs.size(); ++i) {
    if (series.probs[i] >= threshold) {
      if (!in_run) {
        boundaries.push_back(i);
        in_run = true;
      }
    } else {
      in_run = false;
    }
  }
  return boundaries;
}

std::vector<ShotSegment> build_shots(const std::string& video_id, Interval usable,
                                     const std::vector<Millis>& boundaries_ms,
                                     double fps, Millis shot_trim_ms) {
  std::vector<Millis> edges;
  edges.reserve(boundaries_ms.size() + 2);
  edges.push_back(usable.start_ms);
  for (Millis b : boundaries_ms) {
    if (b > usable.start_ms && b < usable.end_ms) {
      edges.push_back(b);
    }
  }
  edges.push_back(usable.end_ms);

  std::vector<ShotSegment> shots;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const Millis start = grid_floor(edges[i] + shot_trim_ms, fps);
    const Millis end = grid_floor(edges[i + 1] - shot_trim_ms, fps);
    if (end > start) {
      shots.push_back({video_id, start, end});
    }
  }
  return shots;
}

std::string make_clip_id(const std::string& video_id, std::size_t index) {
  return video_id + util::strformat("_c%04zu", index);
}

std::vector<ClipRecord> extract_clips(const ShotSegment& shot, double fps,
                                      Millis clip_len_ms, std::size_t* clip_counter) {
  std::vector<ClipRecord> clips;
  const Millis origin = grid_floor(shot.start_ms, fps);
  for (Millis start = origin; start + clip_len_ms <= shot.end_ms;
       start += clip_len_ms) {
    ClipRecord clip;
    clip.clip_id = make_clip_id(shot.video_id, (*clip_counter)++);
    clip.video_id = shot.video_id;
    clip.start_ms = start;
    clip.end_ms = start + clip_len_ms;
    clips.push_back(std::move(clip));
  }
  return clips;
}

SegmentOutcome segment_video(const VideoRecord& video, const TransitionSeries& series,
                             const SegmenterConfig& cfg) {
  SegmentOutcome out;
  const auto usable = head_tail_trim(video, cfg.head_tail_trim_ms);
  if (!usable) {
    out.video_rejected = true;
    out.reject_reason = util::strformat(
        "video shorter than twice the %lld ms head/tail trim",
        static_cast<long long>(cfg.head_tail_trim_ms));
    return out;
  }

  const auto boundary_frames = detect_boundaries(series, cfg.boundary_threshold);
  std::vector<Millis> boundaries_ms;
  boundaries_ms.reserve(boundary_frames.size());
  for (std::size_t frame : boundary_frames) {
    boundaries_ms.push_back(frame_time_ms(static_cast<std::int64_t>(frame), video.fps));
  }

  out.shots = build_shots(video.video_id, *usable, boundaries_ms, video.fps,
                          cfg.shot_trim_ms);
  std::size_t counter = 1;
  for (const ShotSegment& shot : out.shots) {
    auto clips = extract_clips(shot, video.fps, cfg.clip_len_ms, &counter);
    std::move(clips.begin(), clips.end(), std::back_inserter(out.clips));
  }
  return out;
}

}  // namespace curator::segment
