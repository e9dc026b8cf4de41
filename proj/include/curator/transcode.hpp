#pragma once

#include <string>
#include <vector>

#include "curator/manifest.hpp"

namespace curator::transcode {

// Work order for the external transcoder: 720p / 30 fps / H.265 at 4 Mbps,
// with 48 kHz AAC audio muxed only for clips cut from real walking footage.
struct TranscodeJob {
  std::string clip_id;
  std::string video_id;
  Millis start_ms = 0;
  Millis end_ms = 0;
  bool mux_audio = false;
  int target_height = 720;
  int target_fps = 30;
  std::string video_codec = "h265";
  int video_bitrate_kbps = 4000;
  int audio_sample_rate_hz = 48'000;
  std::string audio_codec = "aac";
};

// One job per active clip, ordered by clip_id. Removed clips produce nothing.
std::vector<TranscodeJob> emit_transcode_plan(const Manifest& manifest);

// JSON Lines, one job per line (documented in docs/FORMATS.md).
std::string plan_to_string(const std::vector<TranscodeJob>& jobs);

}  // namespace curator::transcode
