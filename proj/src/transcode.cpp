#include "curator/transcode.hpp"

#include <algorithm>

#include <json.hpp>

#include "curator/time.hpp"

namespace curator::transcode {

std::vector<TranscodeJob> emit_transcode_plan(const Manifest& manifest) {
  const VideoIndex index = make_video_index(manifest);
  std::vector<TranscodeJob> jobs;
  for (const ClipRecord& clip : manifest.clips) {
    if (!clip.active()) {
      continue;
    }
    TranscodeJob job;
    job.clip_id = clip.clip_id;
    job.video_id = clip.video_id;
    job.start_ms = clip.start_ms;
    job.end_ms = clip.end_ms;
    if (const auto it = index.find(clip.video_id); it != index.end()) {
      const VideoRecord& video = manifest.videos[it->second];
      job.mux_audio = video.source == SourceClass::kReal &&
                      video.view == ViewKind::kWalking;
    }
    jobs.push_back(std::move(job));
  }
  std::sort(jobs.begin(), jobs.end(), [](const TranscodeJob& a, const TranscodeJob& b) {
    return a.clip_id < b.clip_id;
  });
  return jobs;
}

std::string plan_to_string(const std::vector<TranscodeJob>& jobs) {
  std::string out;
  for (const TranscodeJob& job : jobs) {
    const nlohmann::json j = {
        {"clip_id", job.clip_id},
        {"video_id", job.video_id},
        {"start_s", seconds_from_millis(job.start_ms)},
        {"end_s", seconds_from_millis(job.end_ms)},
        {"target",
         {{"height", job.target_height},
          {"fps", job.target_fps},
          {"codec", job.video_codec},
          {"video_bitrate_kbps", job.video_bitrate_kbps}}},
        {"audio",
         {{"mux", job.mux_audio},
          {"sample_rate_hz", job.audio_sample_rate_hz},
          {"codec", job.audio_codec}}},
    };
    out += j.dump();
    out += '\n';
  }
  return out;
}

}  // namespace curator::transcode
