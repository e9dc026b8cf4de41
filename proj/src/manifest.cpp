#include "curator/manifest.hpp"

#include <algorithm>

#include "curator/util.hpp"

namespace curator {

std::string_view to_string(SourceClass s) {
  return s == SourceClass::kReal ? "real" : "game";
}

std::string_view to_string(ViewKind v) {
  return v == ViewKind::kWalking ? "walking" : "drone";
}

std::optional<SourceClass> source_from_string(std::string_view s) {
  if (s == "real") return SourceClass::kReal;
  if (s == "game") return SourceClass::kGame;
  return std::nullopt;
}

std::optional<ViewKind> view_from_string(std::string_view s) {
  if (s == "walking") return ViewKind::kWalking;
  if (s == "drone") return ViewKind::kDrone;
  return std::nullopt;
}

bool valid_country_code(std::string_view code) {
  return code.size() == 2 && code[0] >= 'A' && code[0] <= 'Z' && code[1] >= 'A' &&
         code[1] <= 'Z';
}

std::string_view to_string(RemovalReason r) {
  switch (r) {
    case RemovalReason::kLuma: return "luma";
    case RemovalReason::kQuality: return "quality";
    case RemovalReason::kSubtitle: return "subtitle";
    case RemovalReason::kTrajectory: return "trajectory";
    case RemovalReason::kLocationAmbiguous: return "location_ambiguous";
    case RemovalReason::kDedup: return "dedup";
    case RemovalReason::kSampler: return "sampler";
  }
  return "unknown";
}

std::optional<RemovalReason> removal_reason_from_string(std::string_view s) {
  if (s == "luma") return RemovalReason::kLuma;
  if (s == "quality") return RemovalReason::kQuality;
  if (s == "subtitle") return RemovalReason::kSubtitle;
  if (s == "trajectory") return RemovalReason::kTrajectory;
  if (s == "location_ambiguous") return RemovalReason::kLocationAmbiguous;
  if (s == "dedup") return RemovalReason::kDedup;
  if (s == "sampler") return RemovalReason::kSampler;
  return std::nullopt;
}

const std::string& CategoryLabels::dimension(std::size_t i) const {
  switch (i) {
    case 0: return scene;
    case 1: return weather;
    case 2: return time_of_day;
    default: return crowd_density;
  }
}

std::string& CategoryLabels::dimension(std::size_t i) {
  switch (i) {
    case 0: return scene;
    case 1: return weather;
    case 2: return time_of_day;
    default: return crowd_density;
  }
}

LabelVocabulary LabelVocabulary::defaults() {
  LabelVocabulary v;
  v.scene = {"urban", "suburban", "natural", "indoor"};
  v.weather = {"sunny", "cloudy", "rainy", "snowy"};
  v.time_of_day = {"day", "night", "dawn", "dusk"};
  v.crowd_density = {"empty", "sparse", "moderate", "crowded", "packed"};
  return v;
}

const std::vector<std::string>& LabelVocabulary::dimension(std::size_t i) const {
  switch (i) {
    case 0: return scene;
    case 1: return weather;
    case 2: return time_of_day;
    default: return crowd_density;
  }
}

bool LabelVocabulary::valid(std::size_t dimension_index, std::string_view label) const {
  if (label == kAbstainLabel) {
    return true;
  }
  const auto& vocab = dimension(dimension_index);
  return std::find(vocab.begin(), vocab.end(), label) != vocab.end();
}

void Manifest::sort_canonical() {
  std::sort(videos.begin(), videos.end(),
            [](const VideoRecord& a, const VideoRecord& b) {
              return a.video_id < b.video_id;
            });
  std::sort(clips.begin(), clips.end(), [](const ClipRecord& a, const ClipRecord& b) {
    return a.clip_id < b.clip_id;
  });
}

std::size_t Manifest::active_clip_count() const {
  std::size_t n = 0;
  for (const auto& c : clips) {
    n += c.active() ? 1 : 0;
  }
  return n;
}

VideoIndex make_video_index(const Manifest& m) {
  VideoIndex index;
  index.reserve(m.videos.size());
  for (std::size_t i = 0; i < m.videos.size(); ++i) {
    index.emplace(m.videos[i].video_id, i);
  }
  return index;
}

std::vector<std::string> check_video(const VideoRecord& v) {
  std::vector<std::string> problems;
  if (v.video_id.empty()) {
    problems.push_back("video_id is empty");
  }
  if (v.duration_ms < 0) {
    problems.push_back("duration_s is negative");
  }
  if (!(v.fps > 0)) {
    problems.push_back("fps must be > 0");
  }
  for (std::size_t i = 0; i < v.chapters.size(); ++i) {
    const Chapter& ch = v.chapters[i];
    if (ch.start_ms >= ch.end_ms) {
      problems.push_back(util::strformat("chapter %zu has start >= end", i));
    }
    if (ch.start_ms < 0 || ch.end_ms > v.duration_ms) {
      problems.push_back(
          util::strformat("chapter %zu lies outside [0, duration]", i));
    }
    if (!valid_country_code(ch.location.country_code)) {
      problems.push_back(util::strformat("chapter %zu has invalid country code '%s'",
                                         i, ch.location.country_code.c_str()));
    }
    if (i > 0) {
      const Chapter& prev = v.chapters[i - 1];
      if (ch.start_ms < prev.start_ms) {
        problems.push_back(
            util::strformat("chapters %zu and %zu are not sorted by start", i - 1, i));
      } else if (ch.start_ms < prev.end_ms) {
        problems.push_back(util::strformat(
            "chapters overlap: [%lld, %lld) and [%lld, %lld)",
            static_cast<long long>(prev.start_ms), static_cast<long long>(prev.end_ms),
            static_cast<long long>(ch.start_ms), static_cast<long long>(ch.end_ms)));
      }
    }
  }
  return problems;
}

std::vector<std::string> check_clip(const ClipRecord& c, const VideoRecord* parent,
                                    Millis clip_len_ms) {
  std::vector<std::string> problems;
  if (c.clip_id.empty()) {
    problems.push_back("clip_id is empty");
  }
  if (c.video_id.empty()) {
    problems.push_back("video_id is empty");
  }
  if (c.start_ms >= c.end_ms) {
    problems.push_back("clip interval is empty or reversed");
  }
  if (c.scores) {
    for (double s : {c.scores->technical, c.scores->aesthetic, c.scores->semantic}) {
      if (!(s >= 0.0 && s <= 1.0)) {
        problems.push_back("quality score outside [0, 1]");
        break;
      }
    }
  }
  if (c.location && !valid_country_code(c.location->country_code)) {
    problems.push_back(util::strformat("invalid country code '%s'",
                                       c.location->country_code.c_str()));
  }
  if (parent == nullptr) {
    problems.push_back("clip has no parent video record");
  } else {
    if (c.start_ms < 0 || c.end_ms > parent->duration_ms) {
      problems.push_back("clip interval lies outside parent video duration");
    }
    if (parent->source == SourceClass::kReal &&
        c.end_ms - c.start_ms != clip_len_ms) {
      problems.push_back(util::strformat(
          "real-source clip duration is %lld ms, expected exactly %lld ms",
          static_cast<long long>(c.end_ms - c.start_ms),
          static_cast<long long>(clip_len_ms)));
    }
  }
  return problems;
}

}  // namespace curator
