#pragma once

#include <array>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "curator/time.hpp"

namespace curator {

enum class SourceClass { kReal, kGame };
enum class ViewKind { kWalking, kDrone };

std::string_view to_string(SourceClass s);
std::string_view to_string(ViewKind v);
std::optional<SourceClass> source_from_string(std::string_view s);
std::optional<ViewKind> view_from_string(std::string_view s);

struct Location {
  std::string country_code;  // ISO 3166 alpha-2, [A-Z]{2}
  std::string city;
  std::string place;  // optional, empty = none

  // Grouping key for per-city operations; cities with equal names in
  // different countries stay distinct.
  std::string city_key() const { return country_code + "/" + city; }

  bool operator==(const Location&) const = default;
};

bool valid_country_code(std::string_view code);

struct Chapter {
  Millis start_ms = 0;
  Millis end_ms = 0;
  Location location;

  bool operator==(const Chapter&) const = default;
};

// Closed set of reasons a clip can be dropped. A clip's first removal reason
// is final; later attempts to remove it again are ignored.
enum class RemovalReason {
  kLuma,
  kQuality,
  kSubtitle,
  kTrajectory,
  kLocationAmbiguous,
  kDedup,
  kSampler,
};

std::string_view to_string(RemovalReason r);
std::optional<RemovalReason> removal_reason_from_string(std::string_view s);

struct QualityScores {
  double technical = 0;
  double aesthetic = 0;
  double semantic = 0;
};

inline constexpr std::array<std::string_view, 4> kCategoryDimensions = {
    "scene", "weather", "time_of_day", "crowd_density"};

inline constexpr std::string_view kAbstainLabel = "abstain";

struct CategoryLabels {
  std::string scene;
  std::string weather;
  std::string time_of_day;
  std::string crowd_density;

  const std::string& dimension(std::size_t i) const;
  std::string& dimension(std::size_t i);
};

// Per-dimension closed label sets. "abstain" is always accepted in addition.
struct LabelVocabulary {
  std::vector<std::string> scene;
  std::vector<std::string> weather;
  std::vector<std::string> time_of_day;
  std::vector<std::string> crowd_density;

  static LabelVocabulary defaults();
  const std::vector<std::string>& dimension(std::size_t i) const;
  bool valid(std::size_t dimension_index, std::string_view label) const;
};

struct VideoRecord {
  std::string video_id;
  SourceClass source = SourceClass::kReal;
  ViewKind view = ViewKind::kWalking;
  Millis duration_ms = 0;
  double fps = 0;
  int width = 0;
  int height = 0;
  std::string title;
  std::string description;
  std::vector<Chapter> chapters;  // non-overlapping, sorted, inside [0, duration]
};

struct ClipRecord {
  std::string clip_id;
  std::string video_id;
  Millis start_ms = 0;
  Millis end_ms = 0;
  std::optional<RemovalReason> removed;  // empty = active
  std::optional<Location> location;
  std::optional<CategoryLabels> categories;
  std::optional<std::string> caption;
  std::optional<QualityScores> scores;
  std::string trajectory_ref;  // workspace-relative artifact path, empty = none
  std::string embedding_ref;

  bool active() const { return !removed.has_value(); }

  // First reason wins; removal is never overwritten.
  void mark_removed(RemovalReason reason) {
    if (!removed) {
      removed = reason;
    }
  }

  Millis duration_ms() const { return end_ms - start_ms; }
};

struct Diagnostic {
  std::size_t line = 0;  // 1-based manifest line, 0 when not file-bound
  std::string record_id;
  std::string message;
};

struct Manifest {
  std::vector<VideoRecord> videos;
  std::vector<ClipRecord> clips;

  // Canonical order: videos sorted by video_id, clips sorted by clip_id.
  void sort_canonical();

  std::size_t active_clip_count() const;
};

// video_id -> index into manifest.videos.
using VideoIndex = std::unordered_map<std::string, std::size_t>;
VideoIndex make_video_index(const Manifest& m);

// Structural checks for a single record (field-level invariants).
std::vector<std::string> check_video(const VideoRecord& v);
// Clip checks. Containment and the exact 60 s rule need the parent video;
// a null parent is itself reported as a problem.
std::vector<std::string> check_clip(const ClipRecord& c, const VideoRecord* parent,
                                    Millis clip_len_ms = 60'000);

}  // namespace curator
