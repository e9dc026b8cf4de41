#pragma once

#include <optional>
#include <string>
#include <vector>

#include "curator/manifest.hpp"
#include "curator/time.hpp"

namespace curator::loc {

// Static interval tree over a video's chapters, keyed by [start, end) in
// milliseconds. Built once per video, then queried read-only from any thread.
// Implemented as a binary search over chapters sorted by start, augmented with
// subtree maximum end times, so stabbing queries stay correct even if a caller
// feeds overlapping intervals.
class ChapterIndex {
 public:
  ChapterIndex() = default;
  explicit ChapterIndex(std::vector<Chapter> chapters);

  // All chapters whose [start, end) contains t.
  std::vector<const Chapter*> stab(Millis t) const;

  // All chapters fully containing [start, end).
  std::vector<const Chapter*> containing(Millis start, Millis end) const;

  std::size_t size() const { return chapters_.size(); }

 private:
  void collect(std::size_t lo, std::size_t hi, Millis t,
               std::vector<const Chapter*>& out) const;

  std::vector<Chapter> chapters_;    // sorted by start
  std::vector<Millis> subtree_max_;  // max end over the midpoint subtree
};

ChapterIndex build_index(const VideoRecord& video);

// The chapter's Location iff exactly one chapter fully contains the clip
// interval; nullopt = discard as location-ambiguous.
std::optional<Location> match_clip(const ChapterIndex& index, Millis start_ms,
                                   Millis end_ms);

// Chapter ingest text format: one chapter per line,
//   HH:MM:SS[.mmm]-HH:MM:SS[.mmm]|CC|City[|Place]
// Blank lines and lines starting with '#' are ignored.
struct ChapterParseResult {
  std::vector<Chapter> chapters;
  std::vector<Diagnostic> diagnostics;
};

ChapterParseResult parse_chapter_lines(std::string_view text);
std::string format_chapter_lines(const std::vector<Chapter>& chapters);

std::optional<Millis> parse_timestamp_ms(std::string_view text);
std::string format_timestamp_ms(Millis t);

}  // namespace curator::loc
