#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <json.hpp>

#include "curator/filters.hpp"
#include "curator/manifest.hpp"
#include "curator/segmenter.hpp"
#include "curator/trajectory.hpp"

namespace curator::providers {

// Annotation kinds served by external models. `transition` and `chapters` are
// keyed by video id; all others by clip id.
enum class Kind {
  kTransition,
  kLuma,
  kSubtitle,
  kQuality,
  kEmbedding,
  kPose,
  kCategory,
  kCaption,
  kChapters,
};

inline constexpr std::size_t kKindCount = 9;

std::string_view to_string(Kind kind);
std::optional<Kind> kind_from_string(std::string_view s);

class ProviderError : public std::runtime_error {
 public:
  ProviderError(Kind kind, std::string ref, const std::string& what)
      : std::runtime_error("provider " + std::string(to_string(kind)) + "/" + ref +
                           ": " + what),
        kind(kind),
        ref(std::move(ref)) {}

  Kind kind;
  std::string ref;
};

// Raw payload source. Implementations must be safe for concurrent fetch()
// calls from the pipeline worker pool.
class Provider {
 public:
  virtual ~Provider() = default;
  virtual nlohmann::json fetch(Kind kind, const std::string& ref) = 0;
};

// Reads payloads from a fixture tree. Two layouts are accepted, checked in
// this order:
//   <dir>/<kind>.jsonl       packed: one {"ref": ..., "payload": ...} per line
//   <dir>/<kind>/<ref>.json  per-ref file containing the payload
// Packed files are parsed once and held in memory.
class FixtureProvider : public Provider {
 public:
  explicit FixtureProvider(std::filesystem::path dir);

  nlohmann::json fetch(Kind kind, const std::string& ref) override;

 private:
  // Raw payload text per ref; parsed lazily on fetch to keep the resident
  // index small for large corpora.
  const std::unordered_map<std::string, std::string>* packed_for(Kind kind);

  std::filesystem::path dir_;
  std::mutex mu_;
  std::array<std::optional<std::unordered_map<std::string, std::string>>, kKindCount>
      packed_;
};

// POSTs {"ref": ...} to <endpoint>/provider/<kind> and expects the payload as
// a JSON body. Transport failures and 5xx responses are retried with
// exponential backoff up to max_attempts.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(std::string endpoint, int max_attempts = 4,
                        int base_backoff_ms = 50);

  nlohmann::json fetch(Kind kind, const std::string& ref) override;

 private:
  std::string host_;
  int port_ = 80;
  int max_attempts_;
  int base_backoff_ms_;
};

// Memoizes (kind, ref) -> payload. Fixture payloads are pure functions of the
// key, so the cache is transparent.
class CachingProvider : public Provider {
 public:
  explicit CachingProvider(std::shared_ptr<Provider> inner);

  nlohmann::json fetch(Kind kind, const std::string& ref) override;

  std::size_t hits() const;
  std::size_t misses() const;

  // Drops cached payloads (counters are kept). The pipeline calls this at
  // stage boundaries: no ref is fetched by more than one stage, so evicting
  // bounds memory without costing hits.
  void clear();

 private:
  std::shared_ptr<Provider> inner_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, nlohmann::json> cache_;
  std::size_t hits_ = 0;
  std::size_t misses_ = 0;
};

// Payload decoders; each validates the documented schema and throws
// ProviderError naming the offending payload on violation.
segment::TransitionSeries decode_transition(const nlohmann::json& payload,
                                            const std::string& ref);
filters::LumaSeries decode_luma(const nlohmann::json& payload, const std::string& ref,
                                std::size_t expected_frames);
filters::SubtitleDetection decode_subtitle(const nlohmann::json& payload,
                                           const std::string& ref, Millis clip_len_ms);
QualityScores decode_quality(const nlohmann::json& payload, const std::string& ref);
std::vector<double> decode_embedding(const nlohmann::json& payload,
                                     const std::string& ref);
traj::CameraTrajectory decode_pose(const nlohmann::json& payload,
                                   const std::string& ref);
CategoryLabels decode_category(const nlohmann::json& payload, const std::string& ref,
                               const LabelVocabulary& vocabulary);
std::string decode_caption(const nlohmann::json& payload, const std::string& ref);
// Raw chapter-ingest text (see docs/FORMATS.md); parsing happens downstream.
std::string decode_chapter_lines(const nlohmann::json& payload,
                                 const std::string& ref);

}  // namespace curator::providers
