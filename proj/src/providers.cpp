#include "curator/providers.hpp"

#include <chrono>
#include <cmath>
#include <thread>

#include <httplib.h>

#include "curator/util.hpp"

namespace curator::providers {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, kKindCount> kKindNames = {
    "transition", "luma",     "subtitle", "quality", "embedding",
    "pose",       "category", "caption",  "chapters"};

[[noreturn]] void schema_error(Kind kind, const std::string& ref,
                               const std::string& what) {
  throw ProviderError(kind, ref, "schema violation: " + what);
}

double require_number(const json& j, const char* field, Kind kind,
                      const std::string& ref) {
  if (!j.contains(field) || !j[field].is_number()) {
    schema_error(kind, ref, std::string("missing numeric field '") + field + "'");
  }
  const double v = j[field].get<double>();
  if (!std::isfinite(v)) {
    schema_error(kind, ref, std::string("non-finite field '") + field + "'");
  }
  return v;
}

std::string require_string(const json& j, const char* field, Kind kind,
                           const std::string& ref) {
  if (!j.contains(field) || !j[field].is_string()) {
    schema_error(kind, ref, std::string("missing string field '") + field + "'");
  }
  return j[field].get<std::string>();
}

std::vector<double> require_number_array(const json& j, const char* field, Kind kind,
                                         const std::string& ref) {
  if (!j.contains(field) || !j[field].is_array()) {
    schema_error(kind, ref, std::string("missing array field '") + field + "'");
  }
  std::vector<double> out;
  out.reserve(j[field].size());
  for (const json& v : j[field]) {
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      schema_error(kind, ref, std::string("non-numeric entry in '") + field + "'");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string_view to_string(Kind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

std::optional<Kind> kind_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) {
      return static_cast<Kind>(i);
    }
  }
  return std::nullopt;
}

FixtureProvider::FixtureProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

const std::unordered_map<std::string, std::string>* FixtureProvider::packed_for(
    Kind kind) {
  const auto idx = static_cast<std::size_t>(kind);
  std::lock_guard<std::mutex> lock(mu_);
  if (!packed_[idx]) {
    std::unordered_map<std::string, std::string> map;
    const auto packed_path = dir_ / (std::string(to_string(kind)) + ".jsonl");
    if (std::filesystem::exists(packed_path)) {
      const std::string text = util::read_file(packed_path);
      for (const auto line : util::split_lines(text)) {
        const auto trimmed = util::trim(line);
        if (trimmed.empty()) {
          continue;
        }
        json row = json::parse(trimmed, nullptr, false);
        if (row.is_discarded() || !row.contains("ref") || !row["ref"].is_string() ||
            !row.contains("payload")) {
          throw ProviderError(kind, packed_path.string(),
                              "malformed packed fixture line");
        }
        map[row["ref"].get<std::string>()] = row["payload"].dump();
      }
    }
    packed_[idx] = std::move(map);
  }
  return &*packed_[idx];
}

json FixtureProvider::fetch(Kind kind, const std::string& ref) {
  const auto* packed = packed_for(kind);
  if (const auto it = packed->find(ref); it != packed->end()) {
    return json::parse(it->second);
  }
  const auto path = dir_ / std::string(to_string(kind)) / (ref + ".json");
  if (!std::filesystem::exists(path)) {
    throw ProviderError(kind, ref, "no fixture at " + path.string());
  }
  json payload = json::parse(util::read_file(path), nullptr, false);
  if (payload.is_discarded()) {
    throw ProviderError(kind, ref, "fixture is not valid JSON: " + path.string());
  }
  return payload;
}

HttpProvider::HttpProvider(std::string endpoint, int max_attempts,
                           int base_backoff_ms)
    : max_attempts_(std::max(1, max_attempts)),
      base_backoff_ms_(std::max(0, base_backoff_ms)) {
  // Accept "http://host:port" or "host:port".
  std::string rest = endpoint;
  if (const auto scheme = rest.find("://"); scheme != std::string::npos) {
    rest = rest.substr(scheme + 3);
  }
  if (const auto colon = rest.rfind(':'); colon != std::string::npos) {
    host_ = rest.substr(0, colon);
    port_ = std::stoi(rest.substr(colon + 1));
  } else {
    host_ = rest;
  }
}

json HttpProvider::fetch(Kind kind, const std::string& ref) {
  const std::string path = "/provider/" + std::string(to_string(kind));
  const std::string body = json{{"ref", ref}}.dump();
  std::string last_error = "no attempts made";
  for (int attempt = 0; attempt < max_attempts_; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(base_backoff_ms_ << (attempt - 1)));
    }
    httplib::Client client(host_, port_);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    const auto res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = util::strformat("server error %d", res->status);
      continue;
    }
    if (res->status != 200) {
      // 4xx are not retried: the request itself is wrong.
      throw ProviderError(kind, ref, util::strformat("HTTP %d", res->status));
    }
    json payload = json::parse(res->body, nullptr, false);
    if (payload.is_discarded()) {
      throw ProviderError(kind, ref, "response is not valid JSON");
    }
    return payload;
  }
  throw ProviderError(kind, ref,
                      util::strformat("failed after %d attempts; last: %s",
                                      max_attempts_, last_error.c_str()));
}

CachingProvider::CachingProvider(std::shared_ptr<Provider> inner)
    : inner_(std::move(inner)) {}

json CachingProvider::fetch(Kind kind, const std::string& ref) {
  const std::string key = std::string(to_string(kind)) + "\x1f" + ref;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (const auto it = cache_.find(key); it != cache_.end()) {
      ++hits_;
      return it->second;
    }
  }
  json payload = inner_->fetch(kind, ref);
  std::lock_guard<std::mutex> lock(mu_);
  ++misses_;
  return cache_.emplace(key, std::move(payload)).first->second;
}

std::size_t CachingProvider::hits() const {
  std::lock_guard<std::mutex> lock(mu_);
  return hits_;
}

std::size_t CachingProvider::misses() const {
  std::lock_guard<std::mutex> lock(mu_);
  return misses_;
}

void CachingProvider::clear() {
  std::lock_guard<std::mutex> lock(mu_);
  cache_.clear();
}

segment::TransitionSeries decode_transition(const json& payload,
                                            const std::string& ref) {
  segment::TransitionSeries series;
  series.video_id = ref;
  series.fps = require_number(payload, "fps", Kind::kTransition, ref);
  if (series.fps <= 0) {
    schema_error(Kind::kTransition, ref, "fps must be positive");
  }
  series.probs = require_number_array(payload, "probs", Kind::kTransition, ref);
  for (const double p : series.probs) {
    if (p < 0 || p > 1) {
      schema_error(Kind::kTransition, ref, "probability outside [0, 1]");
    }
  }
  return series;
}

filters::LumaSeries decode_luma(const json& payload, const std::string& ref,
                                std::size_t expected_frames) {
  filters::LumaSeries series;
  series.clip_id = ref;
  series.values = require_number_array(payload, "values", Kind::kLuma, ref);
  for (const double v : series.values) {
    if (v < 0 || v > 255) {
      schema_error(Kind::kLuma, ref, "luma outside [0, 255]");
    }
  }
  const auto n = series.values.size();
  if (n + 1 < expected_frames || n > expected_frames + 1) {
    schema_error(Kind::kLuma, ref,
                 util::strformat("length %zu, expected %zu within 1 frame", n,
                                 expected_frames));
  }
  return series;
}

filters::SubtitleDetection decode_subtitle(const json& payload,
                                           const std::string& ref,
                                           Millis clip_len_ms) {
  filters::SubtitleDetection det;
  det.clip_id = ref;
  if (!payload.contains("events") || !payload["events"].is_array()) {
    schema_error(Kind::kSubtitle, ref, "missing array field 'events'");
  }
  for (const json& e : payload["events"]) {
    filters::SubtitleEvent event;
    event.y_center_frac = require_number(e, "y_center_frac", Kind::kSubtitle, ref);
    event.start_ms = millis_from_seconds(require_number(e, "start_s", Kind::kSubtitle, ref));
    event.end_ms = millis_from_seconds(require_number(e, "end_s", Kind::kSubtitle, ref));
    if (event.y_center_frac < 0 || event.y_center_frac > 1) {
      schema_error(Kind::kSubtitle, ref, "y_center_frac outside [0, 1]");
    }
    if (event.start_ms >= event.end_ms || event.start_ms < 0 ||
        event.end_ms > clip_len_ms) {
      schema_error(Kind::kSubtitle, ref, "event interval outside the clip");
    }
    det.events.push_back(event);
  }
  return det;
}

QualityScores decode_quality(const json& payload, const std::string& ref) {
  QualityScores scores;
  scores.technical = require_number(payload, "technical", Kind::kQuality, ref);
  scores.aesthetic = require_number(payload, "aesthetic", Kind::kQuality, ref);
  scores.semantic = require_number(payload, "semantic", Kind::kQuality, ref);
  for (const double v : {scores.technical, scores.aesthetic, scores.semantic}) {
    if (v < 0 || v > 1) {
      schema_error(Kind::kQuality, ref, "score outside [0, 1]");
    }
  }
  return scores;
}

std::vector<double> decode_embedding(const json& payload, const std::string& ref) {
  auto vec = require_number_array(payload, "vector", Kind::kEmbedding, ref);
  if (vec.empty()) {
    schema_error(Kind::kEmbedding, ref, "empty vector");
  }
  return vec;
}

traj::CameraTrajectory decode_pose(const json& payload, const std::string& ref) {
  traj::CameraTrajectory trajectory;
  trajectory.clip_id = ref;
  trajectory.fps = require_number(payload, "fps", Kind::kPose, ref);
  if (!payload.contains("frames") || !payload["frames"].is_array()) {
    schema_error(Kind::kPose, ref, "missing array field 'frames'");
  }
  for (const json& row : payload["frames"]) {
    if (!row.is_array() || row.size() != 8) {
      schema_error(Kind::kPose, ref, "frame rows must be [t x y z qw qx qy qz]");
    }
    for (const json& v : row) {
      if (!v.is_number() || !std::isfinite(v.get<double>())) {
        schema_error(Kind::kPose, ref, "non-numeric frame entry");
      }
    }
    traj::TrajectoryFrame frame;
    frame.t_s = row[0].get<double>();
    frame.position = {row[1].get<double>(), row[2].get<double>(),
                      row[3].get<double>()};
    frame.orientation = Eigen::Quaterniond(row[4].get<double>(), row[5].get<double>(),
                                           row[6].get<double>(),
                                           row[7].get<double>());
    trajectory.frames.push_back(frame);
  }
  const auto problems = traj::check_trajectory(trajectory);
  if (!problems.empty()) {
    schema_error(Kind::kPose, ref, problems.front());
  }
  return trajectory;
}

CategoryLabels decode_category(const json& payload, const std::string& ref,
                               const LabelVocabulary& vocabulary) {
  CategoryLabels labels;
  for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
    const std::string field(kCategoryDimensions[d]);
    const std::string value = require_string(payload, field.c_str(), Kind::kCategory, ref);
    if (!vocabulary.valid(d, value)) {
      std::string vocab;
      for (const std::string& v : vocabulary.dimension(d)) {
        vocab += vocab.empty() ? v : ", " + v;
      }
      schema_error(Kind::kCategory, ref,
                   "label '" + value + "' not in " + field + " vocabulary {" + vocab +
                       ", " + std::string(kAbstainLabel) + "}");
    }
    labels.dimension(d) = value;
  }
  return labels;
}

std::string decode_caption(const json& payload, const std::string& ref) {
  return require_string(payload, "text", Kind::kCaption, ref);
}

std::string decode_chapter_lines(const json& payload, const std::string& ref) {
  return require_string(payload, "lines", Kind::kChapters, ref);
}

}  // namespace curator::providers
