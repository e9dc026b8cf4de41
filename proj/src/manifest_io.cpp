#include "curator/manifest_io.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

#include "curator/util.hpp"

namespace curator {

using nlohmann::json;

namespace {

json location_to_json(const Location& loc) {
  json j;
  j["country"] = loc.country_code;
  j["city"] = loc.city;
  if (!loc.place.empty()) {
    j["place"] = loc.place;
  }
  return j;
}

Location location_from_json(const json& j) {
  Location loc;
  loc.country_code = j.at("country").get<std::string>();
  loc.city = j.at("city").get<std::string>();
  if (j.contains("place")) {
    loc.place = j.at("place").get<std::string>();
  }
  return loc;
}

double require_number(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_number()) {
    throw std::runtime_error(std::string("field '") + key + "' is not a number");
  }
  return v.get<double>();
}

}  // namespace

json video_to_json(const VideoRecord& v) {
  json j;
  j["kind"] = "video";
  j["id"] = v.video_id;
  j["source"] = to_string(v.source);
  j["view"] = to_string(v.view);
  j["duration_s"] = seconds_from_millis(v.duration_ms);
  j["fps"] = v.fps;
  j["width"] = v.width;
  j["height"] = v.height;
  j["title"] = v.title;
  j["description"] = v.description;
  json chapters = json::array();
  for (const Chapter& ch : v.chapters) {
    json cj;
    cj["start_s"] = seconds_from_millis(ch.start_ms);
    cj["end_s"] = seconds_from_millis(ch.end_ms);
    cj["location"] = location_to_json(ch.location);
    chapters.push_back(std::move(cj));
  }
  j["chapters"] = std::move(chapters);
  return j;
}

VideoRecord video_from_json(const json& j) {
  VideoRecord v;
  v.video_id = j.at("id").get<std::string>();
  const auto source = source_from_string(j.at("source").get<std::string>());
  if (!source) {
    throw std::runtime_error("unknown source class");
  }
  v.source = *source;
  if (j.contains("view")) {
    const auto view = view_from_string(j.at("view").get<std::string>());
    if (!view) {
      throw std::runtime_error("unknown view kind");
    }
    v.view = *view;
  }
  v.duration_ms = millis_from_seconds(require_number(j, "duration_s"));
  v.fps = require_number(j, "fps");
  v.width = j.value("width", 0);
  v.height = j.value("height", 0);
  v.title = j.value("title", std::string{});
  v.description = j.value("description", std::string{});
  if (j.contains("chapters")) {
    for (const auto& cj : j.at("chapters")) {
      Chapter ch;
      ch.start_ms = millis_from_seconds(require_number(cj, "start_s"));
      ch.end_ms = millis_from_seconds(require_number(cj, "end_s"));
      ch.location = location_from_json(cj.at("location"));
      v.chapters.push_back(std::move(ch));
    }
  }
  return v;
}

json clip_to_json(const ClipRecord& c) {
  json j;
  j["kind"] = "clip";
  j["id"] = c.clip_id;
  j["video_id"] = c.video_id;
  j["start_s"] = seconds_from_millis(c.start_ms);
  j["end_s"] = seconds_from_millis(c.end_ms);
  if (c.removed) {
    j["status"] = "removed";
    j["reason"] = to_string(*c.removed);
  } else {
    j["status"] = "active";
  }
  if (c.location) {
    j["location"] = location_to_json(*c.location);
  }
  if (c.categories) {
    json cat;
    cat["scene"] = c.categories->scene;
    cat["weather"] = c.categories->weather;
    cat["time_of_day"] = c.categories->time_of_day;
    cat["crowd_density"] = c.categories->crowd_density;
    j["categories"] = std::move(cat);
  }
  if (c.caption) {
    j["caption"] = *c.caption;
  }
  if (c.scores) {
    json s;
    s["technical"] = c.scores->technical;
    s["aesthetic"] = c.scores->aesthetic;
    s["semantic"] = c.scores->semantic;
    j["scores"] = std::move(s);
  }
  if (!c.trajectory_ref.empty()) {
    j["trajectory_ref"] = c.trajectory_ref;
  }
  if (!c.embedding_ref.empty()) {
    j["embedding_ref"] = c.embedding_ref;
  }
  return j;
}

ClipRecord clip_from_json(const json& j) {
  ClipRecord c;
  c.clip_id = j.at("id").get<std::string>();
  c.video_id = j.at("video_id").get<std::string>();
  c.start_ms = millis_from_seconds(require_number(j, "start_s"));
  c.end_ms = millis_from_seconds(require_number(j, "end_s"));
  const std::string status = j.at("status").get<std::string>();
  if (status == "removed") {
    const auto reason = removal_reason_from_string(j.at("reason").get<std::string>());
    if (!reason) {
      throw std::runtime_error("unknown removal reason");
    }
    c.removed = *reason;
  } else if (status != "active") {
    throw std::runtime_error("unknown clip status '" + status + "'");
  }
  if (j.contains("location")) {
    c.location = location_from_json(j.at("location"));
  }
  if (j.contains("categories")) {
    const auto& cat = j.at("categories");
    CategoryLabels labels;
    labels.scene = cat.at("scene").get<std::string>();
    labels.weather = cat.at("weather").get<std::string>();
    labels.time_of_day = cat.at("time_of_day").get<std::string>();
    labels.crowd_density = cat.at("crowd_density").get<std::string>();
    c.categories = std::move(labels);
  }
  if (j.contains("caption")) {
    c.caption = j.at("caption").get<std::string>();
  }
  if (j.contains("scores")) {
    const auto& s = j.at("scores");
    QualityScores q;
    q.technical = require_number(s, "technical");
    q.aesthetic = require_number(s, "aesthetic");
    q.semantic = require_number(s, "semantic");
    c.scores = q;
  }
  c.trajectory_ref = j.value("trajectory_ref", std::string{});
  c.embedding_ref = j.value("embedding_ref", std::string{});
  return c;
}

namespace {

std::string header_line() {
  json h;
  h["schema"] = kManifestSchema;
  h["version"] = kManifestVersion;
  return h.dump();
}

}  // namespace

std::string manifest_to_string(const Manifest& m) {
  Manifest sorted = m;
  sorted.sort_canonical();
  std::string out = header_line();
  out.push_back('\n');
  for (const VideoRecord& v : sorted.videos) {
    out += video_to_json(v).dump();
    out.push_back('\n');
  }
  for (const ClipRecord& c : sorted.clips) {
    out += clip_to_json(c).dump();
    out.push_back('\n');
  }
  return out;
}

LoadResult manifest_from_string(std::string_view text) {
  LoadResult result;
  if (text.empty()) {
    // A zero-byte file is an empty manifest; the header is required
    // only once any record is present.
    return result;
  }
  const auto lines = util::split_lines(text);
  std::size_t first = 0;
  {
    const auto head = util::trim(lines[0]);
    json h = json::parse(head, nullptr, false);
    if (h.is_discarded() || h.value("schema", std::string{}) != kManifestSchema) {
      throw std::runtime_error("missing or invalid manifest schema header line");
    }
    if (h.value("version", 0) != kManifestVersion) {
      throw std::runtime_error("unsupported manifest version");
    }
    first = 1;
  }

  std::unordered_set<std::string> video_ids;
  std::unordered_set<std::string> clip_ids;
  struct PendingClip {
    ClipRecord clip;
    std::size_t line;
  };
  std::vector<PendingClip> pending_clips;

  for (std::size_t i = first; i < lines.size(); ++i) {
    const auto line = util::trim(lines[i]);
    const std::size_t line_no = i + 1;
    if (line.empty()) {
      continue;
    }
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      result.diagnostics.push_back({line_no, "", "malformed JSON line"});
      continue;
    }
    const std::string kind = j.value("kind", std::string{});
    try {
      if (kind == "video") {
        VideoRecord v = video_from_json(j);
        const auto problems = check_video(v);
        if (!problems.empty()) {
          for (const auto& p : problems) {
            result.diagnostics.push_back({line_no, v.video_id, p});
          }
          continue;
        }
        if (!video_ids.insert(v.video_id).second) {
          result.diagnostics.push_back(
              {line_no, v.video_id, "duplicate video_id"});
          continue;
        }
        result.manifest.videos.push_back(std::move(v));
      } else if (kind == "clip") {
        ClipRecord c = clip_from_json(j);
        if (!clip_ids.insert(c.clip_id).second) {
          result.diagnostics.push_back({line_no, c.clip_id, "duplicate clip_id"});
          continue;
        }
        pending_clips.push_back({std::move(c), line_no});
      } else {
        result.diagnostics.push_back({line_no, "", "unknown record kind"});
      }
    } catch (const std::exception& e) {
      result.diagnostics.push_back({line_no, j.value("id", std::string{}), e.what()});
    }
  }

  // Clip invariants that need the parent video are checked once all videos
  // are known, so record order within the file does not matter.
  const VideoIndex index = make_video_index(result.manifest);
  for (auto& pc : pending_clips) {
    const auto it = index.find(pc.clip.video_id);
    if (it == index.end()) {
      result.diagnostics.push_back(
          {pc.line, pc.clip.clip_id,
           "clip references unknown video '" + pc.clip.video_id + "'"});
      continue;
    }
    const auto problems = check_clip(pc.clip, &result.manifest.videos[it->second]);
    if (!problems.empty()) {
      for (const auto& p : problems) {
        result.diagnostics.push_back({pc.line, pc.clip.clip_id, p});
      }
      continue;
    }
    result.manifest.clips.push_back(std::move(pc.clip));
  }

  // The parent-video pass appends out of order; report in file order.
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return a.line < b.line;
                   });
  result.manifest.sort_canonical();
  return result;
}

LoadResult load_manifest(const std::filesystem::path& path) {
  return manifest_from_string(util::read_file(path));
}

void save_manifest(const Manifest& m, const std::filesystem::path& path) {
  util::atomic_write_file(path, manifest_to_string(m));
}

}  // namespace curator
