#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "curator/manifest.hpp"

namespace curator {

// Manifest files are UTF-8 JSON Lines: a schema header line followed by one
// record object per line. Field names are documented in docs/FORMATS.md.
inline constexpr std::string_view kManifestSchema = "curation-manifest";
inline constexpr int kManifestVersion = 1;

struct LoadResult {
  Manifest manifest;
  std::vector<Diagnostic> diagnostics;

  bool clean() const { return diagnostics.empty(); }
};

nlohmann::json video_to_json(const VideoRecord& v);
nlohmann::json clip_to_json(const ClipRecord& c);

// Throw std::runtime_error with a field message on schema violations.
VideoRecord video_from_json(const nlohmann::json& j);
ClipRecord clip_from_json(const nlohmann::json& j);

// Parses and validates a manifest file. Records violating invariants are
// excluded and reported in diagnostics with their line number and id; the
// returned manifest always satisfies the type invariants. Throws only when
// the file itself cannot be read or the header is wrong.
LoadResult load_manifest(const std::filesystem::path& path);

// Serializes in canonical order (videos by id, then clips by id), one record
// per line, atomically. Output is byte-deterministic for a given record set.
void save_manifest(const Manifest& m, const std::filesystem::path& path);

std::string manifest_to_string(const Manifest& m);
LoadResult manifest_from_string(std::string_view text);

}  // namespace curator
