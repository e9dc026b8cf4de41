#include "curator/checkpoints.hpp"

#include <stdexcept>

#include <json.hpp>

#include "curator/util.hpp"

namespace curator::checkpoints {

namespace {

using nlohmann::json;

constexpr std::string_view kSchema = "curation-checkpoints";
constexpr int kVersion = 1;

}  // namespace

CheckpointStore::CheckpointStore(std::filesystem::path file) : file_(std::move(file)) {
  if (!std::filesystem::exists(file_)) {
    return;
  }
  const json root = json::parse(util::read_file(file_), nullptr, false);
  if (root.is_discarded() || root.value("schema", "") != kSchema ||
      root.value("version", 0) != kVersion || !root.contains("stages") ||
      !root["stages"].is_object()) {
    throw std::runtime_error("malformed checkpoint file: " + file_.string());
  }
  for (const auto& [stage, entry] : root["stages"].items()) {
    if (!entry.is_object() || !entry.contains("input_digest") ||
        !entry.contains("output_path") || !entry.contains("complete")) {
      throw std::runtime_error("malformed checkpoint entry '" + stage +
                               "' in " + file_.string());
    }
    StageCheckpoint cp;
    cp.stage = stage;
    cp.input_digest = entry["input_digest"].get<std::string>();
    cp.output_path = entry["output_path"].get<std::string>();
    cp.complete = entry["complete"].get<bool>();
    entries_[stage] = std::move(cp);
  }
}

std::optional<StageCheckpoint> CheckpointStore::get(const std::string& stage) const {
  const auto it = entries_.find(stage);
  if (it == entries_.end()) {
    return std::nullopt;
  }
  return it->second;
}

void CheckpointStore::put(const StageCheckpoint& checkpoint) {
  entries_[checkpoint.stage] = checkpoint;
  save();
}

void CheckpointStore::save() const {
  json stages = json::object();
  for (const auto& [stage, cp] : entries_) {
    stages[stage] = {{"input_digest", cp.input_digest},
                     {"output_path", cp.output_path},
                     {"complete", cp.complete}};
  }
  const json root = {
      {"schema", kSchema}, {"version", kVersion}, {"stages", std::move(stages)}};
  util::atomic_write_file(file_, root.dump(2) + "\n");
}

}  // namespace curator::checkpoints
