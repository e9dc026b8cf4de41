#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace curator::checkpoints {

struct StageCheckpoint {
  std::string stage;
  std::string input_digest;  // hex content hash of input bytes + config subtree
  std::string output_path;   // workspace-relative
  bool complete = false;
};

// Persistent stage-completion ledger (<workspace>/checkpoints.json). Entries
// are written atomically and only after the stage's output file has been
// committed, so a checkpoint never refers to a missing output.
class CheckpointStore {
 public:
  explicit CheckpointStore(std::filesystem::path file);

  std::optional<StageCheckpoint> get(const std::string& stage) const;

  // Inserts/replaces the entry and persists immediately.
  void put(const StageCheckpoint& checkpoint);

  const std::map<std::string, StageCheckpoint>& entries() const { return entries_; }

 private:
  void save() const;

  std::filesystem::path file_;
  std::map<std::string, StageCheckpoint> entries_;
};

}  // namespace curator::checkpoints
