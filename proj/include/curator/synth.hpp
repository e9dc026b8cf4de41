#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curator/manifest.hpp"
#include "curator/sampling.hpp"
#include "curator/trajectory.hpp"

namespace curator::synth {

// Knobs for a generated corpus. Everything is derived deterministically from
// `seed`; two calls with equal specs produce byte-identical fixtures.
struct CorpusSpec {
  std::size_t videos = 12;
  // Exact number of clips segmentation will extract (the too-short reject
  // video, when enabled, is not part of the budget).
  std::size_t target_clips = 400;
  std::uint64_t seed = 1;
  // Low frame rates keep payloads small without changing any pipeline math;
  // all frame counts scale with fps.
  double fps = 1.0;
  std::size_t countries = 8;
  std::size_t cities_per_country = 3;
  std::size_t embedding_dim = 8;
  double game_fraction = 0.25;
  double pose_fraction = 0.6;
  double luma_defect_fraction = 0.03;
  double subtitle_defect_fraction = 0.03;
  double trajectory_defect_fraction = 0.06;  // split across the three rules
  double uncovered_shot_fraction = 0.04;     // shots left without a chapter
  double duplicate_fraction = 0.05;          // near-duplicate embeddings
  bool include_reject_video = true;          // one real video under 2x head trim
  bool inline_chapters_on_some = true;       // mix inline vs provider chapters
};

struct Corpus {
  Manifest input;  // collect-stage input: videos only, no clips
  // What segmentation will produce, in clip_id order (used by tests to size
  // expectations without running the pipeline).
  std::vector<ClipRecord> expected_clips;
  // payload kind name -> (ref -> payload JSON text)
  std::map<std::string, std::map<std::string, std::string>> fixtures;
};

Corpus make_corpus(const CorpusSpec& spec);

// Writes one packed <kind>.jsonl per payload kind under dir.
void write_fixtures(const Corpus& corpus, const std::filesystem::path& dir);

// Trajectory shapes used by the corpus and by filter tests. All are
// deterministic; frames are timestamped i / fps.
traj::CameraTrajectory straight_walk(const std::string& clip_id, std::size_t frames,
                                     double fps, const Eigen::Vector3d& step,
                                     double noise = 0.0, std::uint64_t seed = 0);
traj::CameraTrajectory stationary_camera(const std::string& clip_id,
                                         std::size_t frames, double fps);
// Walks forward, reverses, and resumes: two ~180 degree direction changes a
// few seconds apart.
traj::CameraTrajectory reversing_walk(const std::string& clip_id, std::size_t frames,
                                      double fps, double step = 0.5);
// A steady walk with one huge jump (SfM scale break).
traj::CameraTrajectory teleporting_walk(const std::string& clip_id,
                                        std::size_t frames, double fps,
                                        double step = 0.5, double jump_factor = 400);
// Steady position, camera yawing step_deg per frame.
traj::CameraTrajectory spinning_camera(const std::string& clip_id, std::size_t frames,
                                       double fps, double step_deg = 90);

// Fully annotated sampler inputs (quality, location, categories, embedding,
// camera bins) with realistic skew, for exercising the sampling stack without
// a file round-trip. Camera bins span at most 8x4 groups plus the
// missing-summary group.
std::vector<sampling::SampleClip> make_annotated_clips(
    std::size_t n, std::uint64_t seed, std::size_t countries = 8,
    std::size_t cities_per_country = 3, std::size_t embedding_dim = 8);

}  // namespace curator::synth
