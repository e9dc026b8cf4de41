#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace curator::traj {

// Displacements at or below this are treated as stationary: no motion
// direction is defined for them.
inline constexpr double kMotionEpsilon = 1e-6;

inline constexpr int kJitterWindowFrames = 30;

struct TrajectoryFrame {
  double t_s = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();
};

// Per-frame camera pose in arbitrary reconstruction units. Timestamps are
// strictly increasing; orientations are unit quaternions.
struct CameraTrajectory {
  std::string clip_id;
  double fps = 0;
  std::vector<TrajectoryFrame> frames;

  std::size_t size() const { return frames.size(); }
};

// Checks the type invariants; returns human-readable problems (empty = valid).
std::vector<std::string> check_trajectory(const CameraTrajectory& traj);

// Angle in degrees [0, 180] between steps (i-1 -> i) and (i -> i+1).
// Undefined when either step is stationary.
std::optional<double> direction_change(const CameraTrajectory& traj, std::size_t i);

// Geodesic rotation angle between two orientations, degrees in [0, 180].
// Sign-insensitive (q and -q encode the same rotation). Non-unit inputs are
// normalized.
double viewpoint_shift(const Eigen::Quaterniond& q1, const Eigen::Quaterniond& q2);

// Mean over disjoint `window`-frame windows of the Euclidean norm of the
// per-axis population variance of positions. Trailing partial window dropped;
// undefined when the trajectory is shorter than one window.
std::optional<double> jitter(const CameraTrajectory& traj,
                             std::size_t window = kJitterWindowFrames);

// Unit vector from the first to the last position; undefined when the
// trajectory is (nearly) closed.
std::optional<Eigen::Vector3d> direction_vector(const CameraTrajectory& traj);

// Equiangular latitude/longitude grid over the unit sphere. Rows count from
// the south pole so index elevation_bins-1 is the top row; columns count from
// azimuth 0 (+x). The stationary marker (nullopt) maps to the reserved index
// azimuth_bins * elevation_bins.
int sphere_bin(const std::optional<Eigen::Vector3d>& direction, int azimuth_bins = 8,
               int elevation_bins = 4);

// Index of the half-open interval [e_i, e_{i+1}) containing the value, with
// underflow mapped to 0 and overflow to the last bin. edges must be ascending;
// edges.size() = k yields k+1 bins.
int jitter_bin(double value, const std::vector<double>& edges);

// Ascending quantile edges (bins-1 of them) over the given jitter values;
// empty when there are no values.
std::vector<double> jitter_bin_edges(std::vector<double> values, int bins);

struct TrajectorySummary {
  std::string clip_id;
  std::optional<Eigen::Vector3d> direction;  // unset = stationary
  double jitter = 0;
  int direction_bin = 0;
  int jitter_bin = 0;
};

// Builds the summary used by camera-diversity sampling. Requires at least one
// jitter window of frames.
std::optional<TrajectorySummary> make_summary(const CameraTrajectory& traj,
                                              int azimuth_bins, int elevation_bins,
                                              const std::vector<double>& jitter_edges,
                                              std::size_t window = kJitterWindowFrames);

// Trajectory artifact files: a "<frame_count> <fps>" header line followed by
// one "t x y z qw qx qy qz" row per frame (see docs/FORMATS.md).
CameraTrajectory load_trajectory(const std::filesystem::path& path,
                                 const std::string& clip_id);
void save_trajectory(const CameraTrajectory& traj, const std::filesystem::path& path);
std::string trajectory_to_string(const CameraTrajectory& traj);
CameraTrajectory trajectory_from_string(std::string_view text,
                                        const std::string& clip_id);

}  // namespace curator::traj
