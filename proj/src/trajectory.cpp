#include "curator/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "curator/util.hpp"

namespace curator::traj {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

}  // namespace

std::vector<std::string> check_trajectory(const CameraTrajectory& traj) {
  std::vector<std::string> problems;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const auto& f = traj.frames[i];
    if (i > 0 && !(f.t_s > traj.frames[i - 1].t_s)) {
      problems.push_back(
          util::strformat("timestamps not strictly increasing at frame %zu", i));
    }
    if (std::abs(f.orientation.norm() - 1.0) > 1e-6) {
      problems.push_back(
          util::strformat("orientation at frame %zu is not unit norm", i));
    }
    if (!f.position.allFinite()) {
      problems.push_back(util::strformat("non-finite position at frame %zu", i));
    }
  }
  return problems;
}

std::optional<double> direction_change(const CameraTrajectory& traj, std::size_t i) {
  if (i == 0 || i + 1 >= traj.frames.size()) {
    return std::nullopt;
  }
  const Eigen::Vector3d u = traj.frames[i].position - traj.frames[i - 1].position;
  const Eigen::Vector3d v = traj.frames[i + 1].position - traj.frames[i].position;
  if (u.norm() <= kMotionEpsilon || v.norm() <= kMotionEpsilon) {
    return std::nullopt;
  }
  return std::atan2(u.cross(v).norm(), u.dot(v)) * kRadToDeg;
}

double viewpoint_shift(const Eigen::Quaterniond& q1, const Eigen::Quaterniond& q2) {
  const Eigen::Quaterniond a = q1.normalized();
  Eigen::Quaterniond b = q2.normalized();
  if (a.dot(b) < 0) {
    b.coeffs() = -b.coeffs();
  }
  // Half-chord form of the geodesic angle. Unlike acos(|a.b|) it is exact at
  // 0 (q2 == +-q1 gives a zero chord) and stays well conditioned near 0 and
  // 180 degrees, where acos loses half the significand.
  const double chord = (a.coeffs() - b.coeffs()).norm();
  const double cochord = (a.coeffs() + b.coeffs()).norm();
  return 4.0 * std::atan2(chord, cochord) * kRadToDeg;
}

std::optional<double> jitter(const CameraTrajectory& traj, std::size_t window) {
  const std::size_t n = traj.frames.size();
  if (window == 0 || n < window) {
    return std::nullopt;
  }
  const std::size_t windows = n / window;
  double sum = 0;
  for (std::size_t w = 0; w < windows; ++w) {
    const std::size_t begin = w * window;
    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (std::size_t i = begin; i < begin + window; ++i) {
      mean += traj.frames[i].position;
    }
    mean /= static_cast<double>(window);
    Eigen::Vector3d var = Eigen::Vector3d::Zero();
    for (std::size_t i = begin; i < begin + window; ++i) {
      const Eigen::Vector3d d = traj.frames[i].position - mean;
      var += d.cwiseProduct(d);
    }
    var /= static_cast<double>(window);  // population variance
    sum += var.norm();
  }
  return sum / static_cast<double>(windows);
}

std::optional<Eigen::Vector3d> direction_vector(const CameraTrajectory& traj) {
  if (traj.frames.empty()) {
    return std::nullopt;
  }
  const Eigen::Vector3d d =
      traj.frames.back().position - traj.frames.front().position;
  const double norm = d.norm();
  if (norm <= kMotionEpsilon) {
    return std::nullopt;
  }
  return Eigen::Vector3d(d / norm);
}

int sphere_bin(const std::optional<Eigen::Vector3d>& direction, int azimuth_bins,
               int elevation_bins) {
  if (!direction) {
    return azimuth_bins * elevation_bins;
  }
  const Eigen::Vector3d& d = *direction;
  const double elevation = std::asin(std::clamp(d.z(), -1.0, 1.0));
  int row = static_cast<int>(std::floor((elevation + std::numbers::pi / 2) /
                                        std::numbers::pi * elevation_bins));
  row = std::clamp(row, 0, elevation_bins - 1);
  double azimuth = std::atan2(d.y(), d.x());
  if (azimuth < 0) {
    azimuth += 2 * std::numbers::pi;
  }
  int col = static_cast<int>(
      std::floor(azimuth / (2 * std::numbers::pi) * azimuth_bins));
  col = std::clamp(col, 0, azimuth_bins - 1);
  return row * azimuth_bins + col;
}

int jitter_bin(double value, const std::vector<double>& edges) {
  int bin = 0;
  for (double e : edges) {
    if (value >= e) {
      ++bin;
    } else {
      break;
    }
  }
  return bin;
}

std::vector<double> jitter_bin_edges(std::vector<double> values, int bins) {
  std::vector<double> edges;
  if (values.empty() || bins <= 1) {
    return edges;
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  edges.reserve(static_cast<std::size_t>(bins) - 1);
  for (int k = 1; k < bins; ++k) {
    const std::size_t idx =
        std::min(n - 1, static_cast<std::size_t>(k) * n / static_cast<std::size_t>(bins));
    edges.push_back(values[idx]);
  }
  return edges;
}

std::optional<TrajectorySummary> make_summary(const CameraTrajectory& traj,
                                              int azimuth_bins, int elevation_bins,
                                              const std::vector<double>& jitter_edges,
                                              std::size_t window) {
  const auto j = jitter(traj, window);
  if (!j) {
    return std::nullopt;
  }
  TrajectorySummary s;
  s.clip_id = traj.clip_id;
  s.direction = direction_vector(traj);
  s.jitter = *j;
  s.direction_bin = sphere_bin(s.direction, azimuth_bins, elevation_bins);
  s.jitter_bin = jitter_bin(s.jitter, jitter_edges);
  return s;
}

std::string trajectory_to_string(const CameraTrajectory& traj) {
  std::string out = util::strformat("%zu %.17g\n", traj.frames.size(), traj.fps);
  for (const auto& f : traj.frames) {
    out += util::strformat("%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", f.t_s,
                           f.position.x(), f.position.y(), f.position.z(),
                           f.orientation.w(), f.orientation.x(), f.orientation.y(),
                           f.orientation.z());
  }
  return out;
}

CameraTrajectory trajectory_from_string(std::string_view text,
                                        const std::string& clip_id) {
  CameraTrajectory traj;
  traj.clip_id = clip_id;
  const auto lines = util::split_lines(text);
  if (lines.empty()) {
    throw std::runtime_error("trajectory file is empty");
  }
  std::size_t count = 0;
  {
    const std::string head(util::trim(lines[0]));
    if (std::sscanf(head.c_str(), "%zu %lf", &count, &traj.fps) != 2) {
      throw std::runtime_error("bad trajectory header line");
    }
  }
  traj.frames.reserve(count);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = util::trim(lines[i]);
    if (line.empty()) {
      continue;
    }
    TrajectoryFrame f;
    double qw, qx, qy, qz;
    const std::string row(line);
    if (std::sscanf(row.c_str(), "%lf %lf %lf %lf %lf %lf %lf %lf", &f.t_s,
                    &f.position.x(), &f.position.y(), &f.position.z(), &qw, &qx, &qy,
                    &qz) != 8) {
      throw std::runtime_error(util::strformat("bad trajectory row at line %zu", i + 1));
    }
    f.orientation = Eigen::Quaterniond(qw, qx, qy, qz);
    traj.frames.push_back(f);
  }
  if (traj.frames.size() != count) {
    throw std::runtime_error(
        util::strformat("trajectory header declares %zu frames, file has %zu", count,
                        traj.frames.size()));
  }
  const auto problems = check_trajectory(traj);
  if (!problems.empty()) {
    throw std::runtime_error("invalid trajectory: " + problems.front());
  }
  return traj;
}

CameraTrajectory load_trajectory(const std::filesystem::path& path,
                                 const std::string& clip_id) {
  return trajectory_from_string(util::read_file(path), clip_id);
}

void save_trajectory(const CameraTrajectory& traj, const std::filesystem::path& path) {
  util::atomic_write_file(path, trajectory_to_string(traj));
}

}  // namespace curator::traj
