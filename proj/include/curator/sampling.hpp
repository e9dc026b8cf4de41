#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/manifest.hpp"

namespace curator::sampling {

struct SamplingConfig {
  double alpha_quality = 0.7;
  double alpha_content = 0.7;
  double alpha_location = 0.6;
  double alpha_category = 0.6;
  double alpha_camera = 0.75;
  std::uint64_t seed = 0;
  // Clusters per country for content dedup; unset = ceil(sqrt(N_country)).
  std::optional<std::uint32_t> kmeans_k;
  std::uint32_t kmeans_batch = 1024;
  std::uint32_t kmeans_iterations = 50;
  // Trajectory discretization used by camera sampling and reporting.
  int azimuth_bins = 8;
  int elevation_bins = 4;
  int jitter_bins = 10;
};

// Flat per-clip view consumed by the sampling stages. Each stage checks its
// own prerequisites; optional fields a stage does not use may stay unset.
struct SampleClip {
  std::string clip_id;
  std::optional<double> quality_sum;  // aesthetic + semantic
  std::optional<std::string> country_code;
  std::optional<std::string> city_key;
  std::optional<CategoryLabels> categories;
  std::vector<double> embedding;  // empty = none
  std::optional<int> direction_bin;
  std::optional<int> jitter_bin;
};

struct SampleTrace {
  std::string stage;
  std::vector<std::string> kept;     // sorted clip ids
  std::vector<std::string> removed;  // sorted clip ids
  std::uint64_t seed = 0;
  nlohmann::json diagnostics;
};

// Thrown when a stage's prerequisites are violated; carries the traces of the
// stages that already completed.
class SamplingError : public std::runtime_error {
 public:
  SamplingError(const std::string& what, std::vector<SampleTrace> partial)
      : std::runtime_error(what), partial_traces(std::move(partial)) {}

  std::vector<SampleTrace> partial_traces;
};

// ceil(alpha * n) / floor(alpha * n) with a tiny nudge so that exact products
// are not pushed across an integer boundary by floating-point rounding.
std::size_t ceil_frac(double alpha, std::size_t n);
std::size_t floor_frac(double alpha, std::size_t n);

// Mini-batch k-means (Sculley 2010) with reservoir-sampled initial centers and
// per-center learning rates 1/count. Deterministic for a fixed seed.
struct KMeansResult {
  std::vector<std::vector<double>> centers;
  std::vector<int> assignments;  // nearest center per input point
};
KMeansResult minibatch_kmeans(const std::vector<std::vector<double>>& points,
                              std::uint32_t k, std::uint32_t batch,
                              std::uint32_t iterations, std::uint64_t seed);

// Stage 1: keep the ceil(alpha * N) clips with the highest aesthetic+semantic
// sum; ties broken by lexicographic clip_id (smaller kept first).
std::vector<std::string> quality_sample(const std::vector<SampleClip>& clips,
                                        double alpha);

// Stage 2: per-country near-duplicate removal. Clusters each country's
// embeddings (mini-batch k-means), walks the country's clips in quality rank
// order, and removes the current clip's most cosine-similar remaining
// neighbor within its cluster until floor((1-alpha) * N_country) removals.
std::vector<std::string> content_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha,
    std::optional<std::uint32_t> k, std::uint32_t batch, std::uint32_t iterations,
    std::uint64_t seed, unsigned parallelism = 1,
    nlohmann::json* diagnostics = nullptr);

// Stage 3: equal per-city quotas toward a ceil(alpha * N) target. Cities are
// visited in ascending size order; a city smaller than its quota contributes
// everything and the shortfall is spread over the remaining cities. Within a
// city selection is by quality score, ties by clip_id.
std::vector<std::string> location_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha,
    nlohmann::json* diagnostics = nullptr);

// Stage 4: inverse label-frequency weighting across the four category
// dimensions; sequential weighted sampling without replacement (exact, via a
// Fenwick tree over weights) until ceil(alpha * N) clips are kept.
std::vector<std::string> category_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha, std::uint64_t seed,
    nlohmann::json* diagnostics = nullptr);

// Stage 5: joint (direction_bin, jitter_bin) groups with the same quota
// recurrence as location sampling (groups visited in ascending size order);
// within a group selection is seeded-uniform. Clips lacking trajectory bins
// fall into a dedicated (-1, -1) group.
std::vector<std::string> camera_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha, std::uint64_t seed,
    nlohmann::json* diagnostics = nullptr);

struct SamplingResult {
  std::vector<std::string> kept;  // final survivors, sorted
  std::vector<SampleTrace> traces;
};

// Runs the five stages in fixed order (quality, content, location, category,
// camera), each consuming the previous stage's kept set. Per-stage seeds are
// derived from config.seed so results do not depend on scheduling.
SamplingResult run_sampling(const std::vector<SampleClip>& clips,
                            const SamplingConfig& config, unsigned parallelism = 1);

}  // namespace curator::sampling
