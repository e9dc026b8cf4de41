#include "curator/sampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "curator/util.hpp"

namespace curator::sampling {

namespace {

using nlohmann::json;

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = i;
  }
  return idx;
}

// Sorts indices by (quality_sum descending, clip_id ascending). Callers must
// have verified that quality_sum is present.
void sort_by_quality(const std::vector<SampleClip>& clips,
                     std::vector<std::size_t>& idx) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const double qa = *clips[a].quality_sum;
    const double qb = *clips[b].quality_sum;
    if (qa != qb) {
      return qa > qb;
    }
    return clips[a].clip_id < clips[b].clip_id;
  });
}

void sort_by_id(const std::vector<SampleClip>& clips, std::vector<std::size_t>& idx) {
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return clips[a].clip_id < clips[b].clip_id;
  });
}

[[noreturn]] void throw_missing(const char* stage, const char* what,
                                const std::vector<std::string>& ids) {
  std::string msg = std::string(stage) + ": clips missing " + what + ":";
  const std::size_t shown = std::min<std::size_t>(ids.size(), 8);
  for (std::size_t i = 0; i < shown; ++i) {
    msg += " " + ids[i];
  }
  if (ids.size() > shown) {
    msg += util::strformat(" (and %zu more)", ids.size() - shown);
  }
  throw std::runtime_error(msg);
}

void require_quality(const char* stage, const std::vector<SampleClip>& clips) {
  std::vector<std::string> missing;
  for (const SampleClip& c : clips) {
    if (!c.quality_sum) {
      missing.push_back(c.clip_id);
    }
  }
  if (!missing.empty()) {
    throw_missing(stage, "quality scores", missing);
  }
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b,
                         double norm_a, double norm_b) {
  if (norm_a <= 0 || norm_b <= 0) {
    return -1.0;  // degenerate zero vector: never anyone's nearest neighbor
  }
  double dot = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
  }
  return dot / (norm_a * norm_b);
}

// Binary indexed tree over non-negative weights, supporting point updates and
// "smallest index with prefix sum > x" queries in O(log n).
class FenwickTree {
 public:
  explicit FenwickTree(const std::vector<double>& weights)
      : n_(weights.size()), tree_(weights.size() + 1, 0.0) {
    for (std::size_t i = 1; i <= n_; ++i) {
      tree_[i] += weights[i - 1];
      const std::size_t parent = i + (i & (~i + 1));
      if (parent <= n_) {
        tree_[parent] += tree_[i];
      }
    }
    top_bit_ = 1;
    while ((top_bit_ << 1) <= n_) {
      top_bit_ <<= 1;
    }
  }

  void add(std::size_t i, double delta) {
    for (std::size_t j = i + 1; j <= n_; j += j & (~j + 1)) {
      tree_[j] += delta;
    }
  }

  double total() const {
    double s = 0;
    for (std::size_t j = n_; j > 0; j -= j & (~j + 1)) {
      s += tree_[j];
    }
    return s;
  }

  // Smallest 0-based index i with prefix(i + 1) > x; returns n when x is at
  // or beyond the total. Never lands on a zero-weight entry otherwise.
  std::size_t find(double x) const {
    std::size_t idx = 0;
    for (std::size_t bit = top_bit_; bit > 0; bit >>= 1) {
      const std::size_t next = idx + bit;
      if (next <= n_ && tree_[next] <= x) {
        x -= tree_[next];
        idx = next;
      }
    }
    return idx;
  }

 private:
  std::size_t n_;
  std::size_t top_bit_ = 1;
  std::vector<double> tree_;
};

}  // namespace

std::size_t ceil_frac(double alpha, std::size_t n) {
  const double raw = std::ceil(alpha * static_cast<double>(n) - 1e-9);
  const auto v = raw <= 0 ? std::size_t{0} : static_cast<std::size_t>(raw);
  return std::min(v, n);
}

std::size_t floor_frac(double alpha, std::size_t n) {
  const double raw = std::floor(alpha * static_cast<double>(n) + 1e-9);
  const auto v = raw <= 0 ? std::size_t{0} : static_cast<std::size_t>(raw);
  return std::min(v, n);
}

KMeansResult minibatch_kmeans(const std::vector<std::vector<double>>& points,
                              std::uint32_t k, std::uint32_t batch,
                              std::uint32_t iterations, std::uint64_t seed) {
  KMeansResult out;
  const std::size_t n = points.size();
  out.assignments.assign(n, 0);
  if (n == 0) {
    return out;
  }
  const std::size_t kk = std::max<std::size_t>(1, std::min<std::size_t>(k, n));
  const std::size_t dim = points[0].size();
  util::Rng rng(seed);

  // Reservoir-sampled initial centers over the points in input order.
  std::vector<std::size_t> init(kk);
  for (std::size_t i = 0; i < kk; ++i) {
    init[i] = i;
  }
  for (std::size_t i = kk; i < n; ++i) {
    const std::size_t j = rng.next_index(i + 1);
    if (j < kk) {
      init[j] = i;
    }
  }
  out.centers.reserve(kk);
  for (std::size_t i = 0; i < kk; ++i) {
    out.centers.push_back(points[init[i]]);
  }

  auto nearest = [&](const std::vector<double>& p) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < out.centers.size(); ++c) {
      double d = 0;
      for (std::size_t t = 0; t < dim; ++t) {
        const double diff = p[t] - out.centers[c][t];
        d += diff * diff;
      }
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    return best;
  };

  std::vector<std::size_t> counts(kk, 0);
  const std::size_t batch_n = std::max<std::size_t>(1, std::min<std::size_t>(batch, n));
  std::vector<std::pair<std::size_t, int>> picks(batch_n);
  for (std::uint32_t it = 0; it < iterations; ++it) {
    for (std::size_t b = 0; b < batch_n; ++b) {
      const std::size_t p = rng.next_index(n);
      picks[b] = {p, nearest(points[p])};
    }
    for (const auto& [p, c] : picks) {
      counts[c] += 1;
      const double eta = 1.0 / static_cast<double>(counts[c]);
      auto& center = out.centers[c];
      const auto& x = points[p];
      for (std::size_t t = 0; t < dim; ++t) {
        center[t] += eta * (x[t] - center[t]);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    out.assignments[i] = nearest(points[i]);
  }
  return out;
}

std::vector<std::string> quality_sample(const std::vector<SampleClip>& clips,
                                        double alpha) {
  require_quality("quality sampling", clips);
  auto rank = iota_indices(clips.size());
  sort_by_quality(clips, rank);
  const std::size_t keep_n = ceil_frac(alpha, clips.size());
  std::vector<std::string> kept;
  kept.reserve(keep_n);
  for (std::size_t i = 0; i < keep_n; ++i) {
    kept.push_back(clips[rank[i]].clip_id);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::string> content_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha,
    std::optional<std::uint32_t> k, std::uint32_t batch, std::uint32_t iterations,
    std::uint64_t seed, unsigned parallelism, nlohmann::json* diagnostics) {
  require_quality("content sampling", clips);
  std::vector<std::string> missing;
  std::size_t dim = 0;
  for (const SampleClip& c : clips) {
    if (!c.country_code || c.embedding.empty()) {
      missing.push_back(c.clip_id);
    } else if (dim == 0) {
      dim = c.embedding.size();
    } else if (c.embedding.size() != dim) {
      throw std::runtime_error("content sampling: embedding dimension mismatch at " +
                               c.clip_id);
    }
  }
  if (!missing.empty()) {
    throw_missing("content sampling", "embeddings or country codes", missing);
  }

  std::map<std::string, std::vector<std::size_t>> by_country;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    by_country[*clips[i].country_code].push_back(i);
  }
  struct Group {
    std::string country;
    std::vector<std::size_t> members;  // clip_id order
    std::vector<std::string> kept;
    json diag;
  };
  std::vector<Group> groups;
  groups.reserve(by_country.size());
  for (auto& [country, members] : by_country) {
    Group g;
    g.country = country;
    g.members = std::move(members);
    sort_by_id(clips, g.members);
    groups.push_back(std::move(g));
  }

  util::parallel_for(groups.size(), parallelism, [&](std::size_t gi) {
    Group& g = groups[gi];
    const std::size_t n = g.members.size();
    const std::size_t budget = floor_frac(1.0 - alpha, n);

    std::vector<std::vector<double>> points;
    points.reserve(n);
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
      points.push_back(clips[g.members[i]].embedding);
      double sq = 0;
      for (double v : points.back()) {
        sq += v * v;
      }
      norms[i] = std::sqrt(sq);
    }

    const std::size_t want_k =
        k ? static_cast<std::size_t>(*k)
          : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    const auto km = minibatch_kmeans(points, static_cast<std::uint32_t>(want_k),
                                     batch, iterations,
                                     util::derive_seed(seed, "content", g.country));

    std::vector<std::vector<std::size_t>> cluster_members(km.centers.size());
    for (std::size_t i = 0; i < n; ++i) {
      cluster_members[static_cast<std::size_t>(km.assignments[i])].push_back(i);
    }

    auto rank = iota_indices(n);
    std::sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
      const double qa = *clips[g.members[a]].quality_sum;
      const double qb = *clips[g.members[b]].quality_sum;
      if (qa != qb) {
        return qa > qb;
      }
      return clips[g.members[a]].clip_id < clips[g.members[b]].clip_id;
    });

    std::vector<char> removed(n, 0);
    std::size_t removals = 0;
    bool progress = true;
    while (removals < budget && progress) {
      progress = false;
      for (const std::size_t i : rank) {
        if (removals >= budget) {
          break;
        }
        if (removed[i]) {
          continue;
        }
        const auto& mates = cluster_members[static_cast<std::size_t>(km.assignments[i])];
        std::size_t best = n;
        double best_sim = -std::numeric_limits<double>::infinity();
        for (const std::size_t j : mates) {
          if (j == i || removed[j]) {
            continue;
          }
          const double sim = cosine_similarity(points[i], points[j], norms[i], norms[j]);
          if (sim > best_sim) {  // mates are in clip_id order: first wins ties
            best_sim = sim;
            best = j;
          }
        }
        if (best < n) {
          removed[best] = 1;
          ++removals;
          progress = true;
        }
      }
    }

    for (std::size_t i = 0; i < n; ++i) {
      if (!removed[i]) {
        g.kept.push_back(clips[g.members[i]].clip_id);
      }
    }
    json sizes = json::array();
    for (const auto& m : cluster_members) {
      sizes.push_back(m.size());
    }
    g.diag = {{"clips", n},
              {"clusters", km.centers.size()},
              {"removals", removals},
              {"cluster_sizes", std::move(sizes)}};
  });

  std::vector<std::string> kept;
  json diag = json::object();
  for (Group& g : groups) {
    kept.insert(kept.end(), g.kept.begin(), g.kept.end());
    diag[g.country] = std::move(g.diag);
  }
  if (diagnostics) {
    *diagnostics = {{"countries", std::move(diag)}};
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::string> location_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha, nlohmann::json* diagnostics) {
  if (clips.empty()) {
    if (diagnostics) {
      *diagnostics = {{"cities", json::object()}};
    }
    return {};
  }
  require_quality("location sampling", clips);
  std::vector<std::string> missing;
  for (const SampleClip& c : clips) {
    if (!c.city_key) {
      missing.push_back(c.clip_id);
    }
  }
  if (!missing.empty()) {
    throw_missing("location sampling", "cities", missing);
  }

  std::map<std::string, std::vector<std::size_t>> by_city;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    by_city[*clips[i].city_key].push_back(i);
  }
  std::vector<std::pair<std::string, std::vector<std::size_t>>> cities(
      by_city.begin(), by_city.end());
  std::stable_sort(cities.begin(), cities.end(), [](const auto& a, const auto& b) {
    if (a.second.size() != b.second.size()) {
      return a.second.size() < b.second.size();
    }
    return a.first < b.first;
  });

  const std::size_t target = ceil_frac(alpha, clips.size());
  std::size_t remaining_target = target;
  std::size_t remaining_cities = cities.size();
  std::vector<std::string> kept;
  json diag = json::object();
  for (auto& [key, members] : cities) {
    const std::size_t quota = remaining_target / remaining_cities;
    const std::size_t take = std::min(members.size(), quota);
    sort_by_quality(clips, members);
    for (std::size_t i = 0; i < take; ++i) {
      kept.push_back(clips[members[i]].clip_id);
    }
    diag[key] = {{"clips", members.size()}, {"quota", quota}, {"taken", take}};
    remaining_target -= take;
    --remaining_cities;
  }
  if (diagnostics) {
    *diagnostics = {{"target", target}, {"cities", std::move(diag)}};
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::string> category_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha, std::uint64_t seed,
    nlohmann::json* diagnostics) {
  const std::size_t n = clips.size();
  if (n == 0) {
    return {};
  }
  std::vector<std::string> missing;
  for (const SampleClip& c : clips) {
    if (!c.categories) {
      missing.push_back(c.clip_id);
    }
  }
  if (!missing.empty()) {
    throw_missing("category sampling", "category labels", missing);
  }

  auto order = iota_indices(n);
  sort_by_id(clips, order);

  std::array<std::unordered_map<std::string, std::size_t>, 4> counts;
  for (const SampleClip& c : clips) {
    for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
      counts[d][c.categories->dimension(d)] += 1;
    }
  }
  std::vector<double> weights(n);
  for (std::size_t p = 0; p < n; ++p) {
    const SampleClip& c = clips[order[p]];
    double w = 1.0;
    for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
      // 1 / freq(label) = n / count(label); counts are over this stage input
      // so they are always >= 1.
      w *= static_cast<double>(n) /
           static_cast<double>(counts[d][c.categories->dimension(d)]);
    }
    weights[p] = w;
  }

  const std::size_t keep_n = ceil_frac(alpha, n);
  FenwickTree tree(weights);
  util::Rng rng(seed);
  std::vector<char> taken(n, 0);
  std::vector<std::string> kept;
  kept.reserve(keep_n);
  for (std::size_t t = 0; t < keep_n; ++t) {
    const double total = tree.total();
    std::size_t p = tree.find(rng.next_double() * total);
    if (p >= n || taken[p]) {
      // Floating-point drift pushed the draw past the live mass; fall back to
      // the last remaining slot.
      p = n;
      while (p > 0 && taken[p - 1]) {
        --p;
      }
      if (p == 0) {
        break;
      }
      --p;
    }
    taken[p] = 1;
    tree.add(p, -weights[p]);
    kept.push_back(clips[order[p]].clip_id);
  }

  if (diagnostics) {
    json freq = json::object();
    for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
      json dim = json::object();
      for (const auto& [label, count] : counts[d]) {
        dim[label] = count;
      }
      freq[std::string(kCategoryDimensions[d])] = std::move(dim);
    }
    *diagnostics = {{"label_counts", std::move(freq)}};
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::string> camera_diversity_sample(
    const std::vector<SampleClip>& clips, double alpha, std::uint64_t seed,
    nlohmann::json* diagnostics) {
  if (clips.empty()) {
    return {};
  }
  // Joint (direction, jitter) groups; clips without trajectory bins share the
  // reserved (-1, -1) group.
  std::map<std::pair<int, int>, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < clips.size(); ++i) {
    const SampleClip& c = clips[i];
    std::pair<int, int> key{-1, -1};
    if (c.direction_bin && c.jitter_bin) {
      key = {*c.direction_bin, *c.jitter_bin};
    }
    by_group[key].push_back(i);
  }
  std::vector<std::pair<std::pair<int, int>, std::vector<std::size_t>>> groups(
      by_group.begin(), by_group.end());
  std::stable_sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) {
    if (a.second.size() != b.second.size()) {
      return a.second.size() < b.second.size();
    }
    return a.first < b.first;
  });

  const std::size_t target = ceil_frac(alpha, clips.size());
  std::size_t remaining_target = target;
  std::size_t remaining_groups = groups.size();
  std::vector<std::string> kept;
  json diag = json::array();
  for (auto& [key, members] : groups) {
    const std::size_t quota = remaining_target / remaining_groups;
    const std::size_t take = std::min(members.size(), quota);
    sort_by_id(clips, members);
    util::Rng rng(util::derive_seed(
        seed, "camera", util::strformat("%d/%d", key.first, key.second)));
    rng.shuffle(members);
    for (std::size_t i = 0; i < take; ++i) {
      kept.push_back(clips[members[i]].clip_id);
    }
    diag.push_back({{"direction_bin", key.first},
                    {"jitter_bin", key.second},
                    {"clips", members.size()},
                    {"quota", quota},
                    {"taken", take}});
    remaining_target -= take;
    --remaining_groups;
  }
  if (diagnostics) {
    *diagnostics = {{"target", target}, {"groups", std::move(diag)}};
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

SamplingResult run_sampling(const std::vector<SampleClip>& clips,
                            const SamplingConfig& config, unsigned parallelism) {
  {
    std::vector<std::string> ids;
    ids.reserve(clips.size());
    for (const SampleClip& c : clips) {
      ids.push_back(c.clip_id);
    }
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) {
      throw std::runtime_error("sampling: duplicate clip id " + *dup);
    }
  }

  SamplingResult result;
  std::vector<SampleClip> current = clips;

  using StageFn = std::function<std::vector<std::string>(
      const std::vector<SampleClip>&, std::uint64_t, json*)>;
  const std::vector<std::pair<std::string, StageFn>> stages = {
      {"quality",
       [&](const auto& in, std::uint64_t, json*) {
         return quality_sample(in, config.alpha_quality);
       }},
      {"content",
       [&](const auto& in, std::uint64_t s, json* d) {
         return content_diversity_sample(in, config.alpha_content, config.kmeans_k,
                                         config.kmeans_batch,
                                         config.kmeans_iterations, s, parallelism, d);
       }},
      {"location",
       [&](const auto& in, std::uint64_t, json* d) {
         return location_diversity_sample(in, config.alpha_location, d);
       }},
      {"category",
       [&](const auto& in, std::uint64_t s, json* d) {
         return category_diversity_sample(in, config.alpha_category, s, d);
       }},
      {"camera",
       [&](const auto& in, std::uint64_t s, json* d) {
         return camera_diversity_sample(in, config.alpha_camera, s, d);
       }},
  };

  for (const auto& [name, fn] : stages) {
    const std::uint64_t stage_seed = util::derive_seed(config.seed, "stage", name);
    SampleTrace trace;
    trace.stage = name;
    trace.seed = stage_seed;
    try {
      trace.kept = fn(current, stage_seed, &trace.diagnostics);
    } catch (const std::exception& e) {
      throw SamplingError(e.what(), std::move(result.traces));
    }

    std::vector<std::string> input_ids;
    input_ids.reserve(current.size());
    for (const SampleClip& c : current) {
      input_ids.push_back(c.clip_id);
    }
    std::sort(input_ids.begin(), input_ids.end());
    std::set_difference(input_ids.begin(), input_ids.end(), trace.kept.begin(),
                        trace.kept.end(), std::back_inserter(trace.removed));

    const std::unordered_set<std::string> keep_set(trace.kept.begin(),
                                                   trace.kept.end());
    std::erase_if(current,
                  [&](const SampleClip& c) { return !keep_set.contains(c.clip_id); });
    result.traces.push_back(std::move(trace));
  }

  result.kept.reserve(current.size());
  for (const SampleClip& c : current) {
    result.kept.push_back(c.clip_id);
  }
  std::sort(result.kept.begin(), result.kept.end());
  return result;
}

}  // namespace curator::sampling
