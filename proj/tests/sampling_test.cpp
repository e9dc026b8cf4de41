#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "curator/sampling.hpp"
#include "curator/synth.hpp"
#include "curator/util.hpp"

using namespace curator;
using namespace curator::sampling;

namespace {

SampleClip basic_clip(const std::string& id, double quality) {
  SampleClip c;
  c.clip_id = id;
  c.quality_sum = quality;
  return c;
}

CategoryLabels labels(const std::string& scene) {
  return {scene, "clear", "day", "sparse"};
}

bool is_partition(const std::vector<std::string>& input_sorted,
                  const SampleTrace& trace) {
  std::vector<std::string> merged;
  std::merge(trace.kept.begin(), trace.kept.end(), trace.removed.begin(),
             trace.removed.end(), std::back_inserter(merged));
  return merged == input_sorted;
}

}  // namespace

TEST_CASE("ceil_frac and floor_frac survive inexact binary fractions") {
  // 0.3 * 10 is 2.9999999999999996 in binary; the nudge keeps the intended
  // integer results.
  CHECK(ceil_frac(0.3, 10) == 3);
  CHECK(floor_frac(0.3, 10) == 3);
  CHECK(floor_frac(0.29, 100) == 29);
  CHECK(ceil_frac(0.7, 10) == 7);
  CHECK(floor_frac(0.7, 10) == 7);

  // Genuinely fractional products still round in the right direction.
  CHECK(ceil_frac(0.333, 10) == 4);
  CHECK(floor_frac(0.333, 10) == 3);
  CHECK(ceil_frac(0.75, 2) == 2);
  CHECK(floor_frac(0.75, 2) == 1);

  CHECK(ceil_frac(0.0, 10) == 0);
  CHECK(floor_frac(0.0, 10) == 0);
  CHECK(ceil_frac(1.0, 10) == 10);
  CHECK(floor_frac(1.0, 10) == 10);
  CHECK(ceil_frac(0.5, 0) == 0);

  // Brute comparison against exact rational arithmetic for k/100 fractions.
  for (int k = 0; k <= 100; ++k) {
    for (std::size_t n : {1u, 7u, 10u, 33u, 100u, 1000u}) {
      const std::size_t num = static_cast<std::size_t>(k) * n;
      CHECK(ceil_frac(k / 100.0, n) == (num + 99) / 100);
      CHECK(floor_frac(k / 100.0, n) == num / 100);
    }
  }
}

TEST_CASE("quality_sample keeps the top ceil(alpha*N) by score, ids break ties") {
  util::Rng rng(11);
  std::vector<SampleClip> clips;
  for (int i = 0; i < 200; ++i) {
    // Coarse scores so ties actually occur.
    clips.push_back(basic_clip(util::strformat("q%03d", i),
                               static_cast<double>(rng.next_index(20)) / 20.0));
  }
  const auto kept = quality_sample(clips, 0.7);
  REQUIRE(kept.size() == 140);
  CHECK(std::is_sorted(kept.begin(), kept.end()));

  // Oracle: sort a copy by (quality desc, id asc) and keep the prefix.
  auto sorted = clips;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (*a.quality_sum != *b.quality_sum) {
      return *a.quality_sum > *b.quality_sum;
    }
    return a.clip_id < b.clip_id;
  });
  std::set<std::string> expected;
  for (std::size_t i = 0; i < 140; ++i) {
    expected.insert(sorted[i].clip_id);
  }
  CHECK(std::set<std::string>(kept.begin(), kept.end()) == expected);

  clips[5].quality_sum.reset();
  CHECK_THROWS_WITH_AS(quality_sample(clips, 0.7),
                       "quality sampling: clips missing quality scores: q005",
                       std::runtime_error);
}

TEST_CASE("content sampling removes near-duplicates, not distinct clips") {
  // Four identical embeddings (highest quality) plus four mutually orthogonal
  // ones. The removal budget is floor(0.3 * 8) = 2 and both removals must come
  // out of the identical group: every walker's most similar neighbor is there.
  std::vector<SampleClip> clips;
  for (int i = 0; i < 4; ++i) {
    auto c = basic_clip(util::strformat("c0%d", i), 0.9 - 0.1 * i);
    c.country_code = "JP";
    c.embedding = {1, 0, 0, 0, 0};
    clips.push_back(c);
  }
  const double qualities[] = {0.5, 0.4, 0.3, 0.2};
  for (int i = 0; i < 4; ++i) {
    auto c = basic_clip(util::strformat("c1%d", i), qualities[i]);
    c.country_code = "JP";
    c.embedding = {0, 0, 0, 0, 0};
    c.embedding[1 + i] = 1.0;
    clips.push_back(c);
  }
  const auto kept =
      content_diversity_sample(clips, 0.7, std::nullopt, 1024, 50, 77);
  CHECK(kept == std::vector<std::string>{"c02", "c03", "c10", "c11", "c12", "c13"});
}

TEST_CASE("content sampling applies the budget per country") {
  util::Rng rng(123);
  std::vector<SampleClip> clips;
  const char* countries[] = {"JP", "FR", "BR"};
  const std::size_t sizes[] = {23, 10, 4};
  for (int ci = 0; ci < 3; ++ci) {
    for (std::size_t i = 0; i < sizes[ci]; ++i) {
      auto c = basic_clip(util::strformat("%s%03zu", countries[ci], i),
                          rng.next_double());
      c.country_code = countries[ci];
      c.embedding = {rng.next_double(), rng.next_double(), rng.next_double()};
      clips.push_back(c);
    }
  }
  // k = 1 puts every clip of a country into one cluster, so the removal walk
  // can always find a neighbor and the budget is met exactly.
  nlohmann::json diag;
  const auto kept =
      content_diversity_sample(clips, 0.7, 1, 1024, 50, 9, 1, &diag);
  std::map<std::string, std::size_t> kept_by_country;
  for (const auto& id : kept) {
    kept_by_country[id.substr(0, 2)] += 1;
  }
  CHECK(kept_by_country["JP"] == 23 - floor_frac(0.3, 23));
  CHECK(kept_by_country["FR"] == 10 - 3);
  CHECK(kept_by_country["BR"] == 4 - 1);
  CHECK(diag["countries"]["JP"]["removals"] == floor_frac(0.3, 23));
  CHECK(diag["countries"]["BR"]["clips"] == 4);

  // Same seed, same result; the walk is deterministic.
  CHECK(content_diversity_sample(clips, 0.7, 1, 1024, 50, 9) == kept);
}

TEST_CASE("location sampling: small cities contribute everything first") {
  // 100 clips in one city, 10 in another, alpha = 0.6: target is 66. The
  // smaller city is visited first (quota 33, takes its 10), then the larger
  // one absorbs the rest (quota 56).
  std::vector<SampleClip> clips;
  for (int i = 0; i < 100; ++i) {
    auto c = basic_clip(util::strformat("a%03d", i), i / 100.0);
    c.city_key = "AA/Alpha";
    clips.push_back(c);
  }
  for (int i = 0; i < 10; ++i) {
    auto c = basic_clip(util::strformat("b%03d", i), i / 10.0);
    c.city_key = "BB/Beta";
    clips.push_back(c);
  }
  nlohmann::json diag;
  const auto kept = location_diversity_sample(clips, 0.6, &diag);
  REQUIRE(kept.size() == 66);
  CHECK(diag["target"] == 66);
  CHECK(diag["cities"]["BB/Beta"]["quota"] == 33);
  CHECK(diag["cities"]["BB/Beta"]["taken"] == 10);
  CHECK(diag["cities"]["AA/Alpha"]["quota"] == 56);
  CHECK(diag["cities"]["AA/Alpha"]["taken"] == 56);

  std::size_t from_b = 0;
  for (const auto& id : kept) {
    from_b += id[0] == 'b';
  }
  CHECK(from_b == 10);
  // Within the big city the top 56 by quality survive: a099 down to a044.
  CHECK(std::find(kept.begin(), kept.end(), "a044") != kept.end());
  CHECK(std::find(kept.begin(), kept.end(), "a043") == kept.end());
}

TEST_CASE("location sampling never exceeds a city's quota") {
  util::Rng rng(5);
  std::vector<SampleClip> clips;
  for (int i = 0; i < 500; ++i) {
    auto c = basic_clip(util::strformat("l%03d", i), rng.next_double());
    c.city_key = util::strformat("CC/city%02zu", rng.next_index(17));
    clips.push_back(c);
  }
  nlohmann::json diag;
  const auto kept = location_diversity_sample(clips, 0.6, &diag);
  CHECK(kept.size() == ceil_frac(0.6, clips.size()));
  std::map<std::string, std::size_t> per_city;
  for (const auto& id : kept) {
    const auto& clip = *std::find_if(clips.begin(), clips.end(), [&](const auto& c) {
      return c.clip_id == id;
    });
    per_city[*clip.city_key] += 1;
  }
  for (const auto& [key, info] : diag["cities"].items()) {
    CHECK(per_city[key] == info["taken"].get<std::size_t>());
    CHECK(info["taken"].get<std::size_t>() <= info["quota"].get<std::size_t>());
    CHECK(info["taken"].get<std::size_t>() <= info["clips"].get<std::size_t>());
  }
}

TEST_CASE("category sampling flattens an 80/20 label skew") {
  // 80 "urban" vs 20 "rural" clips; inverse-frequency weights are 1.25 vs 5,
  // so a single draw lands on each group with probability 1/2. Monte Carlo
  // over seeds checks the implied per-clip ratio of 4.
  std::vector<SampleClip> clips;
  for (int i = 0; i < 100; ++i) {
    auto c = basic_clip(util::strformat("k%03d", i), 0.5);
    c.categories = labels(i < 80 ? "urban" : "rural");
    clips.push_back(c);
  }
  int rural_first = 0;
  const int trials = 50'000;
  for (int s = 0; s < trials; ++s) {
    const auto kept = category_diversity_sample(clips, 0.01, 1000 + s);
    REQUIRE(kept.size() == 1);
    rural_first += kept[0] >= "k080";
  }
  const double p = static_cast<double>(rural_first) / trials;
  CHECK(p > 0.485);  // ~6.7 sigma margins around 0.5
  CHECK(p < 0.515);

  // Determinism and label accounting.
  nlohmann::json diag;
  const auto kept_a = category_diversity_sample(clips, 0.6, 42, &diag);
  const auto kept_b = category_diversity_sample(clips, 0.6, 42);
  CHECK(kept_a == kept_b);
  CHECK(kept_a.size() == 60);
  CHECK(diag["label_counts"]["scene"]["urban"] == 80);
  CHECK(diag["label_counts"]["scene"]["rural"] == 20);
  CHECK(diag["label_counts"]["weather"]["clear"] == 100);

  clips[3].categories.reset();
  CHECK_THROWS_AS(category_diversity_sample(clips, 0.6, 42), std::runtime_error);
}

TEST_CASE("camera sampling follows the ascending-size quota recurrence") {
  // Groups of size 2, 4 and 10; alpha = 0.75 over 16 clips targets 12:
  // quotas 4 (takes 2), 5 (takes 4), 6 (takes 6).
  std::vector<SampleClip> clips;
  auto add = [&](const std::string& id, std::optional<int> dir,
                 std::optional<int> jit) {
    auto c = basic_clip(id, 0.5);
    c.direction_bin = dir;
    c.jitter_bin = jit;
    clips.push_back(c);
  };
  for (int i = 0; i < 2; ++i) add(util::strformat("g0_%02d", i), 0, 0);
  for (int i = 0; i < 4; ++i) add(util::strformat("g1_%02d", i), 1, 0);
  for (int i = 0; i < 10; ++i) add(util::strformat("g2_%02d", i), 2, 1);

  nlohmann::json diag;
  const auto kept = camera_diversity_sample(clips, 0.75, 3, &diag);
  CHECK(kept.size() == 12);
  CHECK(diag["target"] == 12);
  REQUIRE(diag["groups"].size() == 3);
  CHECK(diag["groups"][0]["clips"] == 2);
  CHECK(diag["groups"][0]["quota"] == 4);
  CHECK(diag["groups"][0]["taken"] == 2);
  CHECK(diag["groups"][1]["quota"] == 5);
  CHECK(diag["groups"][1]["taken"] == 4);
  CHECK(diag["groups"][2]["quota"] == 6);
  CHECK(diag["groups"][2]["taken"] == 6);

  CHECK(camera_diversity_sample(clips, 0.75, 3) == kept);
}

TEST_CASE("camera sampling pools clips without bins into one group") {
  std::vector<SampleClip> clips;
  for (int i = 0; i < 6; ++i) {
    auto c = basic_clip(util::strformat("m%02d", i), 0.5);
    if (i == 0) {
      c.direction_bin = 4;  // jitter missing: still unbinned
    }
    clips.push_back(c);
  }
  auto binned = basic_clip("m06", 0.5);
  binned.direction_bin = 2;
  binned.jitter_bin = 1;
  clips.push_back(binned);

  nlohmann::json diag;
  camera_diversity_sample(clips, 0.75, 1, &diag);
  REQUIRE(diag["groups"].size() == 2);
  CHECK(diag["groups"][0]["clips"] == 1);  // the binned clip
  CHECK(diag["groups"][1]["direction_bin"] == -1);
  CHECK(diag["groups"][1]["jitter_bin"] == -1);
  CHECK(diag["groups"][1]["clips"] == 6);
}

TEST_CASE("minibatch_kmeans is deterministic and assigns to nearest centers") {
  util::Rng rng(2024);
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 150; ++i) {
    // Three well-separated blobs.
    const double cx = (i % 3) * 10.0;
    points.push_back({cx + rng.next_double(), rng.next_double()});
  }
  const auto a = minibatch_kmeans(points, 3, 32, 40, 7);
  const auto b = minibatch_kmeans(points, 3, 32, 40, 7);
  CHECK(a.centers == b.centers);
  CHECK(a.assignments == b.assignments);
  REQUIRE(a.centers.size() == 3);

  for (std::size_t i = 0; i < points.size(); ++i) {
    double assigned = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < a.centers.size(); ++c) {
      double d = 0;
      for (std::size_t t = 0; t < 2; ++t) {
        d += (points[i][t] - a.centers[c][t]) * (points[i][t] - a.centers[c][t]);
      }
      if (c == static_cast<std::size_t>(a.assignments[i])) {
        assigned = d;
      }
      best = std::min(best, d);
    }
    CHECK(assigned <= best + 1e-12);
  }

  // k is clamped to the point count.
  const auto tiny = minibatch_kmeans({{0.0}, {1.0}}, 8, 4, 10, 1);
  CHECK(tiny.centers.size() == 2);
  CHECK(minibatch_kmeans({}, 3, 4, 10, 1).centers.empty());
}

TEST_CASE("run_sampling composes the five stages and keeps clean traces") {
  const auto clips = synth::make_annotated_clips(1000, 31);
  SamplingConfig cfg;
  cfg.seed = 99;
  const auto result = run_sampling(clips, cfg, 1);

  REQUIRE(result.traces.size() == 5);
  CHECK(result.traces[0].stage == "quality");
  CHECK(result.traces[4].stage == "camera");

  // The stages chain: each trace partitions the previous kept set.
  std::vector<std::string> current;
  for (const auto& c : clips) {
    current.push_back(c.clip_id);
  }
  std::sort(current.begin(), current.end());
  for (const auto& trace : result.traces) {
    CHECK(is_partition(current, trace));
    current = trace.kept;
  }
  CHECK(result.kept == result.traces.back().kept);

  // Composed retention lands near 0.1323 N (the alpha product), within the
  // rounding slack the stage quotas can introduce.
  const double expected = 0.7 * 0.7 * 0.6 * 0.6 * 0.75 * 1000;
  CHECK(std::abs(static_cast<double>(result.kept.size()) - expected) <= 46);

  // Scheduling must not leak into results.
  const auto parallel = run_sampling(clips, cfg, 3);
  CHECK(parallel.kept == result.kept);
  REQUIRE(parallel.traces.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(parallel.traces[i].kept == result.traces[i].kept);
    CHECK(parallel.traces[i].removed == result.traces[i].removed);
    CHECK(parallel.traces[i].seed == result.traces[i].seed);
  }

  // A different master seed reshuffles the seeded stages.
  SamplingConfig other = cfg;
  other.seed = 100;
  CHECK(run_sampling(clips, other, 1).kept != result.kept);
}

TEST_CASE("run_sampling rejects duplicate ids and reports partial traces") {
  auto clips = synth::make_annotated_clips(20, 3);
  clips.push_back(clips.front());
  SamplingConfig cfg;
  CHECK_THROWS_WITH_AS(run_sampling(clips, cfg, 1),
                       "sampling: duplicate clip id clip0000000",
                       std::runtime_error);

  auto broken = synth::make_annotated_clips(20, 3);
  for (auto& c : broken) {
    c.city_key.reset();  // trips stage 3 after two stages succeeded
  }
  try {
    run_sampling(broken, cfg, 1);
    FAIL("expected SamplingError");
  } catch (const SamplingError& e) {
    CHECK(e.partial_traces.size() == 2);
    CHECK(e.partial_traces[0].stage == "quality");
    CHECK(e.partial_traces[1].stage == "content");
    CHECK(std::string(e.what()).find("location sampling") != std::string::npos);
  }
}
