#include "curator/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

#include <json.hpp>

#include "curator/util.hpp"

namespace curator::report {

namespace {

using nlohmann::json;

json histogram_to_json(const Histogram& h) {
  json bins = json::array();
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    bins.push_back({{"label", h.bin_labels[i]}, {"count", h.counts[i]}});
  }
  return {{"name", h.name}, {"bins", std::move(bins)}, {"total", h.total()}};
}

std::string histogram_to_tsv(const Histogram& h) {
  std::string out;
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out += h.bin_labels[i];
    out += '\t';
    out += std::to_string(h.counts[i]);
    out += '\n';
  }
  return out;
}

void append_unannotated(Histogram& h, std::size_t count) {
  h.bin_labels.emplace_back(kUnannotatedBucket);
  h.counts.push_back(count);
}

}  // namespace

std::size_t token_count(std::string_view caption) {
  std::size_t count = 0;
  bool in_token = false;
  for (const char ch : caption) {
    const bool space = std::isspace(static_cast<unsigned char>(ch)) != 0;
    if (!space && !in_token) {
      ++count;
    }
    in_token = !space;
  }
  return count;
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

CorpusReport build_report(const Manifest& manifest,
                          const std::vector<traj::TrajectorySummary>& summaries,
                          const ReportConfig& config) {
  CorpusReport out;

  std::unordered_map<std::string, const traj::TrajectorySummary*> by_clip;
  for (const auto& s : summaries) {
    by_clip[s.clip_id] = &s;
  }

  std::map<std::string, CountryStat> countries;
  std::array<std::map<std::string, std::size_t>, 4> label_counts;
  std::size_t quality_missing = 0;
  std::size_t caption_missing = 0;
  std::size_t jitter_missing = 0;
  std::vector<double> quality_values;
  std::vector<std::size_t> caption_tokens;
  std::vector<double> jitter_values;
  Millis total_ms = 0;

  for (const ClipRecord& clip : manifest.clips) {
    if (!clip.active()) {
      continue;
    }
    ++out.active_clips;
    total_ms += clip.duration_ms();

    const std::string cc = clip.location ? clip.location->country_code : "??";
    CountryStat& stat = countries[cc];
    stat.country_code = cc;
    stat.duration_ms += clip.duration_ms();
    stat.clips += 1;

    for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
      const std::string label =
          clip.categories ? clip.categories->dimension(d)
                          : std::string(kUnannotatedBucket);
      label_counts[d][label] += 1;
    }

    if (clip.scores) {
      quality_values.push_back(
          (clip.scores->technical + clip.scores->aesthetic + clip.scores->semantic) /
          3.0);
    } else {
      ++quality_missing;
    }

    if (clip.caption) {
      caption_tokens.push_back(token_count(*clip.caption));
    } else {
      ++caption_missing;
    }

    const auto it = by_clip.find(clip.clip_id);
    if (it != by_clip.end()) {
      jitter_values.push_back(it->second->jitter);
    } else {
      ++jitter_missing;
    }
  }

  out.total_duration_h = static_cast<double>(total_ms) / 3'600'000.0;
  for (auto& [cc, stat] : countries) {
    out.countries.push_back(stat);
  }

  for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
    Histogram h;
    h.name = std::string(kCategoryDimensions[d]);
    for (const auto& [label, count] : label_counts[d]) {
      h.bin_labels.push_back(label);
      h.counts.push_back(count);
    }
    out.label_histograms.push_back(std::move(h));
  }

  // Quality: fixed-width bins over [0, 1]; the top edge closes the last bin.
  {
    Histogram h;
    h.name = "quality";
    const int bins =
        std::max(1, static_cast<int>(std::ceil(1.0 / config.quality_bin_width - 1e-9)));
    h.bin_labels.reserve(static_cast<std::size_t>(bins) + 1);
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    for (int b = 0; b < bins; ++b) {
      h.bin_labels.push_back(util::strformat("%.2f-%.2f", b * config.quality_bin_width,
                                             (b + 1) * config.quality_bin_width));
    }
    for (const double v : quality_values) {
      int b = static_cast<int>(std::floor(v / config.quality_bin_width));
      b = std::clamp(b, 0, bins - 1);
      h.counts[static_cast<std::size_t>(b)] += 1;
    }
    append_unannotated(h, quality_missing);
    out.quality = std::move(h);
  }

  // Caption tokens: fixed-width bins sized to the observed maximum.
  {
    Histogram h;
    h.name = "caption_tokens";
    const std::size_t width =
        static_cast<std::size_t>(std::max(1, config.caption_token_bin_width));
    const std::size_t max_tokens =
        caption_tokens.empty()
            ? 0
            : *std::max_element(caption_tokens.begin(), caption_tokens.end());
    const std::size_t bins = caption_tokens.empty() ? 0 : max_tokens / width + 1;
    h.counts.assign(bins, 0);
    for (std::size_t b = 0; b < bins; ++b) {
      h.bin_labels.push_back(
          util::strformat("%zu-%zu", b * width, (b + 1) * width - 1));
    }
    for (const std::size_t t : caption_tokens) {
      h.counts[t / width] += 1;
    }
    append_unannotated(h, caption_missing);
    out.caption_tokens = std::move(h);
  }

  // Jitter: data-driven decile edges over the active corpus, frozen into the
  // report so downstream consumers can reproduce the binning.
  {
    out.jitter_edges = traj::jitter_bin_edges(jitter_values, config.jitter_bins);
    Histogram h;
    h.name = "jitter";
    const std::size_t bins = out.jitter_edges.size() + 1;
    h.counts.assign(jitter_values.empty() ? 0 : bins, 0);
    if (!jitter_values.empty()) {
      for (std::size_t b = 0; b < bins; ++b) {
        h.bin_labels.push_back(util::strformat("bin%02zu", b));
      }
      for (const double v : jitter_values) {
        h.counts[static_cast<std::size_t>(traj::jitter_bin(v, out.jitter_edges))] += 1;
      }
    }
    append_unannotated(h, jitter_missing);
    out.jitter = std::move(h);
  }

  return out;
}

std::string report_to_json_string(const CorpusReport& report) {
  json j;
  j["active_clips"] = report.active_clips;
  j["total_duration_h"] = report.total_duration_h;
  json countries = json::array();
  for (const CountryStat& c : report.countries) {
    countries.push_back({{"country", c.country_code},
                         {"duration_h", static_cast<double>(c.duration_ms) / 3'600'000.0},
                         {"clips", c.clips}});
  }
  j["countries"] = std::move(countries);
  json labels = json::object();
  for (const Histogram& h : report.label_histograms) {
    labels[h.name] = histogram_to_json(h);
  }
  j["label_histograms"] = std::move(labels);
  j["quality"] = histogram_to_json(report.quality);
  j["caption_tokens"] = histogram_to_json(report.caption_tokens);
  j["jitter"] = histogram_to_json(report.jitter);
  j["jitter_edges"] = report.jitter_edges;
  return j.dump(2) + "\n";
}

void write_report(const CorpusReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  util::atomic_write_file(dir / "report.json", report_to_json_string(report));
  std::vector<const Histogram*> all;
  for (const Histogram& h : report.label_histograms) {
    all.push_back(&h);
  }
  all.push_back(&report.quality);
  all.push_back(&report.caption_tokens);
  all.push_back(&report.jitter);
  for (const Histogram* h : all) {
    util::atomic_write_file(dir / ("hist_" + h->name + ".tsv"), histogram_to_tsv(*h));
  }
}

}  // namespace curator::report
