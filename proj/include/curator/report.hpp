#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "curator/manifest.hpp"
#include "curator/trajectory.hpp"

namespace curator::report {

struct ReportConfig {
  double quality_bin_width = 0.05;  // over [0, 1]
  int caption_token_bin_width = 20;
  int jitter_bins = 10;
};

// Number of maximal whitespace-separated runs.
std::size_t token_count(std::string_view caption);

// Clips that lack the statistic a histogram measures are counted under this
// label instead of being dropped, so histogram mass always equals the active
// clip count.
inline constexpr std::string_view kUnannotatedBucket = "unannotated";

struct Histogram {
  std::string name;
  std::vector<std::string> bin_labels;
  std::vector<std::size_t> counts;  // same length as bin_labels

  std::size_t total() const;
};

struct CountryStat {
  std::string country_code;  // "??" = active clip without a location
  Millis duration_ms = 0;
  std::size_t clips = 0;
};

struct CorpusReport {
  std::size_t active_clips = 0;
  double total_duration_h = 0;
  std::vector<CountryStat> countries;     // sorted by country code
  std::vector<Histogram> label_histograms;  // one per category dimension
  Histogram quality;        // mean of technical/aesthetic/semantic
  Histogram caption_tokens;
  Histogram jitter;
  std::vector<double> jitter_edges;  // frozen data-driven decile edges
};

// Pure function of (manifest, summaries, config): permutation-invariant and
// rerun-stable. Only active clips contribute.
CorpusReport build_report(const Manifest& manifest,
                          const std::vector<traj::TrajectorySummary>& summaries,
                          const ReportConfig& config);

std::string report_to_json_string(const CorpusReport& report);

// Writes <dir>/report.json plus one flat "<label>\t<count>" TSV per histogram
// (hist_<name>.tsv) for external plotting.
void write_report(const CorpusReport& report, const std::filesystem::path& dir);

}  // namespace curator::report
