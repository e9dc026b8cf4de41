#include "curator/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "curator/util.hpp"

namespace curator::config {

namespace {

using nlohmann::json;

// Tracks one object level during parsing: typed getters record issues under
// dotted field paths and remember which keys were consumed so unknown fields
// can be flagged.
class Section {
 public:
  Section(const json* obj, std::string prefix, std::vector<ConfigIssue>* issues)
      : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {}

  ~Section() {
    if (!obj_) {
      return;
    }
    for (const auto& [key, value] : obj_->items()) {
      if (!known_.contains(key)) {
        issue(key, "unknown field");
      }
    }
  }

  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  bool present(const std::string& key) const { return obj_ && obj_->contains(key); }

  void issue(const std::string& key, const std::string& message) {
    issues_->push_back({path(key), message});
  }

  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  const json* object(const std::string& key) {
    known_.insert(key);
    if (!present(key)) {
      return nullptr;
    }
    const json& v = (*obj_)[key];
    if (!v.is_object()) {
      issue(key, "expected an object");
      return nullptr;
    }
    return &v;
  }

  void number(const std::string& key, double* out, double lo, double hi,
              bool lo_open = false) {
    known_.insert(key);
    if (!present(key)) {
      return;
    }
    const json& v = (*obj_)[key];
    if (!v.is_number()) {
      issue(key, "expected a number");
      return;
    }
    const double d = v.get<double>();
    if (!std::isfinite(d) || d < lo || d > hi || (lo_open && d <= lo)) {
      issue(key, util::strformat("must be in %s%g, %g]", lo_open ? "(" : "[", lo, hi));
      return;
    }
    *out = d;
  }

  void seconds_as_millis(const std::string& key, Millis* out, double lo, double hi) {
    double s = static_cast<double>(*out) / 1000.0;
    number(key, &s, lo, hi);
    *out = millis_from_seconds(s);
  }

  void integer(const std::string& key, int* out, int lo, int hi) {
    known_.insert(key);
    if (!present(key)) {
      return;
    }
    const json& v = (*obj_)[key];
    if (!v.is_number_integer()) {
      issue(key, "expected an integer");
      return;
    }
    const auto i = v.get<std::int64_t>();
    if (i < lo || i > hi) {
      issue(key, util::strformat("must be in [%d, %d]", lo, hi));
      return;
    }
    *out = static_cast<int>(i);
  }

  void uint64(const std::string& key, std::uint64_t* out) {
    known_.insert(key);
    if (!present(key)) {
      return;
    }
    const json& v = (*obj_)[key];
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      issue(key, "expected a non-negative integer");
      return;
    }
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
      issue(key, "expected a non-negative integer");
      return;
    }
    *out = v.get<std::uint64_t>();
  }

  void boolean(const std::string& key, bool* out) {
    known_.insert(key);
    if (!present(key)) {
      return;
    }
    const json& v = (*obj_)[key];
    if (!v.is_boolean()) {
      issue(key, "expected a boolean");
      return;
    }
    *out = v.get<bool>();
  }

  void string(const std::string& key, std::string* out) {
    known_.insert(key);
    if (!present(key)) {
      return;
    }
    const json& v = (*obj_)[key];
    if (!v.is_string()) {
      issue(key, "expected a string");
      return;
    }
    *out = v.get<std::string>();
  }

  void string_list(const std::string& key, std::vector<std::string>* out) {
    known_.insert(key);
    if (!present(key)) {
      return;
    }
    const json& v = (*obj_)[key];
    if (!v.is_array()) {
      issue(key, "expected an array of strings");
      return;
    }
    std::vector<std::string> items;
    for (const json& e : v) {
      if (!e.is_string() || e.get<std::string>().empty()) {
        issue(key, "expected an array of non-empty strings");
        return;
      }
      items.push_back(e.get<std::string>());
    }
    *out = std::move(items);
  }

 private:
  const json* obj_;
  std::string prefix_;
  std::vector<ConfigIssue>* issues_;
  std::set<std::string> known_;
};

void parse_segmenter(Section& root, segment::SegmenterConfig* out,
                     std::vector<ConfigIssue>* issues) {
  const json* obj = root.object("segmenter");
  Section s(obj, "segmenter", issues);
  s.number("boundary_threshold", &out->boundary_threshold, 0.0, 1.0);
  s.seconds_as_millis("head_tail_trim_s", &out->head_tail_trim_ms, 0.0, 86'400.0);
  s.seconds_as_millis("shot_trim_s", &out->shot_trim_ms, 0.0, 3'600.0);
  s.seconds_as_millis("clip_len_s", &out->clip_len_ms, 1.0, 3'600.0);
}

void parse_filters(Section& root, filters::FilterConfig* out,
                   FilterStageOptions* options, std::vector<ConfigIssue>* issues) {
  const json* obj = root.object("filters");
  Section s(obj, "filters", issues);
  s.number("luma_low", &out->luma_low, 0.0, 255.0);
  s.number("luma_high", &out->luma_high, 0.0, 255.0);
  s.integer("luma_run_len", &out->luma_run_len, 1, 1'000'000);
  s.number("quality_drop_frac", &out->quality_drop_frac, 0.0, 1.0, true);
  s.number("subtitle_min_visible_s", &out->subtitle_min_visible_s, 0.0, 60.0, true);
  s.number("subtitle_region_frac", &out->subtitle_region_frac, 0.0, 1.0, true);
  s.number("reversal_angle_deg", &out->reversal_angle_deg, 0.0, 180.0, true);
  s.number("reversal_window_s", &out->reversal_window_s, 0.0, 3'600.0, true);
  s.integer("reversal_min_count", &out->reversal_min_count, 1, 1'000'000);
  s.number("viewpoint_shift_deg", &out->viewpoint_shift_deg, 0.0, 180.0, true);
  s.number("displacement_factor", &out->displacement_factor, 0.0, 1e9, true);
  s.integer("displacement_window_frames", &out->displacement_window_frames, 2,
            1'000'000);
  s.boolean("luma_on_real", &options->luma_on_real);
  s.boolean("luma_on_game", &options->luma_on_game);
  s.boolean("trajectory_only_annotated", &options->trajectory_only_annotated);
  if (out->quality_drop_frac >= 1.0) {
    s.issue("quality_drop_frac", "must be in (0, 1)");
  }
  if (out->subtitle_region_frac >= 1.0) {
    s.issue("subtitle_region_frac", "must be in (0, 1)");
  }
  if (out->luma_low >= out->luma_high) {
    s.issue("luma_low", "must be below luma_high");
  }
}

void parse_sampling(Section& root, sampling::SamplingConfig* out,
                    std::vector<ConfigIssue>* issues) {
  const json* obj = root.object("sampling");
  Section s(obj, "sampling", issues);
  s.number("alpha_quality", &out->alpha_quality, 0.0, 1.0, true);
  s.number("alpha_content", &out->alpha_content, 0.0, 1.0, true);
  s.number("alpha_location", &out->alpha_location, 0.0, 1.0, true);
  s.number("alpha_category", &out->alpha_category, 0.0, 1.0, true);
  s.number("alpha_camera", &out->alpha_camera, 0.0, 1.0, true);
  if (s.present("kmeans_k")) {
    int k = 0;
    s.integer("kmeans_k", &k, 1, 1'000'000);
    if (k > 0) {
      out->kmeans_k = static_cast<std::uint32_t>(k);
    }
  }
  int batch = static_cast<int>(out->kmeans_batch);
  int iters = static_cast<int>(out->kmeans_iterations);
  s.integer("kmeans_batch", &batch, 1, 1'000'000);
  s.integer("kmeans_iterations", &iters, 1, 1'000'000);
  out->kmeans_batch = static_cast<std::uint32_t>(batch);
  out->kmeans_iterations = static_cast<std::uint32_t>(iters);
  s.integer("azimuth_bins", &out->azimuth_bins, 1, 4096);
  s.integer("elevation_bins", &out->elevation_bins, 1, 4096);
  s.integer("jitter_bins", &out->jitter_bins, 1, 4096);
}

void parse_report(Section& root, report::ReportConfig* out,
                  std::vector<ConfigIssue>* issues) {
  const json* obj = root.object("report");
  Section s(obj, "report", issues);
  s.number("quality_bin_width", &out->quality_bin_width, 0.0, 1.0, true);
  s.integer("caption_token_bin_width", &out->caption_token_bin_width, 1, 100'000);
  s.integer("jitter_bins", &out->jitter_bins, 1, 4096);
}

void parse_provider(Section& root, ProviderConfig* out,
                    const std::filesystem::path& base_dir,
                    std::vector<ConfigIssue>* issues) {
  const json* obj = root.object("provider");
  Section s(obj, "provider", issues);
  std::string mode = out->mode == ProviderConfig::Mode::kFixture ? "fixture" : "http";
  s.string("mode", &mode);
  if (mode == "fixture") {
    out->mode = ProviderConfig::Mode::kFixture;
  } else if (mode == "http") {
    out->mode = ProviderConfig::Mode::kHttp;
  } else {
    s.issue("mode", "must be 'fixture' or 'http'");
  }
  std::string fixture_dir = out->fixture_dir.string();
  s.string("fixture_dir", &fixture_dir);
  if (!fixture_dir.empty()) {
    out->fixture_dir = std::filesystem::path(fixture_dir).is_absolute()
                           ? std::filesystem::path(fixture_dir)
                           : base_dir / fixture_dir;
  }
  s.string("endpoint", &out->endpoint);
  s.integer("max_attempts", &out->max_attempts, 1, 100);
  s.integer("base_backoff_ms", &out->base_backoff_ms, 0, 60'000);

  if (out->mode == ProviderConfig::Mode::kFixture) {
    if (out->fixture_dir.empty()) {
      s.issue("fixture_dir", "required when mode is 'fixture'");
    } else if (!std::filesystem::is_directory(out->fixture_dir)) {
      s.issue("fixture_dir", "directory does not exist: " + out->fixture_dir.string());
    }
  } else if (out->endpoint.empty()) {
    s.issue("endpoint", "required when mode is 'http'");
  }
}

void parse_vocabulary(Section& root, LabelVocabulary* out,
                      std::vector<ConfigIssue>* issues) {
  const json* obj = root.object("vocabulary");
  Section s(obj, "vocabulary", issues);
  std::vector<std::string>* dims[] = {&out->scene, &out->weather, &out->time_of_day,
                                      &out->crowd_density};
  for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
    std::vector<std::string> labels;
    s.string_list(std::string(kCategoryDimensions[d]), &labels);
    if (!labels.empty()) {
      *dims[d] = labels;
    }
  }
}

}  // namespace

ConfigResult parse_config(const json& root, const std::filesystem::path& base_dir) {
  ConfigResult result;
  if (!root.is_object()) {
    result.issues.push_back({"", "config document must be a JSON object"});
    return result;
  }
  PipelineConfig cfg;
  auto* issues = &result.issues;
  {
    Section s(&root, "", issues);

    std::string workspace;
    s.string("workspace", &workspace);
    if (workspace.empty()) {
      s.issue("workspace", "required");
    } else {
      cfg.workspace = std::filesystem::path(workspace).is_absolute()
                          ? std::filesystem::path(workspace)
                          : base_dir / workspace;
    }

    std::string input_manifest;
    s.string("input_manifest", &input_manifest);
    if (!input_manifest.empty()) {
      cfg.input_manifest = std::filesystem::path(input_manifest).is_absolute()
                               ? std::filesystem::path(input_manifest)
                               : base_dir / input_manifest;
      if (!std::filesystem::exists(cfg.input_manifest)) {
        s.issue("input_manifest", "file does not exist: " + cfg.input_manifest.string());
      }
    }

    int parallelism = static_cast<int>(cfg.parallelism);
    s.integer("parallelism", &parallelism, 1, 4096);
    cfg.parallelism = static_cast<unsigned>(parallelism);
    s.uint64("seed", &cfg.seed);

    std::vector<std::string> stages;
    s.string_list("stages", &stages);
    if (!stages.empty()) {
      std::size_t cursor = 0;
      bool ok = true;
      for (const std::string& stage : stages) {
        const auto it =
            std::find(kCanonicalStages.begin() + static_cast<std::ptrdiff_t>(cursor),
                      kCanonicalStages.end(), stage);
        if (it == kCanonicalStages.end()) {
          const bool known = std::find(kCanonicalStages.begin(), kCanonicalStages.end(),
                                       stage) != kCanonicalStages.end();
          s.issue("stages", known ? "stage '" + stage + "' out of canonical order"
                                  : "unknown stage '" + stage + "'");
          ok = false;
          break;
        }
        cursor = static_cast<std::size_t>(it - kCanonicalStages.begin()) + 1;
      }
      if (ok) {
        cfg.stages = stages;
      }
    }

    parse_segmenter(s, &cfg.segmenter, issues);
    parse_filters(s, &cfg.filters, &cfg.filter_options, issues);
    parse_sampling(s, &cfg.sampling, issues);
    parse_report(s, &cfg.report, issues);
    parse_provider(s, &cfg.provider, base_dir, issues);
    parse_vocabulary(s, &cfg.vocabulary, issues);
  }

  cfg.sampling.seed = cfg.seed;
  if (result.issues.empty()) {
    result.config = std::move(cfg);
  }
  return result;
}

ConfigResult load_config(const std::filesystem::path& path) {
  ConfigResult result;
  std::string text;
  try {
    text = util::read_file(path);
  } catch (const std::exception& e) {
    result.issues.push_back({"", e.what()});
    return result;
  }
  const json root = json::parse(text, nullptr, false);
  if (root.is_discarded()) {
    result.issues.push_back({"", "config is not valid JSON: " + path.string()});
    return result;
  }
  return parse_config(root, path.parent_path());
}

json config_to_json(const PipelineConfig& config) {
  json j;
  j["workspace"] = config.workspace.string();
  if (!config.input_manifest.empty()) {
    j["input_manifest"] = config.input_manifest.string();
  }
  j["parallelism"] = config.parallelism;
  j["seed"] = config.seed;
  j["stages"] = config.stages;
  j["segmenter"] = {
      {"boundary_threshold", config.segmenter.boundary_threshold},
      {"head_tail_trim_s", seconds_from_millis(config.segmenter.head_tail_trim_ms)},
      {"shot_trim_s", seconds_from_millis(config.segmenter.shot_trim_ms)},
      {"clip_len_s", seconds_from_millis(config.segmenter.clip_len_ms)},
  };
  j["filters"] = {
      {"luma_low", config.filters.luma_low},
      {"luma_high", config.filters.luma_high},
      {"luma_run_len", config.filters.luma_run_len},
      {"quality_drop_frac", config.filters.quality_drop_frac},
      {"subtitle_min_visible_s", config.filters.subtitle_min_visible_s},
      {"subtitle_region_frac", config.filters.subtitle_region_frac},
      {"reversal_angle_deg", config.filters.reversal_angle_deg},
      {"reversal_window_s", config.filters.reversal_window_s},
      {"reversal_min_count", config.filters.reversal_min_count},
      {"viewpoint_shift_deg", config.filters.viewpoint_shift_deg},
      {"displacement_factor", config.filters.displacement_factor},
      {"displacement_window_frames", config.filters.displacement_window_frames},
      {"luma_on_real", config.filter_options.luma_on_real},
      {"luma_on_game", config.filter_options.luma_on_game},
      {"trajectory_only_annotated", config.filter_options.trajectory_only_annotated},
  };
  j["sampling"] = {
      {"alpha_quality", config.sampling.alpha_quality},
      {"alpha_content", config.sampling.alpha_content},
      {"alpha_location", config.sampling.alpha_location},
      {"alpha_category", config.sampling.alpha_category},
      {"alpha_camera", config.sampling.alpha_camera},
      {"kmeans_batch", config.sampling.kmeans_batch},
      {"kmeans_iterations", config.sampling.kmeans_iterations},
      {"azimuth_bins", config.sampling.azimuth_bins},
      {"elevation_bins", config.sampling.elevation_bins},
      {"jitter_bins", config.sampling.jitter_bins},
  };
  if (config.sampling.kmeans_k) {
    j["sampling"]["kmeans_k"] = *config.sampling.kmeans_k;
  }
  j["report"] = {
      {"quality_bin_width", config.report.quality_bin_width},
      {"caption_token_bin_width", config.report.caption_token_bin_width},
      {"jitter_bins", config.report.jitter_bins},
  };
  j["provider"] = {
      {"mode", config.provider.mode == ProviderConfig::Mode::kFixture ? "fixture"
                                                                      : "http"},
      {"max_attempts", config.provider.max_attempts},
      {"base_backoff_ms", config.provider.base_backoff_ms},
  };
  if (!config.provider.fixture_dir.empty()) {
    j["provider"]["fixture_dir"] = config.provider.fixture_dir.string();
  }
  if (!config.provider.endpoint.empty()) {
    j["provider"]["endpoint"] = config.provider.endpoint;
  }
  json vocab;
  for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
    vocab[std::string(kCategoryDimensions[d])] = config.vocabulary.dimension(d);
  }
  j["vocabulary"] = std::move(vocab);
  return j;
}

}  // namespace curator::config
