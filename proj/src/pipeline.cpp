#include "curator/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <unordered_map>
#include <unordered_set>

#include "curator/filters.hpp"
#include "curator/location.hpp"
#include "curator/manifest_io.hpp"
#include "curator/report.hpp"
#include "curator/sampling.hpp"
#include "curator/segmenter.hpp"
#include "curator/util.hpp"

namespace curator::pipeline {

namespace {

using nlohmann::json;

constexpr std::string_view kTrajectoryDir = "artifacts/trajectories";
constexpr std::string_view kEmbeddingArtifact = "artifacts/embeddings.jsonl";

json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics) {
  json out = json::array();
  for (const Diagnostic& d : diagnostics) {
    out.push_back({{"line", d.line}, {"record", d.record_id}, {"message", d.message}});
  }
  return out;
}

std::size_t expected_frame_count(Millis duration_ms, double fps) {
  return static_cast<std::size_t>(
      std::llround(seconds_from_millis(duration_ms) * fps));
}

// Which stage feeds each stage; collect reads the external input manifest.
const std::map<std::string, std::string> kUpstream = {
    {"segment", "collect"},       {"filter", "segment"},
    {"annotate-match", "filter"}, {"sample", "annotate-match"},
    {"report", "sample"},
};

}  // namespace

std::shared_ptr<providers::CachingProvider> make_provider(
    const config::ProviderConfig& config) {
  std::shared_ptr<providers::Provider> base;
  if (const char* endpoint = std::getenv("CURATE_PROVIDER_ENDPOINT");
      endpoint != nullptr && *endpoint != '\0') {
    base = std::make_shared<providers::HttpProvider>(endpoint, config.max_attempts,
                                                     config.base_backoff_ms);
  } else if (config.mode == config::ProviderConfig::Mode::kHttp) {
    base = std::make_shared<providers::HttpProvider>(
        config.endpoint, config.max_attempts, config.base_backoff_ms);
  } else {
    base = std::make_shared<providers::FixtureProvider>(config.fixture_dir);
  }
  return std::make_shared<providers::CachingProvider>(std::move(base));
}

Pipeline::Pipeline(config::PipelineConfig config)
    : cfg_(std::move(config)),
      provider_(make_provider(cfg_.provider)),
      store_((std::filesystem::create_directories(cfg_.workspace),
              cfg_.workspace / "checkpoints.json")) {
  std::filesystem::create_directories(cfg_.workspace / "manifests");
  std::filesystem::create_directories(cfg_.workspace / kTrajectoryDir);
  std::filesystem::create_directories(cfg_.workspace / "reports");
}

std::filesystem::path Pipeline::stage_output(const std::string& stage) const {
  if (stage == "collect") {
    return cfg_.workspace / "manifests" / "collected.jsonl";
  }
  if (stage == "segment") {
    return cfg_.workspace / "manifests" / "segmented.jsonl";
  }
  if (stage == "filter") {
    return cfg_.workspace / "manifests" / "filtered.jsonl";
  }
  if (stage == "annotate-match") {
    return cfg_.workspace / "manifests" / "matched.jsonl";
  }
  if (stage == "sample") {
    return cfg_.workspace / "manifests" / "sampled.jsonl";
  }
  if (stage == "report") {
    return cfg_.workspace / "reports" / "report.json";
  }
  throw std::invalid_argument("unknown stage: " + stage);
}

std::filesystem::path Pipeline::stage_input(const std::string& stage) const {
  if (stage == "collect") {
    return cfg_.input_manifest;  // may be empty: start from an empty manifest
  }
  return stage_output(kUpstream.at(stage));
}

std::string Pipeline::stage_digest(const std::string& stage,
                                   const std::string& input_bytes) const {
  json subtree;
  const json full = config::config_to_json(cfg_);
  if (stage == "collect") {
    subtree = {{"provider", full["provider"]}};
  } else if (stage == "segment") {
    subtree = {{"segmenter", full["segmenter"]}, {"provider", full["provider"]}};
  } else if (stage == "filter") {
    subtree = {{"filters", full["filters"]}, {"provider", full["provider"]}};
  } else if (stage == "annotate-match") {
    subtree = {{"vocabulary", full["vocabulary"]}, {"provider", full["provider"]}};
  } else if (stage == "sample") {
    subtree = {{"sampling", full["sampling"]}, {"seed", cfg_.seed}};
  } else if (stage == "report") {
    subtree = {{"report", full["report"]}};
  }
  std::uint64_t h = util::fnv1a64(input_bytes);
  h = util::fnv1a64(subtree.dump(), h);
  h = util::fnv1a64(stage, h);
  return util::hex64(h);
}

Manifest Pipeline::parse_stage_input(const std::string& stage,
                                     const std::string& bytes,
                                     json* details) const {
  auto loaded = manifest_from_string(bytes);
  if (stage == "collect") {
    // External input: problems are reported, offending records dropped.
    (*details)["input_diagnostics"] = diagnostics_to_json(loaded.diagnostics);
    return std::move(loaded.manifest);
  }
  if (!loaded.diagnostics.empty()) {
    throw std::runtime_error("corrupt intermediate manifest for stage '" + stage +
                             "': " + loaded.diagnostics.front().message);
  }
  return std::move(loaded.manifest);
}

std::vector<StageResult> Pipeline::run(std::vector<std::string> stages) {
  if (stages.empty()) {
    stages = cfg_.stages;
  }
  // Enforce canonical order and config enablement.
  std::size_t cursor = 0;
  for (const std::string& stage : stages) {
    const auto it = std::find(config::kCanonicalStages.begin() + cursor,
                              config::kCanonicalStages.end(), stage);
    if (it == config::kCanonicalStages.end()) {
      throw std::invalid_argument("stage '" + stage +
                                  "' unknown or out of canonical order");
    }
    cursor = static_cast<std::size_t>(it - config::kCanonicalStages.begin()) + 1;
    if (std::find(cfg_.stages.begin(), cfg_.stages.end(), stage) ==
        cfg_.stages.end()) {
      throw std::invalid_argument("stage '" + stage + "' is disabled in the config");
    }
  }
  std::vector<StageResult> results;
  for (const std::string& stage : stages) {
    results.push_back(run_stage(stage));
  }
  return results;
}

StageResult Pipeline::run_stage(const std::string& stage) {
  StageResult result;
  result.stage = stage;

  const std::filesystem::path input_path = stage_input(stage);
  std::string input_bytes;
  if (!input_path.empty() && std::filesystem::exists(input_path)) {
    input_bytes = util::read_file(input_path);
  } else if (stage != "collect") {
    throw std::runtime_error("input manifest missing for stage '" + stage +
                             "': " + input_path.string() + " (run '" +
                             kUpstream.at(stage) + "' first)");
  }

  const std::string digest = stage_digest(stage, input_bytes);
  const std::filesystem::path output = stage_output(stage);
  if (const auto cp = store_.get(stage);
      cp && cp->complete && cp->input_digest == digest &&
      std::filesystem::exists(cfg_.workspace / cp->output_path)) {
    result.skipped = true;
    return result;
  }

  Manifest in = parse_stage_input(stage, input_bytes, &result.details);
  if (stage == "collect") {
    save_manifest(stage_collect(std::move(in), &result.details), output);
  } else if (stage == "segment") {
    save_manifest(stage_segment(std::move(in), &result.details), output);
  } else if (stage == "filter") {
    save_manifest(stage_filter(std::move(in), &result.details), output);
  } else if (stage == "annotate-match") {
    save_manifest(stage_annotate_match(std::move(in), &result.details), output);
  } else if (stage == "sample") {
    save_manifest(stage_sample(std::move(in), &result.details), output);
  } else if (stage == "report") {
    stage_report(in, &result.details);
  }

  util::atomic_write_file(cfg_.workspace / "reports" / ("stage_" + stage + ".json"),
                          result.details.dump(2) + "\n");

  checkpoints::StageCheckpoint cp;
  cp.stage = stage;
  cp.input_digest = digest;
  cp.output_path =
      std::filesystem::relative(output, cfg_.workspace).generic_string();
  cp.complete = true;
  store_.put(cp);

  provider_->clear();
  return result;
}

Manifest Pipeline::stage_collect(Manifest in, json* details) {
  json chapter_issues = json::object();
  std::atomic<std::size_t> fetched{0};
  std::mutex issues_mu;
  util::parallel_for(in.videos.size(), cfg_.parallelism, [&](std::size_t i) {
    VideoRecord& video = in.videos[i];
    if (!video.chapters.empty()) {
      return;
    }
    const json payload = provider_->fetch(providers::Kind::kChapters, video.video_id);
    const std::string lines =
        providers::decode_chapter_lines(payload, video.video_id);
    auto parsed = loc::parse_chapter_lines(lines);
    std::sort(parsed.chapters.begin(), parsed.chapters.end(),
              [](const Chapter& a, const Chapter& b) { return a.start_ms < b.start_ms; });
    video.chapters = std::move(parsed.chapters);
    std::vector<std::string> problems = check_video(video);
    if (!problems.empty()) {
      // Provider chapters violate the record invariants (overlap/outside the
      // video); keep the video but without chapters.
      video.chapters.clear();
      for (const std::string& p : problems) {
        parsed.diagnostics.push_back({0, video.video_id, p});
      }
    }
    fetched.fetch_add(1);
    if (!parsed.diagnostics.empty()) {
      json list = json::array();
      for (const Diagnostic& d : parsed.diagnostics) {
        list.push_back({{"line", d.line}, {"message", d.message}});
      }
      std::lock_guard<std::mutex> lock(issues_mu);
      chapter_issues[video.video_id] = std::move(list);
    }
  });
  (*details)["videos"] = in.videos.size();
  (*details)["clips"] = in.clips.size();
  (*details)["chapters_fetched"] = fetched.load();
  (*details)["chapter_issues"] = std::move(chapter_issues);
  in.sort_canonical();
  return in;
}

Manifest Pipeline::stage_segment(Manifest in, json* details) {
  struct PerVideo {
    std::vector<ClipRecord> clips;
    std::size_t shots = 0;
    bool rejected = false;
    std::string reject_reason;
  };
  std::vector<PerVideo> outcomes(in.videos.size());
  util::parallel_for(in.videos.size(), cfg_.parallelism, [&](std::size_t i) {
    const VideoRecord& video = in.videos[i];
    const json payload =
        provider_->fetch(providers::Kind::kTransition, video.video_id);
    const auto series = providers::decode_transition(payload, video.video_id);
    if (std::abs(series.fps - video.fps) > 1e-9) {
      throw std::runtime_error(util::strformat(
          "transition series for %s has fps %g but the video has fps %g",
          video.video_id.c_str(), series.fps, video.fps));
    }
    auto outcome = segment::segment_video(video, series, cfg_.segmenter);
    outcomes[i].clips = std::move(outcome.clips);
    outcomes[i].shots = outcome.shots.size();
    outcomes[i].rejected = outcome.video_rejected;
    outcomes[i].reject_reason = outcome.reject_reason;
  });

  // Clips are derived data of this stage: the output set replaces whatever
  // the input carried.
  in.clips.clear();
  json rejected = json::array();
  std::size_t total_shots = 0;
  for (std::size_t i = 0; i < in.videos.size(); ++i) {
    PerVideo& pv = outcomes[i];
    total_shots += pv.shots;
    if (pv.rejected) {
      rejected.push_back(
          {{"video", in.videos[i].video_id}, {"reason", pv.reject_reason}});
    }
    for (ClipRecord& clip : pv.clips) {
      in.clips.push_back(std::move(clip));
    }
  }
  (*details)["videos"] = in.videos.size();
  (*details)["shots"] = total_shots;
  (*details)["clips"] = in.clips.size();
  (*details)["rejected_videos"] = std::move(rejected);
  in.sort_canonical();
  return in;
}

Manifest Pipeline::stage_filter(Manifest in, json* details) {
  const VideoIndex index = make_video_index(in);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < in.clips.size(); ++i) {
    if (in.clips[i].active()) {
      active.push_back(i);
    }
  }

  struct Outcome {
    std::optional<RemovalReason> reason;
    std::optional<QualityScores> scores;
    std::string trajectory_ref;
    bool trajectory_too_short = false;
  };
  std::vector<Outcome> outcomes(active.size());

  util::parallel_for(active.size(), cfg_.parallelism, [&](std::size_t slot) {
    const ClipRecord& clip = in.clips[active[slot]];
    const VideoRecord& video = in.videos[index.at(clip.video_id)];
    Outcome& out = outcomes[slot];

    const bool luma_enabled = video.source == SourceClass::kReal
                                  ? cfg_.filter_options.luma_on_real
                                  : cfg_.filter_options.luma_on_game;
    if (luma_enabled) {
      const json payload = provider_->fetch(providers::Kind::kLuma, clip.clip_id);
      const auto series = providers::decode_luma(
          payload, clip.clip_id, expected_frame_count(clip.duration_ms(), video.fps));
      if (!filters::luminance_filter(series, cfg_.filters)) {
        out.reason = RemovalReason::kLuma;
        return;
      }
    }

    {
      const json payload = provider_->fetch(providers::Kind::kSubtitle, clip.clip_id);
      const auto detection =
          providers::decode_subtitle(payload, clip.clip_id, clip.duration_ms());
      if (!filters::subtitle_filter(detection, cfg_.filters)) {
        out.reason = RemovalReason::kSubtitle;
        return;
      }
    }

    {
      const json payload = provider_->fetch(providers::Kind::kPose, clip.clip_id);
      auto trajectory = providers::decode_pose(payload, clip.clip_id);
      if (trajectory.frames.empty()) {
        // Not pose-annotated. By default the trajectory rules only apply to
        // annotated clips (the filter has nothing to measure otherwise).
        if (!cfg_.filter_options.trajectory_only_annotated) {
          throw std::runtime_error("clip " + clip.clip_id +
                                   " has no pose annotation but "
                                   "trajectory_only_annotated is disabled");
        }
      } else {
        const auto rel = std::filesystem::path(kTrajectoryDir) /
                         (clip.clip_id + ".traj");
        traj::save_trajectory(trajectory, cfg_.workspace / rel);
        out.trajectory_ref = rel.generic_string();
        const auto verdict = filters::trajectory_filter(trajectory, cfg_.filters);
        out.trajectory_too_short = verdict.insufficient_frames;
        if (!verdict.pass) {
          out.reason = RemovalReason::kTrajectory;
          return;
        }
      }
    }

    const json payload = provider_->fetch(providers::Kind::kQuality, clip.clip_id);
    out.scores = providers::decode_quality(payload, clip.clip_id);
  });

  std::map<std::string, std::size_t> removal_counts;
  std::size_t too_short = 0;
  for (std::size_t slot = 0; slot < active.size(); ++slot) {
    ClipRecord& clip = in.clips[active[slot]];
    Outcome& out = outcomes[slot];
    clip.trajectory_ref = std::move(out.trajectory_ref);
    if (out.scores) {
      clip.scores = *out.scores;
    }
    too_short += out.trajectory_too_short ? 1 : 0;
    if (out.reason) {
      clip.mark_removed(*out.reason);
      removal_counts[std::string(to_string(*out.reason))] += 1;
    }
  }

  // Percentile cut runs after the per-clip filters, over the survivors.
  std::vector<filters::ClipScore> scored;
  for (const ClipRecord& clip : in.clips) {
    if (clip.active() && clip.scores) {
      scored.push_back({clip.clip_id, clip.scores->technical});
    }
  }
  const auto dropped =
      filters::quality_percentile_removals(std::move(scored), cfg_.filters.quality_drop_frac);
  const std::unordered_set<std::string> drop_set(dropped.begin(), dropped.end());
  for (ClipRecord& clip : in.clips) {
    if (clip.active() && drop_set.contains(clip.clip_id)) {
      clip.mark_removed(RemovalReason::kQuality);
    }
  }
  removal_counts[std::string(to_string(RemovalReason::kQuality))] = dropped.size();

  (*details)["input_active"] = active.size();
  (*details)["removals"] = removal_counts;
  (*details)["trajectories_too_short"] = too_short;
  (*details)["output_active"] = in.active_clip_count();
  in.sort_canonical();
  return in;
}

Manifest Pipeline::stage_annotate_match(Manifest in, json* details) {
  // Location matching first: ambiguous clips are dropped before any
  // annotation is fetched for them.
  std::unordered_map<std::string, loc::ChapterIndex> indexes;
  for (const VideoRecord& video : in.videos) {
    indexes.emplace(video.video_id, loc::build_index(video));
  }
  std::size_t matched = 0;
  std::size_t ambiguous = 0;
  for (ClipRecord& clip : in.clips) {
    if (!clip.active()) {
      continue;
    }
    const auto location =
        loc::match_clip(indexes.at(clip.video_id), clip.start_ms, clip.end_ms);
    if (location) {
      clip.location = *location;
      ++matched;
    } else {
      clip.mark_removed(RemovalReason::kLocationAmbiguous);
      ++ambiguous;
    }
  }

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < in.clips.size(); ++i) {
    if (in.clips[i].active()) {
      active.push_back(i);
    }
  }
  struct Annotation {
    CategoryLabels categories;
    std::string caption;
    std::vector<double> embedding;
  };
  std::vector<Annotation> annotations(active.size());
  util::parallel_for(active.size(), cfg_.parallelism, [&](std::size_t slot) {
    const ClipRecord& clip = in.clips[active[slot]];
    Annotation& a = annotations[slot];
    a.categories = providers::decode_category(
        provider_->fetch(providers::Kind::kCategory, clip.clip_id), clip.clip_id,
        cfg_.vocabulary);
    a.caption = providers::decode_caption(
        provider_->fetch(providers::Kind::kCaption, clip.clip_id), clip.clip_id);
    a.embedding = providers::decode_embedding(
        provider_->fetch(providers::Kind::kEmbedding, clip.clip_id), clip.clip_id);
  });

  // All embeddings live in one packed artifact, ordered by clip id.
  std::vector<std::size_t> order(active.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return in.clips[active[a]].clip_id < in.clips[active[b]].clip_id;
  });
  std::string packed;
  for (const std::size_t slot : order) {
    const json line = {{"clip_id", in.clips[active[slot]].clip_id},
                       {"vector", annotations[slot].embedding}};
    packed += line.dump();
    packed += '\n';
  }
  util::atomic_write_file(cfg_.workspace / kEmbeddingArtifact, packed);

  for (std::size_t slot = 0; slot < active.size(); ++slot) {
    ClipRecord& clip = in.clips[active[slot]];
    clip.categories = std::move(annotations[slot].categories);
    clip.caption = std::move(annotations[slot].caption);
    clip.embedding_ref = std::string(kEmbeddingArtifact);
  }

  const std::size_t considered = matched + ambiguous;
  (*details)["matched"] = matched;
  (*details)["location_ambiguous"] = ambiguous;
  (*details)["discard_fraction"] =
      considered == 0 ? 0.0
                      : static_cast<double>(ambiguous) / static_cast<double>(considered);
  (*details)["annotated"] = active.size();
  in.sort_canonical();
  return in;
}

SummaryBundle Pipeline::load_summaries(const Manifest& manifest) const {
  std::vector<const ClipRecord*> with_refs;
  for (const ClipRecord& clip : manifest.clips) {
    if (clip.active() && !clip.trajectory_ref.empty()) {
      with_refs.push_back(&clip);
    }
  }
  std::vector<traj::CameraTrajectory> trajectories(with_refs.size());
  util::parallel_for(with_refs.size(), cfg_.parallelism, [&](std::size_t i) {
    trajectories[i] = traj::load_trajectory(cfg_.workspace / with_refs[i]->trajectory_ref,
                                            with_refs[i]->clip_id);
  });

  std::vector<double> jitters;
  for (const auto& trajectory : trajectories) {
    if (const auto j = traj::jitter(trajectory)) {
      jitters.push_back(*j);
    }
  }
  SummaryBundle bundle;
  bundle.jitter_edges = traj::jitter_bin_edges(jitters, cfg_.sampling.jitter_bins);
  for (const auto& trajectory : trajectories) {
    if (auto summary =
            traj::make_summary(trajectory, cfg_.sampling.azimuth_bins,
                               cfg_.sampling.elevation_bins, bundle.jitter_edges)) {
      bundle.summaries.push_back(std::move(*summary));
    }
  }
  return bundle;
}

Manifest Pipeline::stage_sample(Manifest in, json* details) {
  const SummaryBundle bundle = load_summaries(in);
  std::unordered_map<std::string, const traj::TrajectorySummary*> summary_by_clip;
  for (const auto& s : bundle.summaries) {
    summary_by_clip[s.clip_id] = &s;
  }

  // Embeddings come from the packed artifact written by annotate-match.
  std::unordered_map<std::string, std::vector<double>> embeddings;
  const auto packed_path = cfg_.workspace / kEmbeddingArtifact;
  if (std::filesystem::exists(packed_path)) {
    const std::string text = util::read_file(packed_path);
    for (const auto line : util::split_lines(text)) {
      if (util::trim(line).empty()) {
        continue;
      }
      const json row = json::parse(line, nullptr, false);
      if (row.is_discarded() || !row.contains("clip_id") || !row.contains("vector")) {
        throw std::runtime_error("corrupt embedding artifact: " +
                                 packed_path.string());
      }
      embeddings[row["clip_id"].get<std::string>()] =
          row["vector"].get<std::vector<double>>();
    }
  }

  std::vector<sampling::SampleClip> sample_clips;
  for (const ClipRecord& clip : in.clips) {
    if (!clip.active()) {
      continue;
    }
    sampling::SampleClip sc;
    sc.clip_id = clip.clip_id;
    if (clip.scores) {
      sc.quality_sum = clip.scores->aesthetic + clip.scores->semantic;
    }
    if (clip.location) {
      sc.country_code = clip.location->country_code;
      sc.city_key = clip.location->city_key();
    }
    sc.categories = clip.categories;
    if (const auto it = embeddings.find(clip.clip_id); it != embeddings.end()) {
      sc.embedding = it->second;
    }
    if (const auto it = summary_by_clip.find(clip.clip_id);
        it != summary_by_clip.end()) {
      sc.direction_bin = it->second->direction_bin;
      sc.jitter_bin = it->second->jitter_bin;
    }
    sample_clips.push_back(std::move(sc));
  }

  const auto result = sampling::run_sampling(sample_clips, cfg_.sampling,
                                             cfg_.parallelism);

  const std::unordered_set<std::string> kept(result.kept.begin(), result.kept.end());
  for (ClipRecord& clip : in.clips) {
    if (clip.active() && !kept.contains(clip.clip_id)) {
      clip.mark_removed(RemovalReason::kSampler);
    }
  }

  json trace_stages = json::array();
  json stage_counts = json::object();
  for (const auto& trace : result.traces) {
    trace_stages.push_back({{"stage", trace.stage},
                            {"seed", util::hex64(trace.seed)},
                            {"kept", trace.kept},
                            {"removed", trace.removed},
                            {"diagnostics", trace.diagnostics}});
    stage_counts[trace.stage] = {{"kept", trace.kept.size()},
                                 {"removed", trace.removed.size()}};
  }
  const json trace_doc = {{"stages", std::move(trace_stages)},
                          {"jitter_edges", bundle.jitter_edges}};
  util::atomic_write_file(cfg_.workspace / "reports" / "sample_trace.json",
                          trace_doc.dump(2) + "\n");

  (*details)["input_active"] = sample_clips.size();
  (*details)["kept"] = result.kept.size();
  (*details)["stages"] = std::move(stage_counts);
  in.sort_canonical();
  return in;
}

void Pipeline::stage_report(const Manifest& in, json* details) {
  const SummaryBundle bundle = load_summaries(in);
  const auto corpus_report = report::build_report(in, bundle.summaries, cfg_.report);
  report::write_report(corpus_report, cfg_.workspace / "reports");
  (*details)["active_clips"] = corpus_report.active_clips;
  (*details)["total_duration_h"] = corpus_report.total_duration_h;
}

}  // namespace curator::pipeline
