#include "curator/synth.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "curator/location.hpp"
#include "curator/providers.hpp"
#include "curator/segmenter.hpp"
#include "curator/util.hpp"

namespace curator::synth {

namespace {

using nlohmann::json;

// Plausible two-letter codes; corpora never need more.
constexpr std::array<const char*, 24> kCountryCodes = {
    "JP", "US", "FR", "GB", "DE", "IT", "TH", "BR", "MX", "KR", "CN", "ES",
    "PT", "NL", "EG", "ZA", "AU", "NZ", "CA", "IN", "PE", "TR", "VN", "MA"};

constexpr std::array<const char*, 30> kCityNames = {
    "Riverton",  "Oakham",    "Brightwell", "Eastvale",  "Norwich",  "Kestrel",
    "Maplewood", "Harborview","Stonegate",  "Larkspur",  "Westfield","Ashford",
    "Pinecrest", "Gullport",  "Thornbury",  "Caldera",   "Midtown",  "Fernhill",
    "Saltmarsh", "Quarryside","Bellbrook",  "駅前町",     "Altavista","Redmoor",
    "Glasshaven","Ironbridge","Sunmere",    "Veldt",     "Coralbay", "Новодол"};

constexpr std::array<const char*, 44> kCaptionWords = {
    "a",      "the",     "camera",  "walks",   "through", "crowded", "quiet",
    "market", "street",  "under",   "neon",    "signs",   "past",    "vendors",
    "rain",   "falls",   "on",      "cobbled", "lanes",   "while",   "people",
    "cross",  "bridge",  "toward",  "old",     "temple",  "district","morning",
    "light",  "filters", "between", "tall",    "glass",   "towers",  "and",
    "narrow", "alleys",  "lined",   "with",    "lanterns","food",    "stalls",
    "near",   "river"};

double gauss(util::Rng& rng) {
  // Box-Muller; std::normal_distribution is implementation-defined.
  double u = 0;
  do {
    u = rng.next_double();
  } while (u <= 1e-12);
  const double v = rng.next_double();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
}

Eigen::Vector3d gauss_vec(util::Rng& rng) {
  return {gauss(rng), gauss(rng), gauss(rng)};
}

// Payload values are quantized so fixture files stay compact at large corpus
// sizes; every margin the filters test against is orders of magnitude wider.
double round_to(double x, double quantum) {
  return static_cast<double>(std::llround(x / quantum)) * quantum;
}

json round_vec(const std::vector<double>& v, double quantum) {
  json out = json::array();
  for (double x : v) {
    out.push_back(round_to(x, quantum));
  }
  return out;
}

struct CityTable {
  std::size_t countries = 0;
  std::size_t cities_per_country = 0;

  const char* code(std::size_t c) const { return kCountryCodes[c]; }
  const char* city(std::size_t c, std::size_t j) const {
    return kCityNames[(c * cities_per_country + j) % kCityNames.size()];
  }
};

// Quadratic bias toward low indexes: a handful of large groups plus a tail.
std::size_t skewed_index(util::Rng& rng, std::size_t n) {
  const double u = rng.next_double();
  return std::min<std::size_t>(static_cast<std::size_t>(u * u * static_cast<double>(n)),
                               n - 1);
}

enum class Defect { kNone, kLuma, kSubtitle, kReversal, kTeleport, kSpin };

json make_luma_payload(util::Rng& rng, std::size_t frames, Defect defect) {
  std::vector<double> values;
  values.reserve(frames);
  const std::size_t emit = rng.next_double() < 0.1 && frames > 1 ? frames - 1 : frames;
  for (std::size_t i = 0; i < emit; ++i) {
    values.push_back(static_cast<double>(90 + rng.next_index(80)));
  }
  if (defect == Defect::kLuma && emit > 0) {
    // A run strictly longer than the 15-frame limit, fully dark or blown out.
    const double level = rng.next_double() < 0.5 ? 5 : 250;
    const std::size_t run = std::min<std::size_t>(emit, 20);
    const std::size_t at = emit > run ? rng.next_index(emit - run) : 0;
    for (std::size_t i = 0; i < run; ++i) {
      values[at + i] = level;
    }
  }
  return {{"values", values}};
}

json make_subtitle_payload(util::Rng& rng, Defect defect) {
  json events = json::array();
  const auto add_event = [&](double y, double visible_s) {
    const double start = round_to(rng.next_double() * (59.0 - visible_s), 0.01);
    events.push_back({{"y_center_frac", round_to(y, 0.001)},
                      {"start_s", start},
                      {"end_s", round_to(start + visible_s, 0.01)}});
  };
  if (rng.next_double() < 0.25) {
    // Benign overlay: above the bottom third, or visible too briefly.
    if (rng.next_double() < 0.5) {
      add_event(0.1 + 0.5 * rng.next_double(), 1.0 + rng.next_double());
    } else {
      add_event(0.75 + 0.2 * rng.next_double(), 0.2 + 0.5 * rng.next_double());
    }
  }
  if (defect == Defect::kSubtitle) {
    add_event(0.72 + 0.2 * rng.next_double(), 0.9 + 0.6 * rng.next_double());
  }
  return {{"events", std::move(events)}};
}

json make_quality_payload(util::Rng& rng) {
  return {{"technical", round_to(0.2 + 0.75 * rng.next_double(), 1e-4)},
          {"aesthetic", round_to(0.2 + 0.75 * rng.next_double(), 1e-4)},
          {"semantic", round_to(0.2 + 0.75 * rng.next_double(), 1e-4)}};
}

json trajectory_payload(const traj::CameraTrajectory& t) {
  json frames = json::array();
  for (const auto& f : t.frames) {
    frames.push_back({f.t_s, round_to(f.position.x(), 1e-3),
                      round_to(f.position.y(), 1e-3), round_to(f.position.z(), 1e-3),
                      f.orientation.w(), f.orientation.x(), f.orientation.y(),
                      f.orientation.z()});
  }
  return {{"fps", t.fps}, {"frames", std::move(frames)}};
}

json make_pose_payload(util::Rng& rng, const std::string& clip_id, std::size_t frames,
                       double fps, Defect defect) {
  switch (defect) {
    case Defect::kReversal:
      return trajectory_payload(reversing_walk(clip_id, frames, fps));
    case Defect::kTeleport:
      return trajectory_payload(teleporting_walk(clip_id, frames, fps));
    case Defect::kSpin:
      return trajectory_payload(spinning_camera(clip_id, frames, fps));
    default:
      break;
  }
  if (rng.next_double() < 0.1) {
    return trajectory_payload(stationary_camera(clip_id, frames, fps));
  }
  const double theta = rng.next_double() * 2.0 * std::numbers::pi;
  const double phi = (rng.next_double() - 0.5) * 1.0;
  const Eigen::Vector3d dir(std::cos(theta) * std::cos(phi),
                            std::sin(theta) * std::cos(phi), std::sin(phi));
  const double speed = 0.2 + 1.3 * rng.next_double();
  return trajectory_payload(straight_walk(clip_id, frames, fps, dir * speed,
                                          0.01 * speed, rng.next_u64()));
}

json make_category_payload(util::Rng& rng, const LabelVocabulary& vocabulary) {
  json out = json::object();
  for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
    const auto& labels = vocabulary.dimension(d);
    std::string label(kAbstainLabel);
    if (rng.next_double() >= 0.05) {
      const double u = rng.next_double();
      const auto idx = std::min<std::size_t>(
          static_cast<std::size_t>(std::pow(u, 1.7) * static_cast<double>(labels.size())),
          labels.size() - 1);
      label = labels[idx];
    }
    out[std::string(kCategoryDimensions[d])] = label;
  }
  return out;
}

json make_caption_payload(util::Rng& rng) {
  const std::size_t n = 4 + rng.next_index(36);
  std::string text;
  for (std::size_t i = 0; i < n; ++i) {
    if (!text.empty()) {
      text += ' ';
    }
    text += kCaptionWords[rng.next_index(kCaptionWords.size())];
  }
  return {{"text", std::move(text)}};
}

}  // namespace

traj::CameraTrajectory straight_walk(const std::string& clip_id, std::size_t frames,
                                     double fps, const Eigen::Vector3d& step,
                                     double noise, std::uint64_t seed) {
  traj::CameraTrajectory t;
  t.clip_id = clip_id;
  t.fps = fps;
  util::Rng rng(seed);
  const Eigen::Vector3d start = noise > 0 ? Eigen::Vector3d(2.0 * gauss_vec(rng))
                                          : Eigen::Vector3d(0.5, -0.25, 0.125);
  for (std::size_t i = 0; i < frames; ++i) {
    traj::TrajectoryFrame f;
    f.t_s = static_cast<double>(i) / fps;
    f.position = start + static_cast<double>(i) * step;
    if (noise > 0) {
      f.position += noise * gauss_vec(rng);
    }
    t.frames.push_back(f);
  }
  return t;
}

traj::CameraTrajectory stationary_camera(const std::string& clip_id,
                                         std::size_t frames, double fps) {
  traj::CameraTrajectory t;
  t.clip_id = clip_id;
  t.fps = fps;
  for (std::size_t i = 0; i < frames; ++i) {
    traj::TrajectoryFrame f;
    f.t_s = static_cast<double>(i) / fps;
    f.position = Eigen::Vector3d(0.375, 0.75, -0.25);
    t.frames.push_back(f);
  }
  return t;
}

traj::CameraTrajectory reversing_walk(const std::string& clip_id, std::size_t frames,
                                      double fps, double step) {
  traj::CameraTrajectory t;
  t.clip_id = clip_id;
  t.fps = fps;
  // Forward, four frames backward, forward again: two 180 degree direction
  // changes 4/fps seconds apart.
  const std::size_t a = frames / 2;
  const std::size_t b = std::min(frames, a + 4);
  Eigen::Vector3d pos(0, 0, 0);
  for (std::size_t i = 0; i < frames; ++i) {
    traj::TrajectoryFrame f;
    f.t_s = static_cast<double>(i) / fps;
    f.position = pos;
    t.frames.push_back(f);
    const double sign = (i >= a && i < b) ? -1.0 : 1.0;
    pos += Eigen::Vector3d(sign * step, 0, 0);
  }
  return t;
}

traj::CameraTrajectory teleporting_walk(const std::string& clip_id,
                                        std::size_t frames, double fps, double step,
                                        double jump_factor) {
  traj::CameraTrajectory t;
  t.clip_id = clip_id;
  t.fps = fps;
  const std::size_t mid = frames / 2;
  Eigen::Vector3d pos(0, 0, 0);
  for (std::size_t i = 0; i < frames; ++i) {
    traj::TrajectoryFrame f;
    f.t_s = static_cast<double>(i) / fps;
    f.position = pos;
    t.frames.push_back(f);
    // The jump continues along the walk direction so only the displacement
    // rule, not the reversal rule, can fire.
    pos += Eigen::Vector3d(i == mid ? jump_factor * step : step, 0, 0);
  }
  return t;
}

traj::CameraTrajectory spinning_camera(const std::string& clip_id, std::size_t frames,
                                       double fps, double step_deg) {
  traj::CameraTrajectory t = stationary_camera(clip_id, frames, fps);
  for (std::size_t i = 0; i < frames; ++i) {
    const double angle = static_cast<double>(i) * step_deg * std::numbers::pi / 180.0;
    t.frames[i].orientation =
        Eigen::Quaterniond(Eigen::AngleAxisd(angle, Eigen::Vector3d::UnitZ()));
  }
  return t;
}

Corpus make_corpus(const CorpusSpec& spec) {
  if (spec.videos == 0 || spec.target_clips < spec.videos) {
    throw std::invalid_argument("corpus needs at least one clip per video");
  }
  Corpus corpus;
  util::Rng rng(spec.seed);
  CityTable table;
  table.countries = std::clamp<std::size_t>(spec.countries, 1, kCountryCodes.size());
  table.cities_per_country =
      std::clamp<std::size_t>(spec.cities_per_country, 1, kCityNames.size());

  const auto vocabulary = LabelVocabulary::defaults();
  const auto frames_per_clip =
      static_cast<std::size_t>(std::llround(60.0 * spec.fps));
  const segment::SegmenterConfig seg_cfg;

  auto& transition_fx = corpus.fixtures["transition"];
  auto& chapters_fx = corpus.fixtures["chapters"];
  auto& luma_fx = corpus.fixtures["luma"];
  auto& subtitle_fx = corpus.fixtures["subtitle"];
  auto& quality_fx = corpus.fixtures["quality"];
  auto& pose_fx = corpus.fixtures["pose"];
  auto& category_fx = corpus.fixtures["category"];
  auto& caption_fx = corpus.fixtures["caption"];
  auto& embedding_fx = corpus.fixtures["embedding"];

  std::vector<double> last_embedding;
  std::size_t remaining = spec.target_clips;
  std::size_t trajectory_defect_counter = 0;

  const std::size_t total_videos = spec.videos + (spec.include_reject_video ? 1 : 0);
  for (std::size_t v = 0; v < total_videos; ++v) {
    VideoRecord video;
    video.video_id = util::strformat("vid%05zu", v);
    video.fps = spec.fps;
    video.width = 1920;
    video.height = 1080;
    video.title = util::strformat("walking tour %04zu", v);
    video.description = "synthetic corpus video";

    const bool reject = spec.include_reject_video && v == spec.videos;
    if (reject) {
      // Real source shorter than twice the head/tail trim: segmentation
      // rejects it, so it carries no clip budget.
      video.source = SourceClass::kReal;
      video.duration_ms = 200'000;
      video.chapters.push_back({0, video.duration_ms,
                                {table.code(0), table.city(0, 0), ""}});
      segment::TransitionSeries series;
      series.video_id = video.video_id;
      series.fps = spec.fps;
      series.probs.assign(
          static_cast<std::size_t>(std::llround(200.0 * spec.fps)), 0.05);
      transition_fx[video.video_id] = json{{"fps", series.fps},
                                           {"probs", series.probs}}
                                          .dump();
      corpus.input.videos.push_back(std::move(video));
      continue;
    }

    video.source = rng.next_double() < spec.game_fraction ? SourceClass::kGame
                                                          : SourceClass::kReal;
    video.view = rng.next_double() < 0.15 ? ViewKind::kDrone : ViewKind::kWalking;
    if (video.source == SourceClass::kGame) {
      video.width = 2560;
      video.height = 1440;
    }

    // Split this video's clip budget into shot-sized pieces of 1-4 clips.
    const std::size_t videos_left = spec.videos - v;
    const std::size_t lo = 1;
    const std::size_t hi = remaining - (videos_left - 1);
    std::size_t budget = remaining / videos_left;
    const std::size_t jitter = std::max<std::size_t>(1, budget / 4);
    budget = std::clamp(budget + rng.next_index(2 * jitter + 1) - jitter, lo, hi);
    if (videos_left == 1) {
      budget = remaining;
    }
    remaining -= budget;

    std::vector<std::size_t> piece_clips;
    for (std::size_t left = budget; left > 0;) {
      const std::size_t c = std::min<std::size_t>(left, 1 + rng.next_index(4));
      piece_clips.push_back(c);
      left -= c;
    }

    const Millis head_ms =
        video.source == SourceClass::kReal ? seg_cfg.head_tail_trim_ms : 0;
    std::vector<Millis> piece_start_ms;  // piece k spans [start, start + len)
    std::vector<Millis> piece_len_ms;
    Millis at = head_ms;
    for (const std::size_t c : piece_clips) {
      const Millis len = static_cast<Millis>(c) * seg_cfg.clip_len_ms +
                         2 * seg_cfg.shot_trim_ms;
      piece_start_ms.push_back(at);
      piece_len_ms.push_back(len);
      at += len;
    }
    video.duration_ms = at + head_ms;

    segment::TransitionSeries series;
    series.video_id = video.video_id;
    series.fps = spec.fps;
    const auto frame_count = static_cast<std::size_t>(
        std::llround(seconds_from_millis(video.duration_ms) * spec.fps));
    series.probs.resize(frame_count);
    for (double& p : series.probs) {
      p = round_to(0.2 * rng.next_double(), 0.01);
    }
    for (std::size_t k = 1; k < piece_start_ms.size(); ++k) {
      const auto frame = static_cast<std::size_t>(
          std::llround(seconds_from_millis(piece_start_ms[k]) * spec.fps));
      series.probs[frame] = 0.9;
    }
    if (head_ms > 0 && rng.next_double() < 0.5 && frame_count > 10) {
      series.probs[10] = 0.9;  // inside the head trim; must not matter
    }
    transition_fx[video.video_id] =
        json{{"fps", series.fps}, {"probs", series.probs}}.dump();

    // Chapters cover runs of pieces; uncovered pieces leave their clips
    // location-ambiguous. The chapter/shot alignment guarantees unique
    // containment for covered clips.
    std::vector<int> piece_country(piece_clips.size(), -1);
    std::vector<Chapter> chapters;
    for (std::size_t k = 0; k < piece_clips.size();) {
      std::size_t end = k + 1;
      while (end < piece_clips.size() && rng.next_double() < 0.3) {
        ++end;
      }
      const bool covered = rng.next_double() >= spec.uncovered_shot_fraction;
      if (covered) {
        const std::size_t country = skewed_index(rng, table.countries);
        const std::size_t city = rng.next_index(table.cities_per_country);
        Chapter ch;
        ch.start_ms = piece_start_ms[k];
        ch.end_ms = piece_start_ms[end - 1] + piece_len_ms[end - 1];
        ch.location.country_code = table.code(country);
        ch.location.city = table.city(country, city);
        if (rng.next_double() < 0.3) {
          ch.location.place = util::strformat("district %llu",
                                              static_cast<unsigned long long>(
                                                  1 + rng.next_index(9)));
        }
        chapters.push_back(std::move(ch));
        for (std::size_t p = k; p < end; ++p) {
          piece_country[p] = static_cast<int>(country);
        }
      }
      k = end;
    }
    const bool inline_chapters =
        spec.inline_chapters_on_some && rng.next_double() < 0.5;
    if (inline_chapters) {
      video.chapters = chapters;
    } else {
      chapters_fx[video.video_id] =
          json{{"lines", "# chapter track\n" + loc::format_chapter_lines(chapters)}}
              .dump();
    }

    auto outcome = segment::segment_video(video, series, seg_cfg);
    if (outcome.video_rejected || outcome.clips.size() != budget) {
      throw std::logic_error(util::strformat(
          "corpus construction drifted from the segmenter: video %s made %zu "
          "clips, wanted %zu",
          video.video_id.c_str(), outcome.clips.size(), budget));
    }

    std::size_t piece = 0;
    for (const ClipRecord& clip : outcome.clips) {
      while (piece + 1 < piece_start_ms.size() &&
             clip.start_ms >= piece_start_ms[piece + 1]) {
        ++piece;
      }

      const double u = rng.next_double();
      Defect defect = Defect::kNone;
      if (u < spec.luma_defect_fraction) {
        defect = Defect::kLuma;
      } else if (u < spec.luma_defect_fraction + spec.subtitle_defect_fraction) {
        defect = Defect::kSubtitle;
      } else if (u < spec.luma_defect_fraction + spec.subtitle_defect_fraction +
                         spec.trajectory_defect_fraction) {
        switch (trajectory_defect_counter++ % 3) {
          case 0: defect = Defect::kReversal; break;
          case 1: defect = Defect::kTeleport; break;
          default: defect = Defect::kSpin; break;
        }
      }

      luma_fx[clip.clip_id] = make_luma_payload(rng, frames_per_clip, defect).dump();
      subtitle_fx[clip.clip_id] = make_subtitle_payload(rng, defect).dump();
      quality_fx[clip.clip_id] = make_quality_payload(rng).dump();

      const bool trajectory_defect = defect == Defect::kReversal ||
                                     defect == Defect::kTeleport ||
                                     defect == Defect::kSpin;
      const bool annotated =
          trajectory_defect || rng.next_double() < spec.pose_fraction;
      if (annotated) {
        pose_fx[clip.clip_id] =
            make_pose_payload(rng, clip.clip_id, frames_per_clip, spec.fps, defect)
                .dump();
      } else {
        pose_fx[clip.clip_id] =
            json{{"fps", spec.fps}, {"frames", json::array()}}.dump();
      }

      category_fx[clip.clip_id] = make_category_payload(rng, vocabulary).dump();
      caption_fx[clip.clip_id] = make_caption_payload(rng).dump();

      const std::size_t country =
          piece_country[piece] >= 0 ? static_cast<std::size_t>(piece_country[piece])
                                    : 0;
      std::vector<double> embedding;
      if (!last_embedding.empty() && rng.next_double() < spec.duplicate_fraction) {
        embedding = last_embedding;
        for (double& x : embedding) {
          x += 0.002 * gauss(rng);
        }
      } else {
        util::Rng center_rng(
            util::derive_seed(spec.seed, "country-center", table.code(country)));
        embedding.resize(spec.embedding_dim);
        double norm = 0;
        for (double& x : embedding) {
          x = gauss(center_rng);
          norm += x * x;
        }
        norm = std::sqrt(std::max(norm, 1e-12));
        for (double& x : embedding) {
          x = x / norm + 0.25 * gauss(rng);
        }
      }
      last_embedding = embedding;
      embedding_fx[clip.clip_id] = json{{"vector", round_vec(embedding, 1e-4)}}.dump();

      corpus.expected_clips.push_back(clip);
    }
    corpus.input.videos.push_back(std::move(video));
  }

  corpus.input.sort_canonical();
  std::sort(corpus.expected_clips.begin(), corpus.expected_clips.end(),
            [](const ClipRecord& a, const ClipRecord& b) {
              return a.clip_id < b.clip_id;
            });
  return corpus;
}

void write_fixtures(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [kind, payloads] : corpus.fixtures) {
    std::string packed;
    for (const auto& [ref, payload] : payloads) {
      packed += "{\"ref\":";
      packed += json(ref).dump();
      packed += ",\"payload\":";
      packed += payload;
      packed += "}\n";
    }
    util::atomic_write_file(dir / (kind + ".jsonl"), packed);
  }
}

std::vector<sampling::SampleClip> make_annotated_clips(std::size_t n,
                                                       std::uint64_t seed,
                                                       std::size_t countries,
                                                       std::size_t cities_per_country,
                                                       std::size_t embedding_dim) {
  util::Rng rng(seed);
  CityTable table;
  table.countries = std::clamp<std::size_t>(countries, 1, kCountryCodes.size());
  table.cities_per_country =
      std::clamp<std::size_t>(cities_per_country, 1, kCityNames.size());
  const auto vocabulary = LabelVocabulary::defaults();

  std::vector<Eigen::VectorXd> centers(table.countries);
  for (std::size_t c = 0; c < table.countries; ++c) {
    util::Rng center_rng(util::derive_seed(seed, "country-center", table.code(c)));
    centers[c] = Eigen::VectorXd(embedding_dim);
    for (std::size_t d = 0; d < embedding_dim; ++d) {
      centers[c][static_cast<Eigen::Index>(d)] = gauss(center_rng);
    }
    centers[c].normalize();
  }

  std::vector<sampling::SampleClip> clips;
  clips.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sampling::SampleClip clip;
    clip.clip_id = util::strformat("clip%07zu", i);
    clip.quality_sum = rng.next_double() + rng.next_double();

    const std::size_t country = skewed_index(rng, table.countries);
    const std::size_t city = rng.next_index(table.cities_per_country);
    Location location;
    location.country_code = table.code(country);
    location.city = table.city(country, city);
    clip.country_code = location.country_code;
    clip.city_key = location.city_key();

    CategoryLabels labels;
    for (std::size_t d = 0; d < kCategoryDimensions.size(); ++d) {
      const auto& options = vocabulary.dimension(d);
      const double u = rng.next_double();
      labels.dimension(d) = options[std::min<std::size_t>(
          static_cast<std::size_t>(std::pow(u, 1.7) * static_cast<double>(options.size())),
          options.size() - 1)];
    }
    clip.categories = std::move(labels);

    if (!clips.empty() && rng.next_double() < 0.08) {
      clip.embedding = clips.back().embedding;
      for (double& x : clip.embedding) {
        x += 1e-3 * gauss(rng);
      }
    } else {
      clip.embedding.resize(embedding_dim);
      for (std::size_t d = 0; d < embedding_dim; ++d) {
        clip.embedding[d] = centers[country][static_cast<Eigen::Index>(d)] +
                            0.3 * gauss(rng);
      }
    }

    if (rng.next_double() >= 0.1) {
      clip.direction_bin = static_cast<int>(rng.next_index(8));
      clip.jitter_bin = static_cast<int>(rng.next_index(4));
    }
    clips.push_back(std::move(clip));
  }
  return clips;
}

}  // namespace curator::synth
