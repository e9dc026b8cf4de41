// Generates a self-contained synthetic corpus bundle: provider fixture
// payloads, a collect-stage input manifest, and a ready-to-run pipeline
// config. The bundle is byte-deterministic in the seed and knobs.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "curator/manifest_io.hpp"
#include "curator/synth.hpp"
#include "curator/util.hpp"

int main(int argc, char** argv) {
  CLI::App app{"synthetic corpus bundle generator"};

  std::string output;
  curator::synth::CorpusSpec spec;
  unsigned parallelism = 1;
  bool no_reject = false;

  app.add_option("-o,--output", output, "bundle directory")->required();
  app.add_option("--videos", spec.videos, "number of source videos")
      ->capture_default_str();
  app.add_option("--clips", spec.target_clips, "exact number of extracted clips")
      ->capture_default_str();
  app.add_option("--seed", spec.seed, "corpus seed")->capture_default_str();
  app.add_option("--fps", spec.fps, "video frame rate")->capture_default_str();
  app.add_option("--countries", spec.countries, "distinct countries")
      ->capture_default_str();
  app.add_option("--cities-per-country", spec.cities_per_country,
                 "cities per country")
      ->capture_default_str();
  app.add_option("--embedding-dim", spec.embedding_dim, "embedding dimension")
      ->capture_default_str();
  app.add_option("--pose-fraction", spec.pose_fraction,
                 "fraction of clips with pose annotations")
      ->capture_default_str();
  app.add_option("--parallelism", parallelism, "parallelism in the emitted config")
      ->capture_default_str();
  app.add_flag("--no-reject-video", no_reject,
               "skip the deliberately too-short video");

  CLI11_PARSE(app, argc, argv);
  spec.include_reject_video = !no_reject;

  try {
    const auto corpus = curator::synth::make_corpus(spec);
    const std::filesystem::path dir(output);
    std::filesystem::create_directories(dir);
    curator::synth::write_fixtures(corpus, dir / "fixtures");
    curator::save_manifest(corpus.input, dir / "input_manifest.jsonl");

    const nlohmann::json config = {
        {"workspace", "workspace"},
        {"input_manifest", "input_manifest.jsonl"},
        {"seed", spec.seed},
        {"parallelism", parallelism},
        {"provider", {{"mode", "fixture"}, {"fixture_dir", "fixtures"}}},
    };
    curator::util::atomic_write_file(dir / "curate.json", config.dump(2) + "\n");

    std::printf("bundle %s: %zu videos, %zu clips expected after segmentation\n",
                dir.string().c_str(), corpus.input.videos.size(),
                corpus.expected_clips.size());
    std::printf("run: curate -c %s/curate.json run\n", dir.string().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
