// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0
//
// forgeloc: command-line front end for the forgeloc library.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "forgeloc/boundary_map.hpp"
#include "forgeloc/evaluation.hpp"
#include "forgeloc/fixtures.hpp"
#include "forgeloc/gradcheck.hpp"
#include "forgeloc/manifest.hpp"
#include "forgeloc/model.hpp"
#include "forgeloc/pipeline.hpp"
#include "forgeloc/planner.hpp"
#include "forgeloc/postprocess.hpp"
#include "forgeloc/stats.hpp"
#include "forgeloc/train.hpp"
#include "json.hpp"

namespace {

using forgeloc::Error;
using json = nlohmann::json;

// Writes `text` to `path`, or stdout when `path` is empty or "-".
void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

void EmitLine(const std::string& path, const std::string& text) {
  Emit(path, text + "\n");
}

struct SnmsFlags {
  std::string method = "gaussian";
  forgeloc::SoftNmsConfig config;

  void Register(CLI::App* cmd) {
    cmd->add_option("--method", method, "Soft-NMS decay: gaussian or linear")
        ->check(CLI::IsMember({"gaussian", "linear"}));
    cmd->add_option("--sigma", config.sigma, "Gaussian decay width");
    cmd->add_option("--iou-cut", config.iou_cut, "Linear decay IoU threshold");
    cmd->add_option("--score-floor", config.score_floor,
                    "Drop proposals scoring below this");
    cmd->add_option("--top-k", config.top_k, "Proposals kept per video");
  }

  forgeloc::SoftNmsConfig Get() const {
    forgeloc::SoftNmsConfig c = config;
    c.method = forgeloc::ParseDecayMethod(method);
    c.Check();
    return c;
  }
};

struct ModelFlags {
  int feature_dim = 8;
  int max_duration = 0;
  int n_layers = 2;
  int kernel = 3;

  void Register(CLI::App* cmd) {
    cmd->add_option("--feature-dim", feature_dim, "Encoder output channels C_f");
    cmd->add_option("--max-duration", max_duration,
                    "Boundary map rows D (0: longest manifest video)");
    cmd->add_option("--layers", n_layers, "Convolution layers per encoder");
    cmd->add_option("--kernel", kernel, "Temporal kernel size (odd)");
  }
};

forgeloc::FixtureSet LoadSet(const std::string& manifest, const std::string& features,
                             const std::string& split) {
  forgeloc::Manifest m = forgeloc::ReadManifestFile(manifest);
  if (!split.empty() && split != "all") {
    const auto s = forgeloc::ParseSplit(split);
    if (!s) throw Error("unknown split '" + split + "'");
    m = forgeloc::FilterSplit(m, *s);
  }
  if (m.empty()) throw Error("no videos selected from '" + manifest + "'");
  return forgeloc::Align(m, forgeloc::ReadFeaturesFile(features));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal forgery localization toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with option defaults; flags win");
  app.set_version_flag("--version", "forgeloc 0.1.0");
  std::function<void()> run;
  std::string command;

  auto add = [&](const std::string& name, const std::string& help) {
    return app.add_subcommand(name, help);
  };

  // gt-map
  std::string manifest_path, video_id, out_path = "-";
  int gt_d = 0;
  {
    CLI::App* cmd = add("gt-map", "Ground-truth boundary map for one video");
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("--video-id", video_id)->required();
    cmd->add_option("--max-duration", gt_d, "Rows D (0: longest manifest video)");
    cmd->add_option("-o,--out", out_path);
    cmd->final_callback([&] {
      run = [&] {
        const forgeloc::Manifest m = forgeloc::ReadManifestFile(manifest_path);
        const forgeloc::VideoAnnotation* ann = forgeloc::FindVideo(m, video_id);
        if (!ann) throw Error("unknown video_id '" + video_id + "'");
        const int d = gt_d > 0 ? gt_d : forgeloc::DefaultMaxDuration(m);
        const forgeloc::NamedMap nm{ann->video_id, ann->fps,
                                    forgeloc::GtBoundaryMap(*ann, ann->n_frames, d)};
        EmitLine(out_path, forgeloc::MapToJson(nm));
      };
    });
  }

  // decode
  std::string maps_path;
  SnmsFlags decode_snms;
  {
    CLI::App* cmd = add("decode", "Boundary maps to segment predictions via Soft-NMS");
    cmd->add_option("--maps", maps_path)->required();
    cmd->add_option("-o,--out", out_path);
    decode_snms.Register(cmd);
    cmd->final_callback([&] {
      run = [&] {
        const auto preds =
            forgeloc::DecodeAll(forgeloc::ReadMapsFile(maps_path), decode_snms.Get());
        std::ostringstream s;
        forgeloc::WritePredictions(s, preds);
        Emit(out_path, s.str());
      };
    });
  }

  // eval
  std::string predictions_path, split;
  bool subset = false;
  {
    CLI::App* cmd = add("eval", "AP, AR and AUC of predictions against a manifest");
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("--predictions", predictions_path)->required();
    cmd->add_option("--split", split, "Restrict to train, val or test");
    cmd->add_flag("--subset", subset, "Drop audio-only modified videos");
    cmd->add_option("-o,--out", out_path);
    cmd->final_callback([&] {
      run = [&] {
        forgeloc::Manifest m = forgeloc::ReadManifestFile(manifest_path);
        if (!split.empty()) {
          const auto s = forgeloc::ParseSplit(split);
          if (!s) throw Error("unknown split '" + split + "'");
          m = forgeloc::FilterSplit(m, *s);
        }
        if (subset) m = forgeloc::VisualSubset(m);
        const auto preds = forgeloc::ReadPredictionsFile(predictions_path);
        EmitLine(out_path, forgeloc::EvalReportToJson(forgeloc::Evaluate(m, preds)));
      };
    });
  }

  // plan
  std::string transcript_path, lexicon_path, antonyms_path, variants_out;
  double variant_fps = 25.0;
  {
    CLI::App* cmd = add("plan", "Sentiment-flipping antonym replacements for a transcript");
    cmd->add_option("--transcript", transcript_path)->required();
    cmd->add_option("--lexicon", lexicon_path)->required();
    cmd->add_option("--antonyms", antonyms_path)->required();
    cmd->add_option("-o,--out", out_path);
    cmd->add_option("--video-id", video_id, "Template id for --variants-out");
    cmd->add_option("--fps", variant_fps, "Frame rate for --variants-out");
    cmd->add_option("--variants-out", variants_out,
                    "Write the three fake-variant annotations here");
    cmd->final_callback([&] {
      run = [&] {
        const forgeloc::Transcript t = forgeloc::ReadTranscriptFile(transcript_path);
        const forgeloc::ManipulationPlan plan =
            forgeloc::Plan(t, forgeloc::ReadLexiconFile(lexicon_path),
                           forgeloc::ReadAntonymsFile(antonyms_path));
        EmitLine(out_path, forgeloc::PlanToJson(plan));
        if (!variants_out.empty()) {
          if (video_id.empty()) throw Error("--variants-out needs --video-id");
          forgeloc::VideoAnnotation base;
          base.video_id = video_id;
          base.duration = t.duration;
          base.fps = variant_fps;
          base.n_frames = static_cast<int>(std::lround(t.duration * variant_fps));
          forgeloc::WriteManifestFile(variants_out, forgeloc::EmitVariants(plan, base));
        }
      };
    });
  }

  // gradcheck
  forgeloc::GradCheckOptions gc;
  {
    CLI::App* cmd = add("gradcheck", "Finite-difference checks of all analytic gradients");
    cmd->add_option("--seed", gc.seed);
    cmd->add_option("--instances", gc.instances);
    cmd->add_option("-o,--out", out_path);
    cmd->final_callback([&] {
      run = [&] {
        const auto results = forgeloc::RunGradientSuite(gc);
        EmitLine(out_path, forgeloc::GradSuiteToJson(results));
        for (const auto& r : results) {
          if (!r.passed()) throw Error("gradient check '" + r.name + "' failed");
        }
      };
    });
  }

  // train
  std::string features_path, checkpoint_out, maps_out, maps_split = "all";
  std::uint64_t seed = 0;
  int log_every = 0;
  forgeloc::TrainOptions topt;
  ModelFlags model_flags;
  {
    CLI::App* cmd = add("train", "Full-batch gradient descent on the weighted loss");
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("--features", features_path)->required();
    cmd->add_option("--split", split, "Training split (default train)");
    cmd->add_option("--seed", seed, "Initialization seed");
    cmd->add_option("--steps", topt.steps);
    cmd->add_option("--lr", topt.learning_rate);
    cmd->add_option("--lambda-c", topt.weights.lambda_c);
    cmd->add_option("--lambda-f", topt.weights.lambda_f);
    cmd->add_option("--lambda-b", topt.weights.lambda_b);
    cmd->add_option("--lambda-bm", topt.weights.lambda_bm);
    cmd->add_option("--delta", topt.weights.delta, "Contrastive margin");
    cmd->add_option("--log-every", log_every, "Print the loss every N steps to stderr");
    cmd->add_option("--checkpoint-out", checkpoint_out)->required();
    cmd->add_option("--maps-out", maps_out, "Also write fused maps for --maps-split");
    cmd->add_option("--maps-split", maps_split);
    model_flags.Register(cmd);
    cmd->final_callback([&] {
      run = [&] {
        const forgeloc::FixtureSet all = LoadSet(manifest_path, features_path, "all");
        const forgeloc::FixtureSet train =
            LoadSet(manifest_path, features_path, split.empty() ? "train" : split);
        const int d = model_flags.max_duration > 0
                          ? model_flags.max_duration
                          : forgeloc::DefaultMaxDuration(all.manifest);
        forgeloc::ModelConfig config =
            forgeloc::ConfigForInputs(train.inputs, model_flags.feature_dim, d);
        config.video.n_layers = config.audio.n_layers = model_flags.n_layers;
        config.video.temporal_kernel = config.audio.temporal_kernel = model_flags.kernel;
        if (log_every > 0) {
          topt.on_step = [&](int step, double loss) {
            if (step % log_every == 0) {
              std::cerr << json{{"step", step}, {"loss", loss}}.dump() << '\n';
            }
          };
        }
        const forgeloc::TrainResult r = forgeloc::Train(
            forgeloc::InitParams(config, seed), train.inputs, train.manifest, topt);
        forgeloc::SaveCheckpointFile(checkpoint_out, r.params);
        if (!maps_out.empty()) {
          forgeloc::WriteMapsFile(
              maps_out, forgeloc::InferMaps(r.params, LoadSet(manifest_path, features_path,
                                                              maps_split)));
        }
        std::cout << json{{"steps", topt.steps},
                          {"initial_loss", r.loss_trace.empty() ? 0.0 : r.loss_trace.front()},
                          {"final_loss", r.loss_trace.empty() ? 0.0 : r.loss_trace.back()}}
                         .dump()
                  << '\n';
      };
    });
  }

  // infer
  std::string checkpoint_path;
  {
    CLI::App* cmd = add("infer", "Fused boundary maps from a checkpoint");
    cmd->add_option("--checkpoint", checkpoint_path)->required();
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("--features", features_path)->required();
    cmd->add_option("--split", split, "Restrict to train, val or test");
    cmd->add_option("-o,--out", out_path);
    cmd->final_callback([&] {
      run = [&] {
        const forgeloc::ModelParams p = forgeloc::LoadCheckpointFile(checkpoint_path);
        const auto maps =
            forgeloc::InferMaps(p, LoadSet(manifest_path, features_path, split));
        std::ostringstream s;
        forgeloc::WriteMaps(s, maps);
        Emit(out_path, s.str());
      };
    });
  }

  // synth-fixtures
  forgeloc::FixtureConfig fc;
  std::string out_dir;
  {
    CLI::App* cmd = add("synth-fixtures", "Seeded synthetic manifest and features");
    cmd->add_option("--seed", fc.seed);
    cmd->add_option("--n-videos", fc.n_videos);
    cmd->add_option("--frames", fc.frames, "Frames per video T");
    cmd->add_option("--feature-dim", fc.feature_dim, "Descriptor dim and mel bins");
    cmd->add_option("--max-duration", fc.max_duration, "Longest segment in frames");
    cmd->add_option("--separability", fc.separability);
    cmd->add_option("--noise", fc.noise);
    cmd->add_option("--content-scale", fc.content_scale);
    cmd->add_option("--fps", fc.fps);
    cmd->add_option("--out-dir", out_dir, "Writes manifest.jsonl and features.jsonl")
        ->required();
    cmd->final_callback([&] {
      run = [&] {
        const forgeloc::FixtureSet set = forgeloc::SynthFixtures(fc);
        std::filesystem::create_directories(out_dir);
        const std::filesystem::path dir(out_dir);
        forgeloc::WriteManifestFile((dir / "manifest.jsonl").string(), set.manifest);
        forgeloc::WriteFeaturesFile((dir / "features.jsonl").string(), set);
        std::cout << json{{"videos", set.manifest.size()}, {"out_dir", out_dir}}.dump()
                  << '\n';
      };
    });
  }

  // stats
  {
    CLI::App* cmd = add("stats", "Segment, length and type distributions of a manifest");
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("-o,--out", out_path);
    cmd->final_callback([&] {
      run = [&] {
        EmitLine(out_path, forgeloc::StatsToJson(forgeloc::ComputeStats(
                               forgeloc::ReadManifestFile(manifest_path))));
      };
    });
  }

  // snms-search
  {
    CLI::App* cmd = add("snms-search", "Grid search of Soft-NMS settings on validation maps");
    cmd->add_option("--maps", maps_path)->required();
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("--split", split, "Restrict the manifest (e.g. val)");
    cmd->add_option("-o,--out", out_path);
    cmd->final_callback([&] {
      run = [&] {
        forgeloc::Manifest m = forgeloc::ReadManifestFile(manifest_path);
        if (!split.empty()) {
          const auto s = forgeloc::ParseSplit(split);
          if (!s) throw Error("unknown split '" + split + "'");
          m = forgeloc::FilterSplit(m, *s);
        }
        const auto result =
            forgeloc::SearchSoftNms(forgeloc::ReadMapsFile(maps_path), m, forgeloc::SnmsGrid{});
        auto cfg_json = [](const forgeloc::SoftNmsConfig& c) {
          return json{{"method", forgeloc::DecayMethodName(c.method)},
                      {"sigma", c.sigma},
                      {"iou_cut", c.iou_cut},
                      {"score_floor", c.score_floor},
                      {"top_k", c.top_k}};
        };
        json trials = json::array();
        for (const auto& t : result.trials) {
          trials.push_back({{"config", cfg_json(t.config)}, {"objective", t.objective}});
        }
        EmitLine(out_path, json{{"best", cfg_json(result.best)},
                                {"best_objective", result.best_objective},
                                {"trials", trials}}
                               .dump(2));
      };
    });
  }

  auto parsed_command = [&] {
    for (const CLI::App* sub : app.get_subcommands({})) {
      if (sub->parsed()) return sub->get_name();
    }
    return std::string();
  };
  try {
    app.parse(argc, argv);
    command = parsed_command();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    command = parsed_command();
    std::cerr << json{{"error", e.what()}, {"command", command}}.dump() << '\n';
    return 1;
  }
  try {
    run();
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"command", command}}.dump() << '\n';
    return 1;
  }
  return 0;
}
