// Copyright 2026 The forgeloc Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the command-line tool end to end on a tiny synthetic dataset.

#include <cstdio>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliRun {
  int status = -1;
  std::string out;
};

CliRun Cli(const std::string& args) {
  const std::string cmd = std::string(FORGELOC_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (p == nullptr) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("forgeloc_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }
  static std::string Path(const std::string& name) { return (dir_ / name).string(); }

  static fs::path dir_;
};

fs::path CliTest::dir_;

TEST_F(CliTest, VersionAndHelp) {
  EXPECT_EQ(Cli("--version").status, 0);
  const CliRun r = Cli("--help");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("synth-fixtures"), std::string::npos);
}

TEST_F(CliTest, ErrorsAreJson) {
  const CliRun r = Cli("stats --manifest " + Path("does_not_exist.jsonl"));
  EXPECT_EQ(r.status, 1);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("command").get<std::string>(), "stats");
}

TEST_F(CliTest, TrainInferDecodeEvaluate) {
  ASSERT_EQ(Cli("synth-fixtures --out-dir " + dir_.string() +
                " --n-videos 40 --frames 12 --feature-dim 4 --max-duration 4")
                .status,
            0);
  const std::string manifest = Path("manifest.jsonl");
  const std::string features = Path("features.jsonl");

  const CliRun stats = Cli("stats --manifest " + manifest);
  ASSERT_EQ(stats.status, 0) << stats.out;
  EXPECT_EQ(json::parse(stats.out).at("videos").get<int>(), 40);

  const CliRun gt = Cli("gt-map --manifest " + manifest + " --video-id synth_00");
  ASSERT_EQ(gt.status, 0) << gt.out;
  EXPECT_EQ(json::parse(gt.out).at("video_id").get<std::string>(), "synth_00");

  const CliRun train = Cli("train --manifest " + manifest + " --features " + features +
                        " --steps 5 --feature-dim 4 --max-duration 4 --checkpoint-out " +
                        Path("model.json"));
  ASSERT_EQ(train.status, 0) << train.out;
  EXPECT_EQ(json::parse(train.out).at("steps").get<int>(), 5);

  ASSERT_EQ(Cli("infer --checkpoint " + Path("model.json") + " --manifest " + manifest +
                " --features " + features + " --split test -o " + Path("maps.jsonl"))
                .status,
            0);
  ASSERT_EQ(Cli("decode --maps " + Path("maps.jsonl") + " --method linear -o " +
                Path("preds.jsonl"))
                .status,
            0);
  const CliRun eval = Cli("eval --manifest " + manifest + " --predictions " +
                       Path("preds.jsonl") + " --split test");
  ASSERT_EQ(eval.status, 0) << eval.out;
  const json report = json::parse(eval.out);
  EXPECT_EQ(report.at("counts").at("videos").get<int>(), 10);
  EXPECT_TRUE(report.at("ap").contains("0.5"));

  const CliRun search = Cli("snms-search --maps " + Path("maps.jsonl") + " --manifest " +
                         manifest + " --split test");
  EXPECT_EQ(search.status, 0) << search.out;
}

TEST_F(CliTest, PlanWritesVariants) {
  std::ofstream(Path("t.json"))
      << R"({"duration": 1.2, "tokens": [{"text": "Vaccinations", "start": 0.0, "end": 0.5},)"
      << R"({"text": "are", "start": 0.5, "end": 0.7}, {"text": "safe.", "start": 0.7, "end": 1.1}]})";
  std::ofstream(Path("lex.tsv")) << "safe\t1.9\ndangerous\t-2.1\nunsafe\t-1.5\n";
  std::ofstream(Path("ant.tsv")) << "safe\tdangerous\tunsafe\n";
  const CliRun r = Cli("plan --transcript " + Path("t.json") + " --lexicon " + Path("lex.tsv") +
                    " --antonyms " + Path("ant.tsv") + " --video-id talk --fps 25" +
                    " --variants-out " + Path("variants.jsonl"));
  ASSERT_EQ(r.status, 0) << r.out;
  const json plan = json::parse(r.out);
  EXPECT_EQ(plan.at("replacements")[0].at("replacement").get<std::string>(), "dangerous");
  std::ifstream in(Path("variants.jsonl"));
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST_F(CliTest, GradcheckPasses) {
  const CliRun r = Cli("gradcheck --instances 3");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_FALSE(json::parse(r.out).empty());
}

}  // namespace
