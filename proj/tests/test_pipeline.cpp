// Copyright 2026 The flowseg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <map>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "flowseg/dataset.hpp"
#include "flowseg/image_io.hpp"
#include "flowseg/pipeline.hpp"
#include "test_util.hpp"

namespace flowseg {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::code_of;
using testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = slurp(e.path());
  }
  return files;
}

PipelineConfig config_of(json j) { return PipelineConfig::from_json(j.dump()); }

// synth -> select -> associate -> eval below root; returns the eval report.
json run_all(const fs::path& root, json base) {
  base["dataset_root"] = (root / "data").string();
  base["output_dir"] = (root / "data").string();
  run_synth(config_of(base));
  base["output_dir"] = (root / "frames").string();
  run_select(config_of(base));
  base["predictions_dir"] = (root / "frames").string();
  base["output_dir"] = (root / "tracks").string();
  run_associate(config_of(base));
  base["predictions_dir"] = (root / "tracks").string();
  base["output_dir"] = (root / "eval").string();
  run_eval(config_of(base));
  return json::parse(slurp(root / "eval" / "report.json"));
}

TEST(Config, DefaultsAndOverrides) {
  const PipelineConfig d = PipelineConfig::from_json("");
  EXPECT_EQ(d.workers, 1);
  EXPECT_EQ(d.selection.top_n, 5);
  EXPECT_EQ(d.protocol, Protocol::kFrame);
  const PipelineConfig c = config_of({{"model", "flowp"}, {"top_n", 3}, {"gaps", {1, -1}},
                                      {"assoc_mode", "hungarian"}, {"protocol", "sequence"},
                                      {"fixed_radius", 4.5}});
  EXPECT_EQ(c.selection.top_n, 3);
  EXPECT_EQ(c.selection.score_mode, ScoreMode::kMeanFiouMos);
  EXPECT_EQ(c.gaps.gaps(), (std::vector<int>{1, -1}));
  EXPECT_EQ(c.assoc.mode, AssocMode::kHungarianOnly);
  EXPECT_EQ(c.protocol, Protocol::kSequence);
  EXPECT_EQ(c.fixed_radius, 4.5);
}

TEST(Config, RejectsBadInput) {
  for (const char* text : {"{\"top_nn\": 3}", "[1]", "{oops", "{\"top_n\": \"three\"}",
                           "{\"model\": \"rgb\"}", "{\"top_n\": 0}", "{\"workers\": 0}",
                           "{\"assoc_mode\": \"magic\"}", "{\"dropout_prob\": 1.5}",
                           "{\"gaps\": [0]}", "{\"protocol\": \"video\"}"}) {
    EXPECT_EQ(code_of([&] { PipelineConfig::from_json(text); }), ErrorCode::kInvalidInput) << text;
  }
}

TEST(Config, HashIgnoresPathsAndWorkers) {
  const PipelineConfig a = config_of({{"output_dir", "/a"}, {"workers", 1}});
  const PipelineConfig b = config_of({{"output_dir", "/b"}, {"workers", 8}});
  const PipelineConfig c = config_of({{"top_n", 4}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(a.hash(), PipelineConfig::from_json(a.canonical_json()).hash());
}

TEST(Pipeline, CleanSynthScoresPerfectly) {
  TempDir dir("clean");
  const json report = run_all(dir.path(), {{"num_sequences", 2}, {"num_objects", 3}, {"num_frames", 8},
                                           {"id_permute_prob", 1.0}, {"sr", true}, {"seed", 3}});
  EXPECT_NEAR(report["aggregate"]["J"].get<double>(), 1.0, 1e-6);
  EXPECT_NEAR(report["aggregate"]["F"].get<double>(), 1.0, 1e-6);
  EXPECT_NEAR(report["aggregate"]["SR_mean"].get<double>(), 1.0, 1e-12);
  EXPECT_EQ(report["aggregate"]["sequences"], 2);
  const json tracks = json::parse(slurp(dir / "tracks" / "synth_000" / "tracks.json"));
  EXPECT_EQ(tracks["num_objects"], 3);
  EXPECT_EQ(tracks["decisions"].size(), 7u);
  const std::string csv = slurp(dir / "eval" / "report.csv");
  EXPECT_EQ(csv.rfind("sequence,J,F,J&F\n", 0), 0u);
  EXPECT_NE(csv.find("mean,1.000000,1.000000,1.000000"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "data" / "synth_000" / "flow" / "gap_-2" / "00002.flo"));
  EXPECT_TRUE(fs::exists(dir / "data" / "synth_001" / "corruption_log.json"));
}

TEST(Pipeline, TopOneKeepsSingleObject) {
  TempDir dir("top1");
  json base = {{"num_objects", 3}, {"num_frames", 4}, {"top_n", 1}};
  run_all(dir.path(), base);
  for (const auto& f : dataset::read_frame_predictions(dir / "frames" / "synth_000")) {
    EXPECT_LE(f.objects.size(), 1u);
  }
}

TEST(Pipeline, SequenceProtocolNeverBeatsFrame) {
  TempDir dir("protocols");
  json base = {{"num_objects", 4}, {"num_frames", 10}, {"id_permute_prob", 1.0},
               {"assoc_mode", "hungarian"}, {"flag_override", "none"}, {"seed", 8}};
  const json frame = run_all(dir.path(), base);
  base["protocol"] = "sequence";
  base["dataset_root"] = (dir / "data").string();
  base["predictions_dir"] = (dir / "frames").string();
  base["output_dir"] = (dir / "seq_eval").string();
  run_eval(config_of(base));
  const json seq = json::parse(slurp(dir / "seq_eval" / "report.json"));
  EXPECT_EQ(seq["protocol"], "sequence");
  // Raw frame-level output keeps the scrambled identities.
  EXPECT_LT(seq["aggregate"]["J"].get<double>(), 0.99);
  base["protocol"] = "frame";
  base["output_dir"] = (dir / "frame_eval").string();
  run_eval(config_of(base));
  const json raw_frame = json::parse(slurp(dir / "frame_eval" / "report.json"));
  EXPECT_NEAR(raw_frame["aggregate"]["J"].get<double>(), 1.0, 1e-9);
  EXPECT_NEAR(frame["aggregate"]["J"].get<double>(), 1.0, 1e-9);
}

TEST(Pipeline, DeterministicAcrossRunsAndWorkers) {
  const json base = {{"num_sequences", 6}, {"num_objects", 4}, {"num_frames", 10}, {"seed", 21},
                     {"id_permute_prob", 0.5}, {"dropout_prob", 0.1}, {"jitter_px", 1},
                     {"duplicate_prob", 0.2}};
  TempDir a("det_a"), b("det_b"), c("det_c");
  json one = base, eight = base;
  one["workers"] = 1;
  eight["workers"] = 8;
  run_all(a.path(), one);
  run_all(b.path(), one);
  run_all(c.path(), eight);
  const auto ta = tree(a.path());
  EXPECT_GT(ta.size(), 100u);
  EXPECT_TRUE(ta == tree(b.path()));
  EXPECT_TRUE(ta == tree(c.path()));
}

TEST(Pipeline, MissingScoresNamedInManifest) {
  TempDir dir("noscores");
  json base = {{"num_sequences", 2}, {"num_frames", 3}, {"output_dir", (dir / "data").string()}};
  run_synth(config_of(base));
  fs::remove(dir / "data" / "synth_001" / "candidates" / "00001" / "scores.json");
  base["dataset_root"] = (dir / "data").string();
  base["output_dir"] = (dir / "frames").string();
  EXPECT_EQ(code_of([&] { run_select(config_of(base)); }), ErrorCode::kMissingInput);
  const json manifest = json::parse(slurp(dir / "frames" / "errors.json"));
  EXPECT_FALSE(manifest.contains("synth_000"));
  EXPECT_EQ(manifest["synth_001"]["code"], "missing input");
  EXPECT_NE(manifest["synth_001"]["message"].get<std::string>().find("scores.json"), std::string::npos);
  // The healthy sequence still produced output.
  EXPECT_TRUE(fs::exists(dir / "frames" / "synth_000" / "00002.png"));
}

TEST(Pipeline, RequiredInputs) {
  EXPECT_EQ(code_of([] { run_select(PipelineConfig{}); }), ErrorCode::kInvalidInput);
  EXPECT_EQ(code_of([] { run_synth(PipelineConfig{}); }), ErrorCode::kInvalidInput);
  PipelineConfig c;
  c.dataset_root = "/nonexistent/flowseg";
  c.output_dir = "/tmp";
  EXPECT_EQ(code_of([&] { run_select(c); }), ErrorCode::kMissingInput);
  PipelineConfig v;
  v.input = "/nonexistent/a.flo";
  v.output = "/tmp/a.png";
  EXPECT_EQ(code_of([&] { run_flow_vis(v); }), ErrorCode::kMissingInput);
}

TEST(Pipeline, CombineLayersBackBehindFront) {
  TempDir dir("combine");
  Mask f(4, 6), bk(4, 6);
  for (int y = 0; y < 4; ++y) {
    f.set(0, y);
    f.set(1, y);
    bk.set(1, y);
    bk.set(4, y);
  }
  ScoredMask front{f, 1.0, std::nullopt, 0};
  ScoredMask back{bk, 1.0, std::nullopt, 0};
  dataset::write_frame_predictions(dir / "front" / "s", {FrameMasks{0, {front}}}, 4, 6);
  dataset::write_frame_predictions(dir / "back" / "s", {FrameMasks{0, {back}}}, 4, 6);
  run_combine(config_of({{"predictions_dir", (dir / "front").string()},
                         {"back_dir", (dir / "back").string()},
                         {"output_dir", (dir / "out").string()}}));
  const auto out = dataset::read_frame_predictions(dir / "out" / "s");
  ASSERT_EQ(out.size(), 1u);
  ASSERT_EQ(out[0].objects.size(), 2u);
  EXPECT_EQ(out[0].objects[0].mask, f);
  EXPECT_EQ(out[0].objects[1].mask, difference(bk, f));
}

TEST(Pipeline, FlowVisAndLosses) {
  TempDir dir("vis");
  write_flo_file(dir / "z.flo", FlowField::zeros(3, 4));
  run_flow_vis(config_of({{"input", (dir / "z.flo").string()}, {"output", (dir / "z.png").string()}}));
  const RgbImage img = read_rgb_png(dir / "z.png");
  for (auto p : img.pixels) EXPECT_GE(p, 254);

  const json items = {{"lambda_f", 0.01}, {"lambda_m", 0.0},
                      {"items", {{{"height", 1}, {"width", 2}, {"prob", {0.5, 0.5}}, {"gt", {1, 0}},
                                  {"fiou", 0.3}, {"fiou_target", 0.3}}}}};
  std::ofstream(dir / "l.json") << items.dump();
  run_losses(config_of({{"input", (dir / "l.json").string()}, {"output", (dir / "l_out.json").string()}}));
  const json r = json::parse(slurp(dir / "l_out.json"));
  EXPECT_NEAR(r["loss_flowi"].get<double>(), std::log(2.0), 1e-9);
  EXPECT_EQ(r["loss_flowi"], r["loss_flowp"]);
  std::ofstream(dir / "bad.json") << "{\"items\": [{\"height\": 1}]}";
  EXPECT_EQ(code_of([&] { run_losses(config_of({{"input", (dir / "bad.json").string()}})); }),
            ErrorCode::kInvalidInput);
}

}  // namespace
}  // namespace flowseg
