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

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "flowseg/dataset.hpp"
#include "flowseg/image_io.hpp"
#include "flowseg/log.hpp"
#include "flowseg/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace flowseg {

namespace {

struct SequenceFailure {
  ErrorCode code = ErrorCode::kInternal;
  std::string message;
};

// Runs fn(index) for every sequence on `workers` threads. Slot i of the result
// holds the failure of sequence i, if any.
template <typename Fn>
std::vector<std::optional<SequenceFailure>> for_each_sequence(std::size_t count, int workers, Fn fn) {
  std::vector<std::optional<SequenceFailure>> failures(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (const Error& e) {
        failures[i] = SequenceFailure{e.code(), e.what()};
      } catch (const fs::filesystem_error& e) {
        failures[i] = SequenceFailure{ErrorCode::kIo, e.what()};
      } catch (const std::exception& e) {
        failures[i] = SequenceFailure{ErrorCode::kInternal, e.what()};
      }
    }
  };
  const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), std::max<std::size_t>(count, 1));
  if (n_threads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(work);
  }
  return failures;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

// Writes <output>/errors.json when anything failed and rethrows the first
// failure in sequence order.
void settle(const fs::path& output_dir, const std::vector<std::string>& names,
            const std::vector<std::optional<SequenceFailure>>& failures) {
  json manifest = json::object();
  const SequenceFailure* first = nullptr;
  std::string first_name;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!failures[i]) continue;
    manifest[names[i]] = {{"code", to_string(failures[i]->code)}, {"message", failures[i]->message}};
    logger().error("{}: {}", names[i], failures[i]->message);
    if (first == nullptr) {
      first = &*failures[i];
      first_name = names[i];
    }
  }
  if (first == nullptr) return;
  write_text(output_dir / "errors.json", manifest.dump(2) + "\n");
  fail(first->code, first_name + ": " + first->message);
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::kInvalidInput, what);
}

void require_dir(const fs::path& p, const char* key) {
  require(!p.empty(), std::string(key) + " is required");
  if (!fs::is_directory(p)) fail(ErrorCode::kMissingInput, std::string(key) + " " + p.string() + " does not exist");
}

std::pair<int, int> first_frame_size(const fs::path& dir) {
  const auto files = dataset::list_frame_pngs(dir);
  if (files.empty()) fail(ErrorCode::kMissingInput, "no frames in " + dir.string());
  const LabelMap m = read_label_png(files.front());
  return {m.height, m.width};
}

std::pair<int, int> frame_size_of(const std::vector<FrameMasks>& frames) {
  for (const auto& f : frames) {
    if (!f.objects.empty()) return {f.objects.front().mask.height(), f.objects.front().mask.width()};
  }
  return {0, 0};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finaliser
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

const char* decision_name(Decision d) { return d == Decision::kUpdate ? "update" : "propagate"; }

}  // namespace

void run_select(const PipelineConfig& config) {
  require_dir(config.dataset_root, "dataset_root");
  require(!config.output_dir.empty(), "output_dir is required");
  const auto names = dataset::list_sequences(config.dataset_root, config.sequences);
  auto failures = for_each_sequence(names.size(), config.workers, [&](std::size_t i) {
    const fs::path seq = config.dataset_root / names[i];
    const auto candidates = dataset::read_candidates(seq);
    std::vector<FrameMasks> frames;
    for (std::size_t t = 0; t < candidates.size(); ++t) {
      frames.push_back(select_frame(candidates[t], config.selection, static_cast<int>(t)));
    }
    auto [h, w] = frame_size_of(frames);
    if (h == 0) {
      for (const auto& c : candidates) {
        if (!c.candidates.empty()) {
          h = c.candidates.front().mask.height();
          w = c.candidates.front().mask.width();
          break;
        }
      }
    }
    if (h == 0) std::tie(h, w) = first_frame_size(seq / "annotations");
    dataset::write_frame_predictions(config.output_dir / names[i], frames, h, w);
  });
  settle(config.output_dir, names, failures);
}

void run_combine(const PipelineConfig& config) {
  require_dir(config.predictions_dir, "predictions_dir");
  require_dir(config.back_dir, "back_dir");
  require(!config.output_dir.empty(), "output_dir is required");
  const auto names = dataset::list_sequences(config.predictions_dir, config.sequences);
  auto failures = for_each_sequence(names.size(), config.workers, [&](std::size_t i) {
    const auto front = dataset::read_frame_predictions(config.predictions_dir / names[i]);
    const auto back = dataset::read_frame_predictions(config.back_dir / names[i]);
    if (front.size() != back.size()) {
      fail(ErrorCode::kShape, "front and back predictions differ in frame count");
    }
    std::vector<FrameMasks> out;
    for (std::size_t t = 0; t < front.size(); ++t) out.push_back(combine_predictions(front[t], back[t]));
    const auto [h, w] = first_frame_size(config.predictions_dir / names[i]);
    dataset::write_frame_predictions(config.output_dir / names[i], out, h, w);
  });
  settle(config.output_dir, names, failures);
}

void run_associate(const PipelineConfig& config) {
  require_dir(config.predictions_dir, "predictions_dir");
  require(!config.output_dir.empty(), "output_dir is required");
  if (config.assoc.mode != AssocMode::kHungarianOnly) require_dir(config.dataset_root, "dataset_root");
  const auto names = dataset::list_sequences(config.predictions_dir, config.sequences);
  const std::string hash = config.hash();
  auto failures = for_each_sequence(names.size(), config.workers, [&](std::size_t i) {
    const fs::path pred_dir = config.predictions_dir / names[i];
    const auto frames = dataset::read_frame_predictions(pred_dir);
    const DirectoryFlowSource flows(config.dataset_root / names[i]);
    const SequenceTracks tracks = associate_sequence(frames, flows, config.assoc);
    const auto [h, w] = first_frame_size(pred_dir);
    const fs::path out = config.output_dir / names[i];
    dataset::write_label_sequence(out, tracks.frames, h, w);

    json doc;
    doc["config_hash"] = hash;
    doc["num_objects"] = tracks.num_objects;
    doc["layer_order"] = tracks.layer_order;
    json objects = json::object();
    for (int k = 0; k < tracks.num_objects; ++k) {
      objects[std::to_string(k)] = tracks.layer_order[static_cast<std::size_t>(k)];
    }
    doc["objects"] = objects;
    json log = json::array();
    for (std::size_t t = 1; t < tracks.decisions.size(); ++t) {
      json records = json::array();
      for (const auto& r : tracks.decisions[t]) {
        json per_delta = json::array();
        for (const auto& [delta, flag] : r.per_delta) per_delta.push_back({delta, flag});
        records.push_back({{"object", r.object}, {"per_delta", per_delta}, {"mean", r.mean},
                           {"decision", decision_name(r.decision)}});
      }
      log.push_back({{"frame", t}, {"records", records}});
    }
    doc["decisions"] = log;
    write_text(out / "tracks.json", doc.dump(2) + "\n");
  });
  settle(config.output_dir, names, failures);
}

void run_eval(const PipelineConfig& config) {
  require_dir(config.dataset_root, "dataset_root");
  require_dir(config.predictions_dir, "predictions_dir");
  require(!config.output_dir.empty(), "output_dir is required");
  const auto names = dataset::list_sequences(config.dataset_root, config.sequences);
  struct Result {
    SequenceScore score;
    std::optional<SuccessRate> sr;
  };
  std::vector<Result> results(names.size());
  auto failures = for_each_sequence(names.size(), config.workers, [&](std::size_t i) {
    ObjectFrames gt = dataset::read_label_sequence(config.dataset_root / names[i] / "annotations");
    const auto [h, w] = first_frame_size(config.dataset_root / names[i] / "annotations");
    std::size_t num_gt = 0;
    for (const auto& f : gt) num_gt = std::max(num_gt, f.size());
    for (auto& f : gt) f.resize(num_gt, Mask(h, w));
    const ObjectFrames pred = dataset::read_label_sequence(config.predictions_dir / names[i]);
    if (pred.size() != gt.size()) {
      fail(ErrorCode::kShape, "prediction has " + std::to_string(pred.size()) + " frames, ground truth " +
                                  std::to_string(gt.size()));
    }
    results[i].score = evaluate_sequence(pred, gt, config.protocol);
    const fs::path boxes = config.dataset_root / names[i] / "boxes.csv";
    if (config.sr && fs::exists(boxes)) {
      results[i].sr = moca_sr(pred, dataset::read_boxes_csv(boxes), config.sr_thresholds);
    }
  });

  json per_sequence = json::object();
  std::ostringstream csv;
  csv << "sequence,J,F,J&F\n";
  double sum_j = 0.0, sum_f = 0.0, sum_sr = 0.0;
  int count = 0, sr_count = 0;
  char line[256];
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (failures[i]) continue;
    const auto& r = results[i];
    json entry = {{"J", r.score.j}, {"F", r.score.f}, {"JF", r.score.jf}};
    if (r.sr) {
      json sr = json::object();
      for (const auto& [tau, value] : r.sr->per_threshold) {
        char key[16];
        std::snprintf(key, sizeof(key), "%.2f", tau);
        sr[key] = value;
      }
      sr["mean"] = r.sr->mean;
      entry["SR"] = sr;
      sum_sr += r.sr->mean;
      ++sr_count;
    }
    per_sequence[names[i]] = entry;
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f\n", names[i].c_str(), r.score.j, r.score.f, r.score.jf);
    csv << line;
    sum_j += r.score.j;
    sum_f += r.score.f;
    ++count;
  }
  json aggregate = json::object();
  if (count > 0) {
    const double j = sum_j / count, f = sum_f / count;
    aggregate = {{"J", j}, {"F", f}, {"JF", (j + f) / 2.0}, {"sequences", count}};
    if (sr_count > 0) aggregate["SR_mean"] = sum_sr / sr_count;
    std::snprintf(line, sizeof(line), "mean,%.6f,%.6f,%.6f\n", j, f, (j + f) / 2.0);
    csv << line;
  }
  const json report = {{"protocol", config.protocol == Protocol::kFrame ? "frame" : "sequence"},
                       {"config_hash", config.hash()},
                       {"per_sequence", per_sequence},
                       {"aggregate", aggregate}};
  write_text(config.output_dir / "report.json", report.dump(2) + "\n");
  write_text(config.output_dir / "report.csv", csv.str());
  settle(config.output_dir, names, failures);
}

void run_synth(const PipelineConfig& config) {
  require(!config.output_dir.empty(), "output_dir is required");
  require(config.num_sequences >= 1, "num_sequences must be >= 1");
  std::vector<std::string> names = config.sequences;
  if (names.empty()) {
    for (int s = 0; s < config.num_sequences; ++s) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "synth_%03d", s);
      names.emplace_back(buf);
    }
  }
  auto failures = for_each_sequence(names.size(), config.workers, [&](std::size_t i) {
    const std::uint64_t seed = mix_seed(config.seed, i);
    SceneSpec spec = random_scene(seed, config.num_objects, config.num_frames, config.height,
                                  config.width, config.max_speed);
    spec.background_vx = config.background_vx;
    spec.background_vy = config.background_vy;
    spec.corruption = config.corruption;
    spec.gaps = config.gaps;
    const RenderedScene scene = render(spec);
    const CorruptedSequence noisy = corrupt(scene.gt, spec.corruption, mix_seed(seed, 0x5eed));

    const fs::path seq = config.output_dir / names[i];
    dataset::write_label_sequence(seq / "annotations", scene.gt.frames, spec.height, spec.width);
    for (int t = 0; t < spec.num_frames; ++t) {
      for (int g : spec.gaps.gaps()) {
        if (auto f = scene.flows.get(t, g)) write_flo_file(flow_file_path(seq, t, g), *f);
      }
    }
    dataset::write_candidates(seq, noisy.candidates);

    std::map<int, BBox> boxes;
    for (int t = 0; t < spec.num_frames; ++t) {
      Mask all(spec.height, spec.width);
      for (const auto& m : scene.gt.frames[static_cast<std::size_t>(t)]) all |= m;
      if (!all.empty()) boxes[t] = tight_bbox(all);
    }
    dataset::write_boxes_csv(seq / "boxes.csv", boxes);

    json log = json::array();
    for (const auto& e : noisy.log) {
      log.push_back({{"frame", e.frame}, {"kind", e.kind}, {"object", e.object}, {"detail", e.detail}});
    }
    write_text(seq / "corruption_log.json", log.dump(2) + "\n");

    json objects = json::array();
    for (const auto& o : spec.objects) {
      objects.push_back({{"shape", o.shape == ShapeKind::kRect ? "rect" : "ellipse"},
                         {"width", o.width}, {"height", o.height}, {"x", o.x}, {"y", o.y},
                         {"vx", o.vx}, {"vy", o.vy}, {"depth", o.depth}});
    }
    const json scene_doc = {{"seed", seed}, {"height", spec.height}, {"width", spec.width},
                            {"num_frames", spec.num_frames}, {"objects", objects},
                            {"background_velocity", {spec.background_vx, spec.background_vy}},
                            {"warnings", scene.warnings}};
    write_text(seq / "scene.json", scene_doc.dump(2) + "\n");
  });
  settle(config.output_dir, names, failures);
}

void run_flow_vis(const PipelineConfig& config) {
  require(!config.input.empty(), "input is required");
  require(!config.output.empty(), "output is required");
  const FlowNormalization norm =
      config.fixed_radius ? FlowNormalization::fixed(*config.fixed_radius) : FlowNormalization::per_frame_max();
  if (fs::is_directory(config.input)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config.input)) {
      if (entry.path().extension() == ".flo") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      fs::path out = config.output / f.filename();
      out.replace_extension(".png");
      write_rgb_png(out, flow_to_rgb(read_flo_file(f), norm));
    }
    return;
  }
  if (!fs::exists(config.input)) fail(ErrorCode::kMissingInput, "missing flow file " + config.input.string());
  write_rgb_png(config.output, flow_to_rgb(read_flo_file(config.input), norm));
}

void run_losses(const PipelineConfig& config) {
  require(!config.input.empty(), "input is required");
  std::ifstream in(config.input);
  if (!in) fail(ErrorCode::kMissingInput, "missing loss input " + config.input.string());
  LossWeights weights;
  std::vector<LossItem> items;
  try {
    const json doc = json::parse(in);
    weights.lambda_f = doc.value("lambda_f", weights.lambda_f);
    weights.lambda_m = doc.value("lambda_m", weights.lambda_m);
    for (const auto& e : doc.at("items")) {
      LossItem item;
      item.pred.height = e.at("height").get<int>();
      item.pred.width = e.at("width").get<int>();
      item.pred.p = e.at("prob").get<std::vector<double>>();
      const auto gt = e.at("gt").get<std::vector<std::uint8_t>>();
      item.gt = Mask::from_bytes(item.pred.height, item.pred.width, gt);
      item.fiou = e.at("fiou").get<double>();
      item.fiou_target = e.at("fiou_target").get<double>();
      item.mos = e.value("mos", 0.0);
      item.mos_target = e.value("mos_target", 0.0);
      items.push_back(std::move(item));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kInvalidInput, std::string("bad loss input: ") + e.what());
  }
  const json result = {{"loss_flowi", loss_flowi(items, weights)},
                       {"loss_flowp", loss_flowp(items, weights)},
                       {"lambda_f", weights.lambda_f},
                       {"lambda_m", weights.lambda_m},
                       {"items", items.size()}};
  if (config.output.empty()) {
    std::cout << result.dump(2) << "\n";
  } else {
    write_text(config.output, result.dump(2) + "\n");
  }
}

}  // namespace flowseg
