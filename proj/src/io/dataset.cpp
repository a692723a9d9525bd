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

#include "flowseg/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "flowseg/error.hpp"
#include "flowseg/image_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace flowseg::dataset {

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kMissingInput, "missing file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::kInvalidInput, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

bool is_frame_stem(const std::string& stem) {
  return stem.size() == 5 && std::all_of(stem.begin(), stem.end(), [](char c) { return c >= '0' && c <= '9'; });
}

json score_entry(const ScoredMask& m) {
  json e = {{"fiou", m.fiou}};
  if (m.mos) e["mos"] = *m.mos;
  return e;
}

void apply_scores(const json& entry, ScoredMask& m, const std::string& where) {
  if (!entry.is_object() || !entry.contains("fiou") || !entry["fiou"].is_number()) {
    fail(ErrorCode::kInvalidInput, "score entry without numeric fiou: " + where);
  }
  m.fiou = entry["fiou"].get<double>();
  if (entry.contains("mos") && !entry["mos"].is_null()) m.mos = entry["mos"].get<double>();
  if (m.fiou < 0.0 || m.fiou > 1.0 || (m.mos && (*m.mos < 0.0 || *m.mos > 1.0))) {
    fail(ErrorCode::kInvalidInput, "score outside [0, 1]: " + where);
  }
}

}  // namespace

std::string frame_name(int frame) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", frame);
  return buf;
}

std::vector<std::string> list_sequences(const fs::path& root, const std::vector<std::string>& requested) {
  if (!requested.empty()) return requested;
  if (!fs::is_directory(root)) fail(ErrorCode::kMissingInput, "dataset root " + root.string() + " not found");
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<fs::path> list_frame_pngs(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kMissingInput, "directory " + dir.string() + " not found");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".png" &&
        is_frame_stem(entry.path().stem().string())) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (std::size_t i = 0; i < files.size(); ++i) {
    if (files[i].stem().string() != frame_name(static_cast<int>(i))) {
      fail(ErrorCode::kMissingInput, "frame " + frame_name(static_cast<int>(i)) + ".png missing in " + dir.string());
    }
  }
  return files;
}

ObjectFrames read_label_sequence(const fs::path& dir) {
  ObjectFrames frames;
  int height = -1, width = -1;
  for (const auto& file : list_frame_pngs(dir)) {
    const LabelMap map = read_label_png(file);
    if (height >= 0 && (map.height != height || map.width != width)) {
      fail(ErrorCode::kShape, "frame size changes within " + dir.string());
    }
    height = map.height;
    width = map.width;
    frames.push_back(labels_to_masks(map, map.max_label()));
  }
  return frames;
}

void write_label_sequence(const fs::path& dir, const ObjectFrames& frames, int height, int width) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    write_label_png(dir / (frame_name(static_cast<int>(t)) + ".png"),
                    masks_to_labels(frames[t], height, width));
  }
}

std::vector<CandidateSet> read_candidates(const fs::path& sequence_dir, int grid_side) {
  const fs::path root = sequence_dir / "candidates";
  if (!fs::is_directory(root)) fail(ErrorCode::kMissingInput, "missing candidate directory " + root.string());
  std::vector<fs::path> frame_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && is_frame_stem(entry.path().filename().string())) frame_dirs.push_back(entry.path());
  }
  std::sort(frame_dirs.begin(), frame_dirs.end());
  std::vector<CandidateSet> out;
  for (std::size_t t = 0; t < frame_dirs.size(); ++t) {
    if (frame_dirs[t].filename().string() != frame_name(static_cast<int>(t))) {
      fail(ErrorCode::kMissingInput, "candidate frame " + frame_name(static_cast<int>(t)) + " missing in " + root.string());
    }
    const json scores = read_json(frame_dirs[t] / "scores.json");
    std::vector<fs::path> pngs;
    for (const auto& entry : fs::directory_iterator(frame_dirs[t])) {
      if (entry.is_regular_file() && entry.path().extension() == ".png") pngs.push_back(entry.path());
    }
    std::sort(pngs.begin(), pngs.end());
    CandidateSet set;
    set.grid_side = grid_side;
    for (const auto& png : pngs) {
      const std::string key = png.filename().string();
      if (!scores.contains(key)) {
        fail(ErrorCode::kInvalidInput, "no score for " + png.string() + " in scores.json");
      }
      ScoredMask m;
      m.mask = read_mask_png(png);
      apply_scores(scores[key], m, png.string());
      m.layer_rank = static_cast<int>(set.candidates.size());
      set.candidates.push_back(std::move(m));
    }
    out.push_back(std::move(set));
  }
  return out;
}

void write_candidates(const fs::path& sequence_dir, const std::vector<CandidateSet>& frames) {
  for (std::size_t t = 0; t < frames.size(); ++t) {
    const fs::path dir = sequence_dir / "candidates" / frame_name(static_cast<int>(t));
    fs::create_directories(dir);
    json scores = json::object();
    const auto& cands = frames[t].candidates;
    for (std::size_t k = 0; k < cands.size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof(name), "cand_%03zu.png", k);
      write_mask_png(dir / name, cands[k].mask);
      scores[name] = score_entry(cands[k]);
    }
    write_text(dir / "scores.json", scores.dump(2) + "\n");
  }
}

std::vector<FrameMasks> read_frame_predictions(const fs::path& dir) {
  const ObjectFrames labels = read_label_sequence(dir);
  json scores = json::object();
  if (fs::exists(dir / "scores.json")) scores = read_json(dir / "scores.json");
  std::vector<FrameMasks> out;
  for (std::size_t t = 0; t < labels.size(); ++t) {
    FrameMasks frame;
    frame.frame_index = static_cast<int>(t);
    const std::string key = frame_name(static_cast<int>(t));
    const json* entries = scores.contains(key) ? &scores[key] : nullptr;
    for (std::size_t k = 0; k < labels[t].size(); ++k) {
      if (labels[t][k].empty()) continue;
      ScoredMask m;
      m.mask = labels[t][k];
      m.fiou = 1.0;
      if (entries && k < entries->size()) apply_scores((*entries)[k], m, (dir / "scores.json").string());
      m.layer_rank = static_cast<int>(frame.objects.size());
      frame.objects.push_back(std::move(m));
    }
    out.push_back(std::move(frame));
  }
  return out;
}

void write_frame_predictions(const fs::path& dir, const std::vector<FrameMasks>& frames, int height,
                             int width) {
  ObjectFrames labels;
  json scores = json::object();
  for (const auto& f : frames) {
    labels.push_back(f.masks());
    json list = json::array();
    for (const auto& o : f.objects) list.push_back(score_entry(o));
    scores[frame_name(static_cast<int>(labels.size() - 1))] = std::move(list);
  }
  write_label_sequence(dir, labels, height, width);
  write_text(dir / "scores.json", scores.dump(2) + "\n");
}

std::map<int, BBox> read_boxes_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kMissingInput, "missing box file " + path.string());
  std::map<int, BBox> boxes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.rfind("frame", 0) == 0) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    int frame = 0;
    BBox b;
    if (!(row >> frame >> b.x0 >> b.y0 >> b.x1 >> b.y1) || b.x0 >= b.x1 || b.y0 >= b.y1) {
      fail(ErrorCode::kInvalidInput, path.string() + ":" + std::to_string(line_no) + ": bad box row");
    }
    boxes[frame] = b;
  }
  return boxes;
}

void write_boxes_csv(const fs::path& path, const std::map<int, BBox>& boxes) {
  std::ostringstream out;
  out << "frame,x0,y0,x1,y1\n";
  for (const auto& [frame, b] : boxes) {
    out << frame << ',' << b.x0 << ',' << b.y0 << ',' << b.x1 << ',' << b.y1 << '\n';
  }
  write_text(path, out.str());
}

}  // namespace flowseg::dataset
