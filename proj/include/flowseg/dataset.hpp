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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flowseg/association.hpp"
#include "flowseg/evaluation.hpp"
#include "flowseg/selection.hpp"

namespace flowseg {

// On-disk layout of one sequence below the dataset root:
//
//   <seq>/annotations/<frame>.png        palette PNG, 0 = background, k = object k
//   <seq>/flow/gap_<g>/<frame>.flo       see flow.hpp
//   <seq>/candidates/<frame>/*.png       one binary mask per point prompt
//   <seq>/candidates/<frame>/scores.json {"<file>": {"fiou": f, "mos": m?}}
//   <seq>/boxes.csv                      frame,x0,y0,x1,y1
//
// Frame-level predictions live in <dir>/<seq>/<frame>.png with label k for
// layer k-1, plus <dir>/<seq>/scores.json; sequence tracks use label i+1 for
// object i, plus <dir>/<seq>/tracks.json.
namespace dataset {

std::string frame_name(int frame);  // zero-padded to 5 digits

// Sorted subdirectories of root, or `requested` verbatim when nonempty.
std::vector<std::string> list_sequences(const std::filesystem::path& root,
                                        const std::vector<std::string>& requested);

// Sorted <frame>.png files directly inside dir.
std::vector<std::filesystem::path> list_frame_pngs(const std::filesystem::path& dir);

ObjectFrames read_label_sequence(const std::filesystem::path& dir);
void write_label_sequence(const std::filesystem::path& dir, const ObjectFrames& frames,
                          int height, int width);

std::vector<CandidateSet> read_candidates(const std::filesystem::path& sequence_dir,
                                          int grid_side = 10);
void write_candidates(const std::filesystem::path& sequence_dir,
                      const std::vector<CandidateSet>& frames);

std::vector<FrameMasks> read_frame_predictions(const std::filesystem::path& dir);
void write_frame_predictions(const std::filesystem::path& dir, const std::vector<FrameMasks>& frames,
                             int height, int width);

std::map<int, BBox> read_boxes_csv(const std::filesystem::path& path);
void write_boxes_csv(const std::filesystem::path& path, const std::map<int, BBox>& boxes);

}  // namespace dataset
}  // namespace flowseg
