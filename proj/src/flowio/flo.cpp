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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <set>

#include "flowseg/error.hpp"
#include "flowseg/flow.hpp"

namespace flowseg {

namespace {

constexpr float kFloMagic = 202021.25f;
constexpr std::size_t kFloHeader = 12;

std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_le32(std::uint32_t value, std::vector<std::uint8_t>& out) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((value >> shift) & 0xFFu));
  }
}

}  // namespace

FlowField FlowField::zeros(int height, int width, int gap, int source_frame) {
  return constant(height, width, 0.0f, 0.0f, gap, source_frame);
}

FlowField FlowField::constant(int height, int width, float du, float dv, int gap,
                              int source_frame) {
  FlowField f;
  f.height = height;
  f.width = width;
  f.gap = gap;
  f.source_frame = source_frame;
  const std::size_t n = static_cast<std::size_t>(std::max(height, 0)) *
                        static_cast<std::size_t>(std::max(width, 0));
  f.u.assign(n, du);
  f.v.assign(n, dv);
  f.validate();
  return f;
}

void FlowField::validate() const {
  if (height < 1 || width < 1) fail(ErrorCode::kParameter, "flow dimensions must be positive");
  const std::size_t n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (u.size() != n || v.size() != n) fail(ErrorCode::kParameter, "flow channel size mismatch");
  if (gap == 0) fail(ErrorCode::kParameter, "flow gap must be nonzero");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(u[i]) || !std::isfinite(v[i])) {
      fail(ErrorCode::kParameter, "flow contains non-finite displacement");
    }
  }
}

FlowGapSet::FlowGapSet() : gaps_{1, -1, 2, -2} {}

FlowGapSet::FlowGapSet(std::vector<int> gaps) : gaps_(std::move(gaps)) {
  std::set<int> seen;
  for (int g : gaps_) {
    if (g == 0) fail(ErrorCode::kParameter, "frame gap 0 is not allowed");
    if (!seen.insert(g).second) {
      fail(ErrorCode::kParameter, "duplicate frame gap " + std::to_string(g));
    }
  }
}

FlowGapSet FlowGapSet::slow_motion() { return FlowGapSet({3, -3, 6, -6}); }

FlowField read_flo(std::span<const std::uint8_t> bytes, int gap, int source_frame) {
  if (bytes.size() < kFloHeader) fail(ErrorCode::kLength, ".flo header truncated");
  const float magic = std::bit_cast<float>(load_le32(bytes.data()));
  if (magic != kFloMagic) fail(ErrorCode::kFormat, ".flo magic mismatch");
  const auto width = static_cast<std::int32_t>(load_le32(bytes.data() + 4));
  const auto height = static_cast<std::int32_t>(load_le32(bytes.data() + 8));
  if (width < 1 || height < 1) fail(ErrorCode::kFormat, ".flo has non-positive dimensions");
  const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() != kFloHeader + n * 8) {
    fail(ErrorCode::kLength, ".flo payload is " + std::to_string(bytes.size() - kFloHeader) +
                                 " bytes, expected " + std::to_string(n * 8));
  }
  FlowField f;
  f.height = height;
  f.width = width;
  f.gap = gap;
  f.source_frame = source_frame;
  f.u.resize(n);
  f.v.resize(n);
  const std::uint8_t* p = bytes.data() + kFloHeader;
  for (std::size_t i = 0; i < n; ++i, p += 8) {
    f.u[i] = std::bit_cast<float>(load_le32(p));
    f.v[i] = std::bit_cast<float>(load_le32(p + 4));
  }
  try {
    f.validate();
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, std::string(".flo content invalid: ") + e.what());
  }
  return f;
}

std::vector<std::uint8_t> write_flo(const FlowField& flow) {
  flow.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kFloHeader + flow.u.size() * 8);
  store_le32(std::bit_cast<std::uint32_t>(kFloMagic), out);
  store_le32(static_cast<std::uint32_t>(flow.width), out);
  store_le32(static_cast<std::uint32_t>(flow.height), out);
  for (std::size_t i = 0; i < flow.u.size(); ++i) {
    store_le32(std::bit_cast<std::uint32_t>(flow.u[i]), out);
    store_le32(std::bit_cast<std::uint32_t>(flow.v[i]), out);
  }
  return out;
}

FlowField read_flo_file(const std::filesystem::path& path, int gap, int source_frame) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kMissingInput, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return read_flo(bytes, gap, source_frame);
}

void write_flo_file(const std::filesystem::path& path, const FlowField& flow) {
  const auto bytes = write_flo(flow);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::kIo, "short write to " + path.string());
}

std::filesystem::path flow_file_path(const std::filesystem::path& sequence_dir, int frame,
                                     int gap) {
  char name[32];
  std::snprintf(name, sizeof(name), "%05d.flo", frame);
  return sequence_dir / "flow" / ("gap_" + std::to_string(gap)) / name;
}

void MemoryFlowSource::put(FlowField flow) {
  const auto key = std::make_pair(flow.source_frame, flow.gap);
  fields_.insert_or_assign(key, std::move(flow));
}

std::optional<FlowField> MemoryFlowSource::get(int frame, int gap) const {
  const auto it = fields_.find({frame, gap});
  if (it == fields_.end()) return std::nullopt;
  return it->second;
}

std::optional<FlowField> DirectoryFlowSource::get(int frame, int gap) const {
  const auto path = flow_file_path(dir_, frame, gap);
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    return read_flo_file(path, gap, frame);
  } catch (const Error& e) {
    fail(ErrorCode::kMissingInput, "unreadable flow file " + path.string() + ": " + e.what());
  }
}

GapFlows load_gap_flows(const std::filesystem::path& sequence_dir, int frame, int num_frames,
                        const FlowGapSet& gaps) {
  if (frame < 0 || frame >= num_frames) {
    fail(ErrorCode::kParameter, "frame " + std::to_string(frame) + " outside sequence");
  }
  const DirectoryFlowSource source(sequence_dir);
  GapFlows out;
  for (int g : gaps.gaps()) {
    const int target = frame + g;
    if (target < 0 || target >= num_frames) {
      out.unavailable_gaps.push_back(g);
      continue;
    }
    auto field = source.get(frame, g);
    if (!field) {
      fail(ErrorCode::kMissingInput,
           "missing flow file " + flow_file_path(sequence_dir, frame, g).string());
    }
    out.fields.push_back(std::move(*field));
  }
  return out;
}

}  // namespace flowseg
