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

#include "flowseg/flowseg.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <string>

#include "flowseg/assignment.hpp"
#include "flowseg/error.hpp"
#include "flowseg/flow.hpp"
#include "flowseg/image_io.hpp"
#include "flowseg/mask.hpp"
#include "flowseg/pipeline.hpp"

struct flowseg_mask {
  flowseg::Mask value;
};

struct flowseg_flow {
  flowseg::FlowField value;
};

namespace {

thread_local std::string g_last_error;

flowseg_status to_status(flowseg::ErrorCode code) {
  using flowseg::ErrorCode;
  switch (code) {
    case ErrorCode::kShape: return FLOWSEG_ERR_SHAPE;
    case ErrorCode::kInvalidInput: return FLOWSEG_ERR_INVALID_INPUT;
    case ErrorCode::kFormat: return FLOWSEG_ERR_FORMAT;
    case ErrorCode::kLength: return FLOWSEG_ERR_LENGTH;
    case ErrorCode::kParameter: return FLOWSEG_ERR_PARAMETER;
    case ErrorCode::kEmptyMask: return FLOWSEG_ERR_EMPTY_MASK;
    case ErrorCode::kMissingInput: return FLOWSEG_ERR_MISSING_INPUT;
    case ErrorCode::kIo: return FLOWSEG_ERR_IO;
    case ErrorCode::kInternal: return FLOWSEG_ERR_INTERNAL;
  }
  return FLOWSEG_ERR_INTERNAL;
}

flowseg_status failed(flowseg_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs fn and converts any exception into a status code.
template <typename Fn>
flowseg_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return FLOWSEG_OK;
  } catch (const flowseg::Error& e) {
    return failed(to_status(e.code()), e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return failed(FLOWSEG_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return failed(FLOWSEG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return failed(FLOWSEG_ERR_INTERNAL, e.what());
  } catch (...) {
    return failed(FLOWSEG_ERR_INTERNAL, "unknown exception");
  }
}

#define FLOWSEG_REQUIRE(ptr)                                                \
  do {                                                                      \
    if ((ptr) == nullptr) return failed(FLOWSEG_ERR_NULL_ARGUMENT, #ptr " is null"); \
  } while (0)

template <typename Run>
flowseg_status run_command(const char* config_json, Run run) {
  FLOWSEG_REQUIRE(config_json);
  return guarded([&] { run(flowseg::PipelineConfig::from_json(config_json)); });
}

}  // namespace

extern "C" {

const char* flowseg_version(void) { return "1.0.0"; }

const char* flowseg_last_error(void) { return g_last_error.c_str(); }

const char* flowseg_status_string(flowseg_status status) {
  switch (status) {
    case FLOWSEG_OK: return "ok";
    case FLOWSEG_ERR_SHAPE: return "shape error";
    case FLOWSEG_ERR_INVALID_INPUT: return "invalid input";
    case FLOWSEG_ERR_FORMAT: return "format error";
    case FLOWSEG_ERR_LENGTH: return "length error";
    case FLOWSEG_ERR_PARAMETER: return "parameter error";
    case FLOWSEG_ERR_EMPTY_MASK: return "empty mask";
    case FLOWSEG_ERR_MISSING_INPUT: return "missing input";
    case FLOWSEG_ERR_IO: return "i/o error";
    case FLOWSEG_ERR_INTERNAL: return "internal error";
    case FLOWSEG_ERR_NULL_ARGUMENT: return "null argument";
  }
  return "unknown status";
}

flowseg_status flowseg_mask_create(int height, int width, flowseg_mask** out) {
  FLOWSEG_REQUIRE(out);
  return guarded([&] { *out = new flowseg_mask{flowseg::Mask(height, width)}; });
}

flowseg_status flowseg_mask_from_bytes(int height, int width, const uint8_t* bytes, flowseg_mask** out) {
  FLOWSEG_REQUIRE(bytes);
  FLOWSEG_REQUIRE(out);
  return guarded([&] {
    if (height < 1 || width < 1) flowseg::fail(flowseg::ErrorCode::kShape, "mask dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    *out = new flowseg_mask{flowseg::Mask::from_bytes(height, width, {bytes, n})};
  });
}

void flowseg_mask_destroy(flowseg_mask* mask) { delete mask; }

flowseg_status flowseg_mask_dims(const flowseg_mask* mask, int* height, int* width) {
  FLOWSEG_REQUIRE(mask);
  FLOWSEG_REQUIRE(height);
  FLOWSEG_REQUIRE(width);
  *height = mask->value.height();
  *width = mask->value.width();
  return FLOWSEG_OK;
}

flowseg_status flowseg_mask_set(flowseg_mask* mask, int x, int y, int on) {
  FLOWSEG_REQUIRE(mask);
  if (!mask->value.contains(x, y)) return failed(FLOWSEG_ERR_PARAMETER, "pixel outside mask");
  mask->value.set(x, y, on != 0);
  return FLOWSEG_OK;
}

flowseg_status flowseg_mask_get(const flowseg_mask* mask, int x, int y, int* on) {
  FLOWSEG_REQUIRE(mask);
  FLOWSEG_REQUIRE(on);
  if (!mask->value.contains(x, y)) return failed(FLOWSEG_ERR_PARAMETER, "pixel outside mask");
  *on = mask->value.get(x, y) ? 1 : 0;
  return FLOWSEG_OK;
}

flowseg_status flowseg_mask_area(const flowseg_mask* mask, size_t* area) {
  FLOWSEG_REQUIRE(mask);
  FLOWSEG_REQUIRE(area);
  *area = mask->value.area();
  return FLOWSEG_OK;
}

flowseg_status flowseg_mask_to_bytes(const flowseg_mask* mask, uint8_t* bytes, size_t len) {
  FLOWSEG_REQUIRE(mask);
  FLOWSEG_REQUIRE(bytes);
  if (len < mask->value.size()) return failed(FLOWSEG_ERR_LENGTH, "output buffer too small");
  const auto data = mask->value.to_bytes();
  std::memcpy(bytes, data.data(), data.size());
  return FLOWSEG_OK;
}

flowseg_status flowseg_mask_read_png(const char* path, flowseg_mask** out) {
  FLOWSEG_REQUIRE(path);
  FLOWSEG_REQUIRE(out);
  return guarded([&] { *out = new flowseg_mask{flowseg::read_mask_png(path)}; });
}

flowseg_status flowseg_mask_write_png(const flowseg_mask* mask, const char* path) {
  FLOWSEG_REQUIRE(mask);
  FLOWSEG_REQUIRE(path);
  return guarded([&] { flowseg::write_mask_png(path, mask->value); });
}

flowseg_status flowseg_iou(const flowseg_mask* a, const flowseg_mask* b, double* out) {
  FLOWSEG_REQUIRE(a);
  FLOWSEG_REQUIRE(b);
  FLOWSEG_REQUIRE(out);
  return guarded([&] { *out = flowseg::iou(a->value, b->value); });
}

flowseg_status flowseg_solve_assignment(const double* weights, size_t rows, size_t cols, int maximize,
                                        int* row_to_col, double* total_weight) {
  if (rows > 0 && cols > 0) FLOWSEG_REQUIRE(weights);
  if (rows > 0) FLOWSEG_REQUIRE(row_to_col);
  return guarded([&] {
    flowseg::Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = weights[r * cols + c];
    }
    const auto a = flowseg::solve_assignment(
        m, maximize ? flowseg::Objective::kMaximize : flowseg::Objective::kMinimize);
    std::copy(a.row_to_col.begin(), a.row_to_col.end(), row_to_col);
    if (total_weight) *total_weight = a.total_weight;
  });
}

flowseg_status flowseg_flow_create(int height, int width, const float* u, const float* v, int gap,
                                   int source_frame, flowseg_flow** out) {
  FLOWSEG_REQUIRE(u);
  FLOWSEG_REQUIRE(v);
  FLOWSEG_REQUIRE(out);
  return guarded([&] {
    if (height < 1 || width < 1) flowseg::fail(flowseg::ErrorCode::kParameter, "flow dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
    flowseg::FlowField f;
    f.height = height;
    f.width = width;
    f.u.assign(u, u + n);
    f.v.assign(v, v + n);
    f.gap = gap;
    f.source_frame = source_frame;
    f.validate();
    *out = new flowseg_flow{std::move(f)};
  });
}

void flowseg_flow_destroy(flowseg_flow* flow) { delete flow; }

flowseg_status flowseg_flow_dims(const flowseg_flow* flow, int* height, int* width, int* gap) {
  FLOWSEG_REQUIRE(flow);
  if (height) *height = flow->value.height;
  if (width) *width = flow->value.width;
  if (gap) *gap = flow->value.gap;
  return FLOWSEG_OK;
}

flowseg_status flowseg_flow_read(const char* path, int gap, int source_frame, flowseg_flow** out) {
  FLOWSEG_REQUIRE(path);
  FLOWSEG_REQUIRE(out);
  return guarded([&] { *out = new flowseg_flow{flowseg::read_flo_file(path, gap, source_frame)}; });
}

flowseg_status flowseg_flow_write(const flowseg_flow* flow, const char* path) {
  FLOWSEG_REQUIRE(flow);
  FLOWSEG_REQUIRE(path);
  return guarded([&] { flowseg::write_flo_file(path, flow->value); });
}

flowseg_status flowseg_flow_to_png(const flowseg_flow* flow, int use_fixed_radius, double fixed_radius,
                                   const char* path) {
  FLOWSEG_REQUIRE(flow);
  FLOWSEG_REQUIRE(path);
  return guarded([&] {
    const auto norm = use_fixed_radius ? flowseg::FlowNormalization::fixed(fixed_radius)
                                       : flowseg::FlowNormalization::per_frame_max();
    flowseg::write_rgb_png(path, flowseg::flow_to_rgb(flow->value, norm));
  });
}

flowseg_status flowseg_warp_mask(const flowseg_mask* mask, const flowseg_flow* flow, flowseg_mask** out) {
  FLOWSEG_REQUIRE(mask);
  FLOWSEG_REQUIRE(flow);
  FLOWSEG_REQUIRE(out);
  return guarded([&] { *out = new flowseg_mask{flowseg::warp_mask(mask->value, flow->value)}; });
}

flowseg_status flowseg_cmd_select(const char* config_json) {
  return run_command(config_json, flowseg::run_select);
}

flowseg_status flowseg_cmd_combine(const char* config_json) {
  return run_command(config_json, flowseg::run_combine);
}

flowseg_status flowseg_cmd_associate(const char* config_json) {
  return run_command(config_json, flowseg::run_associate);
}

flowseg_status flowseg_cmd_eval(const char* config_json) {
  return run_command(config_json, flowseg::run_eval);
}

flowseg_status flowseg_cmd_synth(const char* config_json) {
  return run_command(config_json, flowseg::run_synth);
}

flowseg_status flowseg_cmd_flow_vis(const char* config_json) {
  return run_command(config_json, flowseg::run_flow_vis);
}

flowseg_status flowseg_cmd_losses(const char* config_json) {
  return run_command(config_json, flowseg::run_losses);
}

flowseg_status flowseg_config_hash(const char* config_json, char* buf, size_t len) {
  FLOWSEG_REQUIRE(config_json);
  FLOWSEG_REQUIRE(buf);
  if (len < 17) return failed(FLOWSEG_ERR_LENGTH, "hash buffer needs 17 bytes");
  return guarded([&] {
    const std::string h = flowseg::PipelineConfig::from_json(config_json).hash();
    std::memcpy(buf, h.c_str(), h.size() + 1);
  });
}

}  // extern "C"
