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

/*
 * C interface of libflowseg.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every call returns a flowseg_status; on
 * failure flowseg_last_error() describes the problem (per thread, valid until
 * the next failing call on that thread). Output pointers are written only on
 * success.
 */
#ifndef FLOWSEG_FLOWSEG_H_
#define FLOWSEG_FLOWSEG_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(FLOWSEG_BUILDING_LIBRARY)
#    define FLOWSEG_API __declspec(dllexport)
#  else
#    define FLOWSEG_API __declspec(dllimport)
#  endif
#else
#  define FLOWSEG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum flowseg_status {
  FLOWSEG_OK = 0,
  FLOWSEG_ERR_SHAPE = 1,
  FLOWSEG_ERR_INVALID_INPUT = 2,
  FLOWSEG_ERR_FORMAT = 3,
  FLOWSEG_ERR_LENGTH = 4,
  FLOWSEG_ERR_PARAMETER = 5,
  FLOWSEG_ERR_EMPTY_MASK = 6,
  FLOWSEG_ERR_MISSING_INPUT = 7,
  FLOWSEG_ERR_IO = 8,
  FLOWSEG_ERR_INTERNAL = 9,
  FLOWSEG_ERR_NULL_ARGUMENT = 10
} flowseg_status;

typedef struct flowseg_mask flowseg_mask;
typedef struct flowseg_flow flowseg_flow;

FLOWSEG_API const char* flowseg_version(void);
FLOWSEG_API const char* flowseg_last_error(void);
FLOWSEG_API const char* flowseg_status_string(flowseg_status status);

/* ---- masks ------------------------------------------------------------- */

FLOWSEG_API flowseg_status flowseg_mask_create(int height, int width, flowseg_mask** out);
/* Nonzero bytes (row-major, height*width of them) become foreground. */
FLOWSEG_API flowseg_status flowseg_mask_from_bytes(int height, int width, const uint8_t* bytes,
                                                   flowseg_mask** out);
FLOWSEG_API void flowseg_mask_destroy(flowseg_mask* mask);
FLOWSEG_API flowseg_status flowseg_mask_dims(const flowseg_mask* mask, int* height, int* width);
FLOWSEG_API flowseg_status flowseg_mask_set(flowseg_mask* mask, int x, int y, int on);
FLOWSEG_API flowseg_status flowseg_mask_get(const flowseg_mask* mask, int x, int y, int* on);
FLOWSEG_API flowseg_status flowseg_mask_area(const flowseg_mask* mask, size_t* area);
/* Writes height*width bytes of 0/1; len must be at least that. */
FLOWSEG_API flowseg_status flowseg_mask_to_bytes(const flowseg_mask* mask, uint8_t* bytes, size_t len);
FLOWSEG_API flowseg_status flowseg_mask_read_png(const char* path, flowseg_mask** out);
FLOWSEG_API flowseg_status flowseg_mask_write_png(const flowseg_mask* mask, const char* path);

/* IoU; two empty masks give 0. */
FLOWSEG_API flowseg_status flowseg_iou(const flowseg_mask* a, const flowseg_mask* b, double* out);

/* ---- assignment -------------------------------------------------------- */

/*
 * Optimal assignment on a row-major rows x cols weight matrix. row_to_col
 * must hold `rows` ints and receives the matched column or -1. Set maximize
 * to a nonzero value to maximise total weight.
 */
FLOWSEG_API flowseg_status flowseg_solve_assignment(const double* weights, size_t rows, size_t cols,
                                                    int maximize, int* row_to_col,
                                                    double* total_weight);

/* ---- optical flow ------------------------------------------------------ */

FLOWSEG_API flowseg_status flowseg_flow_create(int height, int width, const float* u, const float* v,
                                               int gap, int source_frame, flowseg_flow** out);
FLOWSEG_API void flowseg_flow_destroy(flowseg_flow* flow);
FLOWSEG_API flowseg_status flowseg_flow_dims(const flowseg_flow* flow, int* height, int* width,
                                             int* gap);
FLOWSEG_API flowseg_status flowseg_flow_read(const char* path, int gap, int source_frame,
                                             flowseg_flow** out);
FLOWSEG_API flowseg_status flowseg_flow_write(const flowseg_flow* flow, const char* path);
/* use_fixed_radius == 0: normalise by the largest magnitude in the field. */
FLOWSEG_API flowseg_status flowseg_flow_to_png(const flowseg_flow* flow, int use_fixed_radius,
                                               double fixed_radius, const char* path);
FLOWSEG_API flowseg_status flowseg_warp_mask(const flowseg_mask* mask, const flowseg_flow* flow,
                                             flowseg_mask** out);

/* ---- batch commands ---------------------------------------------------- */

/*
 * Each command takes a flat JSON object of configuration keys (documented in
 * the README). Per-sequence failures are listed in <output_dir>/errors.json.
 */
FLOWSEG_API flowseg_status flowseg_cmd_select(const char* config_json);
FLOWSEG_API flowseg_status flowseg_cmd_combine(const char* config_json);
FLOWSEG_API flowseg_status flowseg_cmd_associate(const char* config_json);
FLOWSEG_API flowseg_status flowseg_cmd_eval(const char* config_json);
FLOWSEG_API flowseg_status flowseg_cmd_synth(const char* config_json);
FLOWSEG_API flowseg_status flowseg_cmd_flow_vis(const char* config_json);
FLOWSEG_API flowseg_status flowseg_cmd_losses(const char* config_json);

/* 16 hex digits plus NUL; len must be at least 17. */
FLOWSEG_API flowseg_status flowseg_config_hash(const char* config_json, char* buf, size_t len);

#ifdef __cplusplus
}
#endif

#endif /* FLOWSEG_FLOWSEG_H_ */
