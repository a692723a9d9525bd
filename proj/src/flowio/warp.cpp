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

#include <cmath>

#include "flowseg/error.hpp"
#include "flowseg/flow.hpp"

namespace flowseg {

Mask warp_mask(const Mask& mask, const FlowField& flow) {
  if (mask.height() != flow.height || mask.width() != flow.width) {
    fail(ErrorCode::kShape, "warp_mask: mask and flow dimensions differ");
  }
  Mask out(mask.height(), mask.width());
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.get(x, y)) continue;
      const std::size_t i = flow.index(x, y);
      // std::round rounds half away from zero on every platform.
      const double tx = x + std::round(static_cast<double>(flow.u[i]));
      const double ty = y + std::round(static_cast<double>(flow.v[i]));
      if (!(tx >= 0 && ty >= 0 && tx < mask.width() && ty < mask.height())) continue;
      out.set(static_cast<int>(tx), static_cast<int>(ty));
    }
  }
  return out;
}

}  // namespace flowseg
