// Copyright 2026 The winshift Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "winshift/viewing_window.hpp"

#include <cmath>

namespace winshift {

ViewingWindow ViewingWindow::from_level_width(double level, double width) {
  if (!std::isfinite(level) || !std::isfinite(width) || !(width > 0.0)) {
    throw WindowError("viewing window needs a finite level and width > 0");
  }
  const double half = 0.5 * width;
  return from_bounds(level - half, level + half);
}

ViewingWindow ViewingWindow::from_bounds(double lower, double upper) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw WindowError("viewing window bounds must be finite with lower < upper (got " + std::to_string(lower) +
                      ", " + std::to_string(upper) + ")");
  }
  return ViewingWindow(lower, upper);
}

ViewingWindow ViewingWindow::shifted(double delta) const {
  if (delta == 0.0) return *this;
  return from_bounds(lower_ + delta, upper_ + delta);
}

void WindowShiftPolicy::validate() const {
  if (!std::isfinite(level_low) || !std::isfinite(level_high) || level_low > level_high) {
    throw WindowError("window shift policy needs level_low <= level_high");
  }
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw WindowError("window shift probability must lie in [0, 1]");
  }
}

}  // namespace winshift
