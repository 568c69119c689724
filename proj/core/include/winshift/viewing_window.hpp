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

#pragma once

#include <stdexcept>
#include <string>

namespace winshift {

class WindowError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// HU clipping range [level - width/2, level + width/2].
///
/// The bounds are the stored representation so that a window derived from
/// two percentiles reproduces them exactly; level and width are derived.
class ViewingWindow {
 public:
  static ViewingWindow from_level_width(double level, double width);
  static ViewingWindow from_bounds(double lower, double upper);

  double level() const { return 0.5 * (lower_ + upper_); }
  double width() const { return upper_ - lower_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  /// Same bounds moved by `delta` HU; returns *this unchanged for delta == 0.
  ViewingWindow shifted(double delta) const;
  /// Window of the same width recentred on `level`.
  ViewingWindow recentred(double level) const { return shifted(level - this->level()); }

  friend bool operator==(const ViewingWindow&, const ViewingWindow&) = default;

 private:
  ViewingWindow(double lower, double upper) : lower_(lower), upper_(upper) {}
  double lower_;
  double upper_;
};

/// Range and probability for sampling substitute window levels.
struct WindowShiftPolicy {
  double level_low = 0.0;
  double level_high = 0.0;
  double probability = 0.0;

  /// Throws WindowError unless level_low <= level_high and 0 <= p <= 1.
  void validate() const;

  friend bool operator==(const WindowShiftPolicy&, const WindowShiftPolicy&) = default;
};

}  // namespace winshift
