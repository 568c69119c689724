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

#include <algorithm>
#include <span>
#include <string_view>

#include "winshift/image.hpp"
#include "winshift/intensity_stats.hpp"
#include "winshift/random.hpp"
#include "winshift/viewing_window.hpp"
#include "winshift/volume.hpp"

namespace winshift {

enum class Stage { Hu, ClippedHu, UnitScaled, ZScored };

std::string_view to_string(Stage stage);

/// A slice together with the processing stage it is in and the window that
/// produced it.
struct PreprocessedSlice {
  Image2D pixels;
  Stage stage = Stage::Hu;
  ViewingWindow window_used = ViewingWindow::from_bounds(0.0, 1.0);
};

// Per-pixel kernels shared by the staged functions and the fused path, so
// that both produce the same bits.
inline double clip_pixel(double hu, const ViewingWindow& w) { return std::clamp(hu, w.lower(), w.upper()); }
inline double unit_pixel(double clipped, const ViewingWindow& w) { return (clipped - w.lower()) / w.width(); }
inline double z_pixel(double unit, const NormalizationParams& n) { return (unit - n.mean) / n.std; }

Image2D axial_slice_image(const HuVolume& vol, std::size_t z);
Mask2D axial_slice_mask(const SegmentationMask& mask, std::size_t z);

/// Clamps every pixel to [L - W/2, L + W/2].
Image2D apply_window(const Image2D& hu, const ViewingWindow& window);
/// Maps the clipped range onto [0, 1]. Throws StageError for pixels outside
/// the window.
Image2D rescale_unit(const Image2D& clipped, const ViewingWindow& window);
/// Throws StageError unless norm.std > 0.
Image2D z_normalize(const Image2D& unit, const NormalizationParams& norm);

/// Single pass clip -> rescale -> z-score with `window`.
Image2D preprocess_with_window(const Image2D& hu, const ViewingWindow& window, const NormalizationParams& norm);
/// Inference preprocessing always uses the base window.
inline Image2D preprocess_inference(const Image2D& hu, const ViewingWindow& base, const NormalizationParams& norm) {
  return preprocess_with_window(hu, base, norm);
}

/// Draws the gate and a candidate level (always both, in that order). With
/// probability `policy.probability` returns a window of the base width
/// centred on a level uniform in [level_low, level_high]; otherwise `base`.
ViewingWindow sample_window_level(const WindowShiftPolicy& policy, const ViewingWindow& base, RandomStream& rng);

}  // namespace winshift
