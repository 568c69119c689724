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

#include "winshift/windowing.hpp"

#include <string>

namespace winshift {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Hu: return "hu";
    case Stage::ClippedHu: return "clipped_hu";
    case Stage::UnitScaled: return "unit_scaled";
    case Stage::ZScored: return "z_scored";
  }
  return "unknown";
}

Image2D axial_slice_image(const HuVolume& vol, std::size_t z) {
  const auto s = vol.axial_slice(z);
  return Image2D(vol.dims()[0], vol.dims()[1], std::vector<double>(s.begin(), s.end()));
}

Mask2D axial_slice_mask(const SegmentationMask& mask, std::size_t z) {
  const auto s = mask.axial_slice(z);
  return Mask2D(mask.dims()[0], mask.dims()[1], std::vector<std::uint8_t>(s.begin(), s.end()));
}

Image2D apply_window(const Image2D& hu, const ViewingWindow& window) {
  Image2D out = hu;
  for (double& p : out.pixels) p = clip_pixel(p, window);
  return out;
}

Image2D rescale_unit(const Image2D& clipped, const ViewingWindow& window) {
  Image2D out = clipped;
  for (double& p : out.pixels) {
    if (!(p >= window.lower() && p <= window.upper())) {
      throw StageError("rescale_unit: pixel " + std::to_string(p) + " lies outside the window");
    }
    p = unit_pixel(p, window);
  }
  return out;
}

Image2D z_normalize(const Image2D& unit, const NormalizationParams& norm) {
  if (!(norm.std > 0.0)) throw StageError("z_normalize: std must be > 0");
  Image2D out = unit;
  for (double& p : out.pixels) p = z_pixel(p, norm);
  return out;
}

Image2D preprocess_with_window(const Image2D& hu, const ViewingWindow& window, const NormalizationParams& norm) {
  if (!(norm.std > 0.0)) throw StageError("preprocess: std must be > 0");
  Image2D out = hu;
  for (double& p : out.pixels) p = z_pixel(unit_pixel(clip_pixel(p, window), window), norm);
  return out;
}

ViewingWindow sample_window_level(const WindowShiftPolicy& policy, const ViewingWindow& base, RandomStream& rng) {
  policy.validate();
  const double gate = rng.uniform();
  const double level = rng.uniform(policy.level_low, policy.level_high);
  if (!(gate < policy.probability)) return base;
  return base.recentred(level);
}

}  // namespace winshift
