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

#include <functional>
#include <string>
#include <vector>

#include "winshift/intensity_stats.hpp"
#include "winshift/viewing_window.hpp"
#include "winshift/volume.hpp"

namespace winshift {

/// Mean unit-scaled value of healthy liver and tumor voxels.
struct UnitClassMeans {
  double liver = 0.0;
  double tumor = 0.0;
  double separation() const { return liver > tumor ? liver - tumor : tumor - liver; }
};

/// Clips to `window`, rescales to [0, 1], applies `transform` per voxel and
/// averages per class. Throws MetricsError when either class is empty.
UnitClassMeans unit_class_means(const HuVolume& vol, const SegmentationMask& mask, const ViewingWindow& window,
                                const std::function<double(double)>& transform = {});

/// Exact median HU of the voxels carrying `label`.
double class_median_hu(const HuVolume& vol, const SegmentationMask& mask, std::uint8_t label);

struct SeparationRow {
  std::string source_id;
  std::string augmentation;
  double level = 0.0;
  double width = 0.0;
  UnitClassMeans means;
};

/// Liver/tumor separation of one volume under the base window, under windows
/// shifted to the policy bounds and toward the volume's own liver median,
/// and under the baseline intensity augmentations at fixed strengths.
std::vector<SeparationRow> separation_rows(const HuVolume& vol, const SegmentationMask& mask,
                                           const ViewingWindow& base, const WindowShiftPolicy& shift);

std::string separation_csv(const std::vector<SeparationRow>& rows);

}  // namespace winshift
