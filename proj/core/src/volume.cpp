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

#include "winshift/volume.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace winshift {

namespace {

void check_dims(const Dims& dims, std::size_t n, const char* what) {
  for (std::size_t d : dims) {
    if (d < 1) throw VolumeError(std::string(what) + ": dims components must be >= 1");
  }
  if (voxel_count(dims) != n) {
    throw VolumeError(std::string(what) + ": voxel count " + std::to_string(n) +
                      " does not match dims product " + std::to_string(voxel_count(dims)));
  }
}

}  // namespace

HuVolume::HuVolume(Dims dims, Spacing spacing, std::vector<float> voxels, std::string source_id)
    : dims_(dims), spacing_(spacing), voxels_(std::move(voxels)), source_id_(std::move(source_id)) {
  check_dims(dims_, voxels_.size(), "HuVolume");
  for (double s : spacing_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw VolumeError("HuVolume: spacing components must be > 0");
  }
  auto bad = std::find_if(voxels_.begin(), voxels_.end(), [](float v) { return !std::isfinite(v); });
  if (bad != voxels_.end()) {
    throw VolumeError("HuVolume: non-finite voxel at index " +
                      std::to_string(std::distance(voxels_.begin(), bad)));
  }
}

std::span<const float> HuVolume::axial_slice(std::size_t z) const {
  if (z >= dims_[2]) throw std::out_of_range("HuVolume::axial_slice: z out of range");
  return std::span<const float>(voxels_).subspan(z * slice_size(), slice_size());
}

HuVolume HuVolume::with_source_id(std::string source_id) const {
  HuVolume copy = *this;
  copy.source_id_ = std::move(source_id);
  return copy;
}

bool operator==(const HuVolume& a, const HuVolume& b) {
  return a.dims_ == b.dims_ && a.spacing_ == b.spacing_ && a.voxels_.size() == b.voxels_.size() &&
         std::memcmp(a.voxels_.data(), b.voxels_.data(), a.voxels_.size() * sizeof(float)) == 0;
}

ClassNames default_class_names() { return {{kLiver, "liver"}, {kTumor, "tumor"}}; }

SegmentationMask::SegmentationMask(Dims dims, std::vector<std::uint8_t> labels, ClassNames class_names)
    : dims_(dims), labels_(std::move(labels)), class_names_(std::move(class_names)) {
  check_dims(dims_, labels_.size(), "SegmentationMask");
  std::array<bool, 256> seen{};
  for (std::uint8_t v : labels_) seen[v] = true;
  for (std::size_t v = 1; v < seen.size(); ++v) {
    if (seen[v] && !class_names_.contains(static_cast<std::uint8_t>(v))) {
      throw VolumeError("SegmentationMask: label " + std::to_string(v) + " has no class name");
    }
  }
}

std::span<const std::uint8_t> SegmentationMask::axial_slice(std::size_t z) const {
  if (z >= dims_[2]) throw std::out_of_range("SegmentationMask::axial_slice: z out of range");
  return std::span<const std::uint8_t>(labels_).subspan(z * slice_size(), slice_size());
}

bool SegmentationMask::slice_contains(std::size_t z, std::uint8_t label) const {
  auto s = axial_slice(z);
  return std::find(s.begin(), s.end(), label) != s.end();
}

void AttenuationCalibration::validate() const {
  if (!std::isfinite(mu_water) || !std::isfinite(mu_air) || !(mu_air >= 0.0) || !(mu_water > mu_air)) {
    throw CalibrationError("attenuation calibration requires mu_water > mu_air >= 0");
  }
}

double hu_from_attenuation(double mu, const AttenuationCalibration& cal) {
  cal.validate();
  if (!std::isfinite(mu)) throw CalibrationError("attenuation coefficient is not finite");
  return 1000.0 * (mu - cal.mu_water) / (cal.mu_water - cal.mu_air);
}

}  // namespace winshift
