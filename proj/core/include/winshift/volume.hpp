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

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace winshift {

/// Voxel counts along (x, y, z).
using Dims = std::array<std::size_t, 3>;
/// Voxel spacing in mm along (x, y, z).
using Spacing = std::array<double, 3>;

inline std::size_t voxel_count(const Dims& dims) { return dims[0] * dims[1] * dims[2]; }

/// Segmentation label values used throughout the toolkit.
enum Label : std::uint8_t { kBackground = 0, kLiver = 1, kTumor = 2 };

class VolumeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Calibrated CT volume in Hounsfield units. Voxels are stored x-fastest:
/// index = x + nx * (y + ny * z).
class HuVolume {
 public:
  HuVolume(Dims dims, Spacing spacing, std::vector<float> voxels, std::string source_id = {});

  const Dims& dims() const { return dims_; }
  const Spacing& spacing() const { return spacing_; }
  std::span<const float> voxels() const { return voxels_; }
  const std::string& source_id() const { return source_id_; }

  std::size_t size() const { return voxels_.size(); }
  std::size_t slice_size() const { return dims_[0] * dims_[1]; }
  float at(std::size_t x, std::size_t y, std::size_t z) const {
    return voxels_[x + dims_[0] * (y + dims_[1] * z)];
  }
  /// Axial slice z, row-major with rows along y.
  std::span<const float> axial_slice(std::size_t z) const;

  HuVolume with_source_id(std::string source_id) const;

  /// Compares geometry and voxel bits; source_id is provenance only.
  friend bool operator==(const HuVolume& a, const HuVolume& b);

 private:
  Dims dims_;
  Spacing spacing_;
  std::vector<float> voxels_;
  std::string source_id_;
};

using ClassNames = std::map<std::uint8_t, std::string>;

/// Default label convention: 1 -> liver, 2 -> tumor.
ClassNames default_class_names();

class SegmentationMask {
 public:
  SegmentationMask(Dims dims, std::vector<std::uint8_t> labels,
                   ClassNames class_names = default_class_names());

  const Dims& dims() const { return dims_; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  const ClassNames& class_names() const { return class_names_; }

  std::size_t size() const { return labels_.size(); }
  std::size_t slice_size() const { return dims_[0] * dims_[1]; }
  std::uint8_t at(std::size_t x, std::size_t y, std::size_t z) const {
    return labels_[x + dims_[0] * (y + dims_[1] * z)];
  }
  std::span<const std::uint8_t> axial_slice(std::size_t z) const;
  bool slice_contains(std::size_t z, std::uint8_t label) const;

  friend bool operator==(const SegmentationMask& a, const SegmentationMask& b) = default;

 private:
  Dims dims_;
  std::vector<std::uint8_t> labels_;
  ClassNames class_names_;
};

/// Linear attenuation coefficients (1/cm) anchoring the HU scale.
struct AttenuationCalibration {
  double mu_water = 0.0;
  double mu_air = 0.0;

  /// Throws CalibrationError unless mu_water > mu_air >= 0.
  void validate() const;
};

class CalibrationError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// HU = 1000 * (mu - mu_water) / (mu_water - mu_air).
double hu_from_attenuation(double mu, const AttenuationCalibration& cal);

}  // namespace winshift
