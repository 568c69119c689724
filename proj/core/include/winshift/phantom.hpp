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
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "winshift/volume.hpp"

namespace winshift {

class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Synthetic abdominal CT: an ellipsoidal liver (liver_hu + contrast_boost)
/// with a spherical tumor (tumor_hu) inside, on a uniform background, plus
/// Gaussian noise.
struct PhantomSpec {
  Dims dims{48, 48, 24};
  Spacing spacing{1.0, 1.0, 1.0};
  double background_hu = -60.0;
  double liver_hu = 60.0;
  double tumor_hu = 40.0;
  /// Extra liver enhancement from contrast timing.
  double contrast_boost = 50.0;
  double noise_std = 10.0;
  /// Liver semi-axes as fractions of dims.
  std::array<double, 3> liver_extent{0.38, 0.34, 0.38};
  double tumor_radius = 5.0;
  /// Tumor centre relative to the liver centre, in voxels.
  std::array<double, 3> tumor_offset{0.0, 0.0, 0.0};
  std::uint64_t seed = 0;
  std::string source_id = "phantom";
};

/// Noise-free class statistics of a generated phantom.
struct PhantomTruth {
  double mean_liver_hu = 0.0;
  double mean_tumor_hu = 0.0;
  double abs_diff_hu = 0.0;
  std::uint64_t n_liver = 0;
  std::uint64_t n_tumor = 0;
};

struct Phantom {
  PhantomSpec spec;
  HuVolume volume;
  SegmentationMask mask;
  PhantomTruth truth;
};

/// Throws GeometryError if the tumor leaves the liver or a class is empty.
Phantom generate_phantom(const PhantomSpec& spec);

struct ConstantBoost {
  double boost = 0.0;
};
/// Boosts are stratified over [lo, hi]: phantom i draws uniformly from the
/// i-th of n equal sub-intervals.
struct UniformBoost {
  double lo = 0.0;
  double hi = 0.0;
};
struct ExplicitBoosts {
  std::vector<double> boosts;
};
using TimingDistribution = std::variant<ConstantBoost, UniformBoost, ExplicitBoosts>;

/// `n` phantoms sharing `base` except for contrast_boost, seed and
/// source_id ("phantom_000", ...). ExplicitBoosts requires n == boosts.size().
std::vector<Phantom> generate_cohort(std::size_t n, const TimingDistribution& timing, std::uint64_t seed,
                                     const PhantomSpec& base = {});

/// Writes <id>.wsv and <id>.seg.wsv per phantom plus cohort.json; returns
/// the manifest path.
std::filesystem::path write_cohort(const std::vector<Phantom>& cohort, const std::filesystem::path& dir,
                                   std::uint64_t seed);

}  // namespace winshift
