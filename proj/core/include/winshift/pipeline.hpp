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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "winshift/augmentations.hpp"
#include "winshift/intensity_stats.hpp"

namespace winshift {

/// Immutable bundle of dataset statistics, augmentation policy and run seed.
/// Each call derives its own random stream from (seed, source_id, slice,
/// epoch), so a pipeline can be shared between threads.
class AugmentationPipeline {
 public:
  AugmentationPipeline(StatsDocument stats, AugmentationPolicy policy, std::uint64_t seed);

  /// Loads stats.json and optionally policy.json. Without a policy file the
  /// pipeline window-shifts with the bounds stored in the stats.
  static AugmentationPipeline open(const std::filesystem::path& stats_path,
                                   const std::optional<std::filesystem::path>& policy_path, std::uint64_t seed);

  AugmentedSlice augment_slice(const Image2D& hu, const Mask2D& mask, std::string_view source_id,
                               std::uint64_t slice_index, std::uint64_t epoch) const;
  /// Base-window preprocessing used at inference time.
  Image2D preprocess_slice(const Image2D& hu) const;

  const StatsDocument& stats() const { return stats_; }
  const AugmentationPolicy& policy() const { return policy_; }
  const ViewingWindow& base_window() const { return stats_.base_window; }
  const NormalizationParams& normalization() const { return stats_.normalization; }
  std::uint64_t seed() const { return seed_; }
  /// e.g. "AugmentationPipeline(L=95.5, W=301, specs=1, seed=7)"
  std::string describe() const;

 private:
  StatsDocument stats_;
  AugmentationPolicy policy_;
  std::uint64_t seed_;
};

std::string read_text_file(const std::filesystem::path& path);

}  // namespace winshift
