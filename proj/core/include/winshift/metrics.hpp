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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winshift/volume.hpp"

namespace winshift {

class MetricsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DiceCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  /// 2tp / (2tp + fp + fn); 1.0 when both masks are empty.
  double dice() const;
  DiceCounts& operator+=(const DiceCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const DiceCounts&, const DiceCounts&) = default;
};

/// Overlap of two binary masks given as non-zero bytes.
DiceCounts dice(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth);
/// Overlap of `label` in two label volumes.
DiceCounts dice(const SegmentationMask& pred, const SegmentationMask& truth, std::uint8_t label);

enum class DiceAggregation {
  PerVolumeMean,  // mean of per-volume dice
  Pooled,         // dice of summed counts
};

struct VolumeDice {
  std::string source_id;
  DiceCounts counts;
  double dice = 0.0;
};

struct DiceReport {
  DiceCounts totals;
  double dice = 0.0;
  DiceAggregation aggregation = DiceAggregation::PerVolumeMean;
  std::vector<VolumeDice> per_volume;
};

/// Aggregates per-volume counts; per-volume rows are sorted by source_id.
DiceReport make_dice_report(std::vector<VolumeDice> per_volume, DiceAggregation aggregation);

/// Mean raw HU of healthy liver (label 1) and tumor (label 2) voxels.
struct ContrastMeasurement {
  std::string source_id;
  bool evaluable = false;
  double mean_liver_hu = 0.0;
  double mean_tumor_hu = 0.0;
  double abs_diff_hu = 0.0;
  /// Why the volume could not be evaluated.
  std::string note;
};

ContrastMeasurement mean_hu_difference(const HuVolume& vol, const SegmentationMask& mask);

inline constexpr double kDifficultThresholdHu = 20.0;

struct ContrastRow {
  std::string source_id;
  double mean_liver_hu = 0.0;
  double mean_tumor_hu = 0.0;
  double abs_diff_hu = 0.0;
  bool difficult = false;
};

struct ContrastReport {
  double threshold_hu = kDifficultThresholdHu;
  std::vector<ContrastRow> per_volume;
  /// Volumes lacking liver or tumor, excluded from the rows above.
  std::vector<std::string> not_evaluable;
  std::vector<std::string> warnings;

  std::vector<std::string> difficult_ids() const;
};

/// Flags volumes whose liver/tumor mean difference is strictly below the
/// threshold. Rows are sorted by source_id.
ContrastReport identify_difficult(std::span<const ContrastMeasurement> measurements,
                                  double threshold_hu = kDifficultThresholdHu);

inline constexpr int kReportSchemaVersion = 1;

std::string to_json(const DiceReport& report);
std::string to_json(const ContrastReport& report);
std::string to_csv(const DiceReport& report);
std::string to_csv(const ContrastReport& report);

}  // namespace winshift
