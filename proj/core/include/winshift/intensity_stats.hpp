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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "winshift/viewing_window.hpp"
#include "winshift/volume.hpp"

namespace winshift {

class StatsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using LabelSet = std::set<std::uint8_t>;

/// Liver and tumor.
inline LabelSet default_foreground_labels() { return {kLiver, kTumor}; }

/// Fixed-width binning. The default covers [-1024, 3072) with 1 HU bins;
/// values outside the range are counted in the edge bins.
struct HistogramBinning {
  double origin = -1024.0;
  double bin_width = 1.0;
  std::size_t bins = 4096;

  std::size_t index_of(double hu) const;
  double bin_lower(std::size_t i) const { return origin + bin_width * static_cast<double>(i); }

  friend bool operator==(const HistogramBinning&, const HistogramBinning&) = default;
};

/// Per-bin count plus the exact sum, sum of squares and extrema of the
/// values that landed in the bin. Extrema make single-valued bins exact.
struct HistogramBin {
  std::uint64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct VolumeMedian {
  std::string source_id;
  std::uint8_t label = 0;
  double median = 0.0;

  friend bool operator==(const VolumeMedian&, const VolumeMedian&) = default;
};

struct NormalizationParams {
  double mean = 0.0;
  double std = 1.0;
};

/// Dataset-level summary of foreground intensities.
class ForegroundStats {
 public:
  explicit ForegroundStats(HistogramBinning binning = {});

  /// Adds the voxels of `vol` whose label is in `foreground_labels`, and one
  /// exact median per (volume, label) that has voxels. A volume without
  /// foreground is recorded in warnings() and contributes nothing.
  void accumulate(const HuVolume& vol, const SegmentationMask& mask,
                  const LabelSet& foreground_labels = default_foreground_labels());

  const HistogramBinning& binning() const { return binning_; }
  std::span<const HistogramBin> histogram() const { return bins_; }
  std::uint64_t n_foreground() const { return count_; }
  double mean() const { return mean_; }
  /// Population standard deviation.
  double stddev() const;
  double m2() const { return m2_; }
  /// Sorted by (source_id, label).
  const std::vector<VolumeMedian>& per_volume_medians() const { return medians_; }
  /// Source ids of every accumulated volume, sorted.
  const std::vector<std::string>& volumes() const { return volumes_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  bool empty() const { return count_ == 0; }

  friend ForegroundStats merge(const ForegroundStats& a, const ForegroundStats& b);
  friend class StatsSerializer;

 private:
  void add_moments(std::uint64_t n, double mean, double m2);
  void add_median(VolumeMedian m);
  void add_volume(const std::string& source_id);

  HistogramBinning binning_;
  std::vector<HistogramBin> bins_;
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  std::vector<VolumeMedian> medians_;
  std::vector<std::string> volumes_;
  std::vector<std::string> warnings_;
};

/// Equivalent to accumulating the volumes of `a` and `b` in one object.
/// Throws StatsError on binning mismatch or overlapping (source_id, label).
ForegroundStats merge(const ForegroundStats& a, const ForegroundStats& b);

/// q-quantile of the accumulated foreground, q in [0, 1]. The target bin is
/// located from cumulative counts and the value is interpolated linearly
/// between the smallest and largest value seen in that bin.
double percentile(const ForegroundStats& stats, double q);

/// Quantile of a sorted sample with linear interpolation between order
/// statistics at position q * (n - 1).
double sample_quantile(std::span<const double> sorted, double q);

/// Window spanning the 0.5th to 99.5th foreground percentile.
ViewingWindow derive_base_window(const ForegroundStats& stats);

inline constexpr double kBaseWindowLowerQuantile = 0.005;
inline constexpr double kBaseWindowUpperQuantile = 0.995;

/// Level range from the 0.5th and 99.5th percentiles of the pooled
/// per-volume medians of `classes`.
WindowShiftPolicy derive_shift_bounds(const ForegroundStats& stats, const LabelSet& classes, double probability);

/// Mean and standard deviation of the foreground after clipping to `window`
/// and mapping it to [0, 1], evaluated from the histogram.
NormalizationParams normalization_params(const ForegroundStats& stats, const ViewingWindow& window);

/// Everything written to stats.json.
struct StatsDocument {
  ForegroundStats stats{};
  LabelSet foreground_labels = default_foreground_labels();
  LabelSet shift_classes = default_foreground_labels();
  ViewingWindow base_window = ViewingWindow::from_bounds(0.0, 1.0);
  WindowShiftPolicy shift_policy{};
  NormalizationParams normalization{};
  /// Free-form run configuration, embedded verbatim as a JSON object.
  std::string config_json = "{}";
  std::vector<std::string> failed_volumes{};
};

inline constexpr int kStatsSchemaVersion = 1;

/// Runs the derivations on `stats` and fills a document.
StatsDocument make_stats_document(ForegroundStats stats, const LabelSet& foreground_labels,
                                  const LabelSet& shift_classes, double shift_probability);

std::string to_json(const StatsDocument& doc);
/// Throws StatsError naming the offending field.
StatsDocument stats_document_from_json(const std::string& text);

}  // namespace winshift
