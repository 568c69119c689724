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

#include "winshift/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

namespace winshift {

using nlohmann::json;

double DiceCounts::dice() const {
  const std::uint64_t denom = 2 * tp + fp + fn;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

DiceCounts dice(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
  if (pred.size() != truth.size()) {
    throw MetricsError("dice: mask sizes differ (" + std::to_string(pred.size()) + " vs " +
                       std::to_string(truth.size()) + ")");
  }
  DiceCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] != 0;
    const bool t = truth[i] != 0;
    c.tp += p && t;
    c.fp += p && !t;
    c.fn += !p && t;
  }
  return c;
}

DiceCounts dice(const SegmentationMask& pred, const SegmentationMask& truth, std::uint8_t label) {
  if (pred.dims() != truth.dims()) throw MetricsError("dice: mask dims differ");
  DiceCounts c;
  const auto p = pred.labels();
  const auto t = truth.labels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pi = p[i] == label;
    const bool ti = t[i] == label;
    c.tp += pi && ti;
    c.fp += pi && !ti;
    c.fn += !pi && ti;
  }
  return c;
}

DiceReport make_dice_report(std::vector<VolumeDice> per_volume, DiceAggregation aggregation) {
  std::sort(per_volume.begin(), per_volume.end(),
            [](const VolumeDice& a, const VolumeDice& b) { return a.source_id < b.source_id; });
  DiceReport r;
  r.aggregation = aggregation;
  double sum = 0.0;
  for (VolumeDice& v : per_volume) {
    v.dice = v.counts.dice();
    r.totals += v.counts;
    sum += v.dice;
  }
  if (aggregation == DiceAggregation::Pooled) {
    r.dice = r.totals.dice();
  } else {
    r.dice = per_volume.empty() ? 0.0 : sum / static_cast<double>(per_volume.size());
  }
  r.per_volume = std::move(per_volume);
  return r;
}

ContrastMeasurement mean_hu_difference(const HuVolume& vol, const SegmentationMask& mask) {
  if (vol.dims() != mask.dims()) throw MetricsError("mean_hu_difference: mask dims differ from volume");
  const auto v = vol.voxels();
  const auto l = mask.labels();
  double sum_liver = 0.0, sum_tumor = 0.0;
  std::uint64_t n_liver = 0, n_tumor = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (l[i] == kLiver) {
      sum_liver += v[i];
      ++n_liver;
    } else if (l[i] == kTumor) {
      sum_tumor += v[i];
      ++n_tumor;
    }
  }
  ContrastMeasurement m;
  m.source_id = vol.source_id();
  if (n_liver == 0 || n_tumor == 0) {
    m.note = n_liver == 0 ? "no healthy liver voxels" : "no tumor voxels";
    return m;
  }
  m.evaluable = true;
  m.mean_liver_hu = sum_liver / static_cast<double>(n_liver);
  m.mean_tumor_hu = sum_tumor / static_cast<double>(n_tumor);
  m.abs_diff_hu = std::fabs(m.mean_liver_hu - m.mean_tumor_hu);
  return m;
}

std::vector<std::string> ContrastReport::difficult_ids() const {
  std::vector<std::string> ids;
  for (const auto& r : per_volume) {
    if (r.difficult) ids.push_back(r.source_id);
  }
  return ids;
}

ContrastReport identify_difficult(std::span<const ContrastMeasurement> measurements, double threshold_hu) {
  ContrastReport r;
  r.threshold_hu = threshold_hu;
  for (const ContrastMeasurement& m : measurements) {
    if (!m.evaluable) {
      r.not_evaluable.push_back(m.source_id);
      r.warnings.push_back("volume '" + m.source_id + "' not evaluable: " + m.note);
      continue;
    }
    r.per_volume.push_back({m.source_id, m.mean_liver_hu, m.mean_tumor_hu, m.abs_diff_hu, m.abs_diff_hu < threshold_hu});
  }
  std::sort(r.per_volume.begin(), r.per_volume.end(),
            [](const ContrastRow& a, const ContrastRow& b) { return a.source_id < b.source_id; });
  std::sort(r.not_evaluable.begin(), r.not_evaluable.end());
  std::sort(r.warnings.begin(), r.warnings.end());
  return r;
}

std::string to_json(const DiceReport& report) {
  json rows = json::array();
  for (const auto& v : report.per_volume) {
    rows.push_back({{"source_id", v.source_id}, {"tp", v.counts.tp}, {"fp", v.counts.fp}, {"fn", v.counts.fn},
                    {"dice", v.dice}});
  }
  json j = {{"schema_version", kReportSchemaVersion},
            {"kind", "winshift.dice_report"},
            {"aggregation", report.aggregation == DiceAggregation::Pooled ? "pooled" : "per_volume_mean"},
            {"dice", report.dice},
            {"tp", report.totals.tp},
            {"fp", report.totals.fp},
            {"fn", report.totals.fn},
            {"per_volume", rows}};
  return j.dump(2) + "\n";
}

std::string to_json(const ContrastReport& report) {
  json rows = json::array();
  for (const auto& r : report.per_volume) {
    rows.push_back({{"source_id", r.source_id}, {"mean_liver_hu", r.mean_liver_hu}, {"mean_tumor_hu", r.mean_tumor_hu},
                    {"abs_diff_hu", r.abs_diff_hu}, {"difficult", r.difficult}});
  }
  json j = {{"schema_version", kReportSchemaVersion},
            {"kind", "winshift.contrast_report"},
            {"threshold_hu", report.threshold_hu},
            {"difficult", report.difficult_ids()},
            {"not_evaluable", report.not_evaluable},
            {"warnings", report.warnings},
            {"per_volume", rows}};
  return j.dump(2) + "\n";
}

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

}  // namespace

std::string to_csv(const DiceReport& report) {
  std::string out = "source_id,tp,fp,fn,dice\n";
  for (const auto& v : report.per_volume) {
    out += v.source_id + "," + std::to_string(v.counts.tp) + "," + std::to_string(v.counts.fp) + "," +
           std::to_string(v.counts.fn) + "," + num(v.dice) + "\n";
  }
  return out;
}

std::string to_csv(const ContrastReport& report) {
  std::string out = "source_id,mean_liver_hu,mean_tumor_hu,abs_diff_hu,difficult\n";
  for (const auto& r : report.per_volume) {
    out += r.source_id + "," + num(r.mean_liver_hu) + "," + num(r.mean_tumor_hu) + "," + num(r.abs_diff_hu) + "," +
           (r.difficult ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace winshift
