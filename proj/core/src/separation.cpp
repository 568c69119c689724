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

#include "winshift/separation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "winshift/augmentations.hpp"
#include "winshift/metrics.hpp"
#include "winshift/windowing.hpp"

namespace winshift {

UnitClassMeans unit_class_means(const HuVolume& vol, const SegmentationMask& mask, const ViewingWindow& window,
                                const std::function<double(double)>& transform) {
  if (vol.dims() != mask.dims()) throw MetricsError("unit_class_means: mask dims differ from volume");
  const auto v = vol.voxels();
  const auto l = mask.labels();
  double sum_liver = 0.0, sum_tumor = 0.0;
  std::size_t n_liver = 0, n_tumor = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (l[i] != kLiver && l[i] != kTumor) continue;
    double u = unit_pixel(clip_pixel(v[i], window), window);
    if (transform) u = transform(u);
    if (l[i] == kLiver) {
      sum_liver += u;
      ++n_liver;
    } else {
      sum_tumor += u;
      ++n_tumor;
    }
  }
  if (n_liver == 0 || n_tumor == 0) throw MetricsError("unit_class_means: volume lacks liver or tumor voxels");
  return {sum_liver / static_cast<double>(n_liver), sum_tumor / static_cast<double>(n_tumor)};
}

double class_median_hu(const HuVolume& vol, const SegmentationMask& mask, std::uint8_t label) {
  std::vector<float> values;
  const auto v = vol.voxels();
  const auto l = mask.labels();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (l[i] == label) values.push_back(v[i]);
  }
  if (values.empty()) throw MetricsError("class_median_hu: no voxels with label " + std::to_string(label));
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (static_cast<double>(values[mid - 1]) + static_cast<double>(values[mid]));
}

std::vector<SeparationRow> separation_rows(const HuVolume& vol, const SegmentationMask& mask,
                                           const ViewingWindow& base, const WindowShiftPolicy& shift) {
  std::vector<SeparationRow> rows;
  auto add = [&](std::string name, const ViewingWindow& w, const std::function<double(double)>& f = {}) {
    rows.push_back({vol.source_id(), std::move(name), w.level(), w.width(), unit_class_means(vol, mask, w, f)});
  };
  const double liver_median = class_median_hu(vol, mask, kLiver);
  const double toward = std::clamp(liver_median, shift.level_low, shift.level_high);
  const ViewingWindow shifted = base.recentred(toward);

  add("base", base);
  add("window_shift_toward_liver", shifted);
  add("window_shift_low", base.recentred(shift.level_low));
  add("window_shift_high", base.recentred(shift.level_high));
  const double alpha = (base.level() - shifted.level()) / base.width();
  add("additive_brightness", base, [alpha](double u) { return u + alpha; });
  for (double g : {kNnUnetGammaRange.lo, kNnUnetGammaRange.hi}) {
    std::ostringstream name;
    name << "gamma_" << g;
    add(name.str(), base, [g](double u) { return std::pow(u, g); });
    std::ostringstream inv;
    inv << "gamma_inverse_" << g;
    add(inv.str(), base, [g](double u) { return 1.0 - std::pow(1.0 - u, g); });
  }
  return rows;
}

std::string separation_csv(const std::vector<SeparationRow>& rows) {
  std::ostringstream s;
  s.precision(17);
  s << "source_id,augmentation,level,width,mean_liver_unit,mean_tumor_unit,separation\n";
  for (const auto& r : rows) {
    s << r.source_id << ',' << r.augmentation << ',' << r.level << ',' << r.width << ',' << r.means.liver << ','
      << r.means.tumor << ',' << r.means.separation() << '\n';
  }
  return s.str();
}

}  // namespace winshift
