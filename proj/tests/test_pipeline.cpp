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

#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "winshift/phantom.hpp"
#include "winshift/pipeline.hpp"
#include "winshift/separation.hpp"
#include "winshift/windowing.hpp"

using namespace winshift;

namespace {

StatsDocument stats_for(const std::vector<Phantom>& cohort) {
  ForegroundStats s;
  for (const auto& ph : cohort) s.accumulate(ph.volume, ph.mask);
  return make_stats_document(std::move(s), {1, 2}, {1, 2}, 0.3);
}

std::vector<Phantom> small_cohort() {
  PhantomSpec base;
  base.dims = {20, 20, 10};
  base.tumor_radius = 3;
  return generate_cohort(4, UniformBoost{0, 80}, 3, base);
}

}  // namespace

TEST_CASE("pipeline output depends only on (seed, source, slice, epoch)") {
  const auto cohort = small_cohort();
  const auto stats = stats_for(cohort);
  const AugmentationPipeline a(stats, window_shift_policy({stats.shift_policy.level_low, stats.shift_policy.level_high, 0.9}), 5);
  const auto hu = axial_slice_image(cohort[0].volume, 5);
  const auto mask = axial_slice_mask(cohort[0].mask, 5);
  const auto x = a.augment_slice(hu, mask, "phantom_000", 5, 0);
  CHECK(a.augment_slice(hu, mask, "phantom_000", 5, 0).image == x.image);
  bool any_differs = false;
  for (std::uint64_t e = 1; e < 6; ++e) any_differs |= !(a.augment_slice(hu, mask, "phantom_000", 5, e).image == x.image);
  CHECK(any_differs);
  CHECK(a.preprocess_slice(hu) == preprocess_inference(hu, stats.base_window, stats.normalization));
  CHECK(a.describe().find("seed=5") != std::string::npos);
}

TEST_CASE("pipeline opens from files") {
  test::TempDir dir("pipe");
  const auto stats = stats_for(small_cohort());
  std::ofstream(dir / "stats.json") << to_json(stats);
  const auto p = AugmentationPipeline::open(dir / "stats.json", std::nullopt, 1);
  REQUIRE(p.policy().window_shift());
  CHECK(*p.policy().window_shift() == stats.shift_policy);
  CHECK_THROWS(AugmentationPipeline::open(dir / "missing.json", std::nullopt, 1));
}

TEST_CASE("separation rows") {
  PhantomSpec spec;
  spec.contrast_boost = 100;
  spec.seed = 2;
  const auto ph = generate_phantom(spec);
  // base window and level range typical of a cohort with moderate enhancement
  const auto base = ViewingWindow::from_bounds(15, 130);
  const auto rows = separation_rows(ph.volume, ph.mask, base, {40, 110, 0.3});
  REQUIRE(rows.size() == 9);
  CHECK(rows[0].augmentation == "base");
  CHECK(rows[1].augmentation == "window_shift_toward_liver");
  CHECK(rows[4].augmentation == "additive_brightness");
  CHECK(rows[1].level == 110);
  CHECK(rows[1].means.separation() > rows[0].means.separation());
  CHECK(rows[4].means.separation() == doctest::Approx(rows[0].means.separation()).epsilon(1e-12));
  CHECK(separation_csv(rows).find("gamma_inverse_1.5") != std::string::npos);
}
