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

#include <random>

#include "support.hpp"
#include "winshift/volume.hpp"

using namespace winshift;

TEST_CASE("hu calibration anchors water and air") {
  const AttenuationCalibration cal{0.2, 0.0002};
  CHECK(hu_from_attenuation(cal.mu_water, cal) == 0.0);
  CHECK(hu_from_attenuation(cal.mu_air, cal) == -1000.0);
  CHECK(hu_from_attenuation(0.4, AttenuationCalibration{0.2, 0.0}) == doctest::Approx(1000.0));
}

TEST_CASE("hu calibration is affine in mu") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mu(0.0, 0.6), a(0.0, 1.0);
  const AttenuationCalibration cal{0.19, 0.0003};
  for (int i = 0; i < 2000; ++i) {
    const double m1 = mu(rng), m2 = mu(rng), t = a(rng);
    const double lhs = hu_from_attenuation(t * m1 + (1 - t) * m2, cal);
    const double rhs = t * hu_from_attenuation(m1, cal) + (1 - t) * hu_from_attenuation(m2, cal);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
  }
}

TEST_CASE("calibration rejects inverted or non-finite inputs") {
  CHECK_THROWS_AS(hu_from_attenuation(0.1, {0.0, 0.1}), CalibrationError);
  CHECK_THROWS_AS(hu_from_attenuation(0.1, {0.2, -0.1}), CalibrationError);
  CHECK_THROWS(hu_from_attenuation(std::nan(""), {0.2, 0.0}));
}

TEST_CASE("volume validates shape and values") {
  CHECK_THROWS_AS(HuVolume({2, 2, 2}, {1, 1, 1}, std::vector<float>(7, 0.f)), VolumeError);
  CHECK_THROWS_AS(HuVolume({2, 2, 0}, {1, 1, 1}, {}), VolumeError);
  CHECK_THROWS_AS(HuVolume({1, 1, 1}, {0, 1, 1}, {0.f}), VolumeError);
  CHECK_THROWS_AS(HuVolume({1, 1, 1}, {1, 1, 1}, {std::numeric_limits<float>::infinity()}), VolumeError);

  std::vector<float> v(24);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<float>(i);
  const HuVolume vol({4, 3, 2}, {1, 1, 2.5}, v, "a");
  CHECK(vol.at(1, 2, 1) == 1 + 4 * 2 + 12);
  const auto s = vol.axial_slice(1);
  CHECK(s.size() == 12);
  CHECK(s.front() == 12.f);
  CHECK(vol == vol.with_source_id("b"));
}

TEST_CASE("mask labels must be known classes") {
  CHECK_NOTHROW(SegmentationMask({2, 1, 1}, {0, 2}));
  CHECK_THROWS_AS(SegmentationMask({2, 1, 1}, {0, 3}), VolumeError);
  const SegmentationMask m({2, 1, 2}, {0, 1, 2, 0});
  CHECK(m.slice_contains(0, kLiver));
  CHECK_FALSE(m.slice_contains(0, kTumor));
  CHECK(m.slice_contains(1, kTumor));
}
