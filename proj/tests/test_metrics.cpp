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

#include <nlohmann/json.hpp>
#include <random>

#include "oracles.hpp"
#include "winshift/metrics.hpp"

using namespace winshift;

TEST_CASE("dice matches a counting oracle on random masks") {
  std::mt19937_64 rng(31);
  std::bernoulli_distribution fill(0.3);
  for (int t = 0; t < 500; ++t) {
    std::vector<std::uint8_t> a(256), b(256);
    for (auto& x : a) x = fill(rng);
    for (auto& x : b) x = fill(rng);
    const auto c = dice(a, b);
    const auto o = oracle::dice_counts(a, b, 16, 16);
    REQUIRE(c.tp == o.tp);
    REQUIRE(c.fp == o.fp);
    REQUIRE(c.fn == o.fn);
    if (o.tp + o.fp + o.fn > 0) REQUIRE(c.dice() == 2.0 * o.tp / double(2 * o.tp + o.fp + o.fn));
  }
}

TEST_CASE("dice edge cases") {
  const std::vector<std::uint8_t> a{1, 0, 1, 1}, not_a{0, 1, 0, 0}, empty(4, 0);
  CHECK(dice(a, a).dice() == 1.0);
  CHECK(dice(a, not_a).dice() == 0.0);
  CHECK(dice(empty, empty).dice() == 1.0);
  CHECK(dice(empty, a).dice() == 0.0);
  CHECK(dice(a, empty).dice() == 0.0);
  CHECK_THROWS_AS(dice(a, std::vector<std::uint8_t>(3, 0)), MetricsError);
}

TEST_CASE("dice on label volumes and aggregation") {
  const SegmentationMask truth({4, 1, 1}, {0, 1, 2, 2});
  const SegmentationMask pred({4, 1, 1}, {0, 2, 2, 1});
  const auto c = dice(pred, truth, kTumor);
  CHECK(c == DiceCounts{1, 1, 1});
  CHECK_THROWS_AS(dice(pred, SegmentationMask({2, 2, 1}, {0, 0, 0, 0}), kTumor), MetricsError);

  std::vector<VolumeDice> rows{{"a", {1, 0, 0}, 0}, {"b", {0, 3, 1}, 0}};
  const auto mean = make_dice_report(rows, DiceAggregation::PerVolumeMean);
  CHECK(mean.dice == doctest::Approx(0.5));
  const auto pooled = make_dice_report(rows, DiceAggregation::Pooled);
  CHECK(pooled.dice == doctest::Approx(2.0 / 6.0));
  CHECK(nlohmann::json::parse(to_json(pooled))["aggregation"] == "pooled");
  CHECK(to_csv(mean).find("a,") != std::string::npos);
}

TEST_CASE("mean HU difference uses healthy liver only") {
  const HuVolume vol({5, 1, 1}, {1, 1, 1}, {100.f, 80.f, 30.f, 50.f, -500.f});
  const SegmentationMask mask({5, 1, 1}, {1, 1, 2, 2, 0});
  const auto m = mean_hu_difference(vol, mask);
  CHECK(m.evaluable);
  CHECK(m.mean_liver_hu == 90.0);
  CHECK(m.mean_tumor_hu == 40.0);
  CHECK(m.abs_diff_hu == 50.0);

  const auto none = mean_hu_difference(vol, SegmentationMask({5, 1, 1}, {1, 1, 0, 0, 0}));
  CHECK_FALSE(none.evaluable);
  CHECK_FALSE(none.note.empty());
}

TEST_CASE("mean HU difference ignores voxel order within a class") {
  std::mt19937_64 rng(37);
  std::vector<float> v(200);
  std::vector<std::uint8_t> m(200);
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = std::uniform_real_distribution<float>(-100, 200)(rng);
    m[i] = static_cast<std::uint8_t>(i % 3);
  }
  const auto a = mean_hu_difference(HuVolume({200, 1, 1}, {1, 1, 1}, v), SegmentationMask({200, 1, 1}, m));
  // reverse the liver voxels among themselves
  std::vector<std::size_t> liver;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 1) liver.push_back(i);
  }
  for (std::size_t i = 0, j = liver.size() - 1; i < j; ++i, --j) std::swap(v[liver[i]], v[liver[j]]);
  const auto b = mean_hu_difference(HuVolume({200, 1, 1}, {1, 1, 1}, v), SegmentationMask({200, 1, 1}, m));
  CHECK(a.mean_liver_hu == doctest::Approx(b.mean_liver_hu).epsilon(1e-12));
  CHECK(a.abs_diff_hu == doctest::Approx(b.abs_diff_hu).epsilon(1e-12));
}

TEST_CASE("difficult cases use a strict threshold") {
  std::vector<ContrastMeasurement> ms;
  for (double d : {19.999, 20.0, 5.0, 35.0}) {
    ContrastMeasurement m;
    m.source_id = "d" + std::to_string(static_cast<int>(d * 1000));
    m.evaluable = true;
    m.abs_diff_hu = d;
    ms.push_back(m);
  }
  ContrastMeasurement skip;
  skip.source_id = "nope";
  ms.push_back(skip);
  const auto r = identify_difficult(ms);
  CHECK(r.threshold_hu == 20.0);
  CHECK(r.difficult_ids() == std::vector<std::string>{"d19999", "d5000"});
  CHECK(r.not_evaluable == std::vector<std::string>{"nope"});
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["threshold_hu"] == 20.0);
  CHECK(identify_difficult(ms, 40.0).difficult_ids().size() == 4);
}
