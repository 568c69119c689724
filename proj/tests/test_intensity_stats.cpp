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
#include "support.hpp"
#include "winshift/intensity_stats.hpp"

using namespace winshift;

namespace {

struct Labelled {
  HuVolume vol;
  SegmentationMask mask;
};

Labelled make_case(std::mt19937_64& rng, const std::string& id, std::size_t n, double mean, double sd,
                   bool integral = false) {
  std::normal_distribution<double> g(mean, sd);
  std::uniform_int_distribution<int> lab(0, 2);
  std::vector<float> v(n);
  std::vector<std::uint8_t> m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = g(rng);
    v[i] = static_cast<float>(integral ? std::round(x) : x);
    m[i] = static_cast<std::uint8_t>(lab(rng));
  }
  return {HuVolume({n, 1, 1}, {1, 1, 1}, v, id), SegmentationMask({n, 1, 1}, m)};
}

std::vector<double> foreground(const std::vector<Labelled>& cases) {
  std::vector<double> out;
  for (const auto& c : cases) {
    for (std::size_t i = 0; i < c.vol.size(); ++i) {
      if (c.mask.labels()[i] != 0) out.push_back(c.vol.voxels()[i]);
    }
  }
  return out;
}

std::vector<Labelled> cohort(std::uint64_t seed, int n, bool integral = false) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> centre(-50, 200);
  std::vector<Labelled> out;
  for (int i = 0; i < n; ++i) out.push_back(make_case(rng, "v" + std::to_string(i), 3000, centre(rng), 60, integral));
  return out;
}

ForegroundStats accumulate_all(const std::vector<Labelled>& cases) {
  ForegroundStats s;
  for (const auto& c : cases) s.accumulate(c.vol, c.mask);
  return s;
}

}  // namespace

TEST_CASE("moments match a two-pass oracle") {
  const auto cases = cohort(1, 10);
  const auto s = accumulate_all(cases);
  const auto fg = foreground(cases);
  const auto m = oracle::two_pass(fg);
  CHECK(s.n_foreground() == fg.size());
  CHECK(s.mean() == doctest::Approx(m.mean).epsilon(1e-6));
  CHECK(s.stddev() == doctest::Approx(m.std).epsilon(1e-6));
}

TEST_CASE("percentiles stay within a bin of the sorted sample") {
  const auto cases = cohort(2, 30);
  const auto s = accumulate_all(cases);
  const auto fg = foreground(cases);
  for (double q : {0.0, 0.005, 0.25, 0.5, 0.9, 0.995, 1.0}) {
    CHECK(std::abs(percentile(s, q) - oracle::quantile(fg, q)) <= s.binning().bin_width);
  }
  CHECK_THROWS_AS(percentile(s, 1.5), StatsError);
}

TEST_CASE("constant foreground gives its exact value") {
  ForegroundStats s;
  s.accumulate(HuVolume({4, 1, 1}, {1, 1, 1}, {33.25f, 33.25f, 33.25f, 5.f}),
               SegmentationMask({4, 1, 1}, {1, 2, 1, 0}));
  CHECK(percentile(s, 0.005) == 33.25);
  CHECK(percentile(s, 0.995) == 33.25);
  CHECK_THROWS_AS(derive_base_window(s), StatsError);
}

TEST_CASE("base window reproduces its percentiles") {
  const auto s = accumulate_all(cohort(3, 8));
  const auto w = derive_base_window(s);
  CHECK(w.lower() == percentile(s, kBaseWindowLowerQuantile));
  CHECK(w.upper() == percentile(s, kBaseWindowUpperQuantile));
  CHECK(w.level() - w.width() / 2 == doctest::Approx(w.lower()).epsilon(1e-12));
}

TEST_CASE("merge is commutative and associative") {
  const auto cases = cohort(4, 9);
  std::vector<ForegroundStats> parts(3);
  for (std::size_t i = 0; i < cases.size(); ++i) parts[i % 3].accumulate(cases[i].vol, cases[i].mask);
  const auto ab = merge(parts[0], parts[1]);
  const auto ba = merge(parts[1], parts[0]);
  CHECK(ab.mean() == ba.mean());
  CHECK(ab.m2() == ba.m2());
  const auto left = merge(ab, parts[2]);
  const auto right = merge(parts[0], merge(parts[1], parts[2]));
  const auto seq = accumulate_all(cases);
  for (const auto* s : {&left, &right}) {
    CHECK(s->n_foreground() == seq.n_foreground());
    CHECK(s->mean() == doctest::Approx(seq.mean()).epsilon(1e-9));
    CHECK(s->stddev() == doctest::Approx(seq.stddev()).epsilon(1e-9));
    CHECK(s->per_volume_medians() == seq.per_volume_medians());
    for (std::size_t b = 0; b < seq.histogram().size(); ++b) REQUIRE(s->histogram()[b].count == seq.histogram()[b].count);
  }
  CHECK_THROWS_AS(merge(parts[0], parts[0]), StatsError);
  CHECK_THROWS_AS(merge(parts[0], ForegroundStats(HistogramBinning{-1000, 2, 100})), StatsError);
}

TEST_CASE("per-volume medians are exact and shift bounds use them") {
  const auto cases = cohort(5, 12);
  const auto s = accumulate_all(cases);
  REQUIRE(s.per_volume_medians().size() == 24);
  std::vector<double> pooled;
  for (const auto& c : cases) {
    for (std::uint8_t l : {1, 2}) {
      std::vector<double> vals;
      for (std::size_t i = 0; i < c.vol.size(); ++i) {
        if (c.mask.labels()[i] == l) vals.push_back(c.vol.voxels()[i]);
      }
      pooled.push_back(oracle::quantile(vals, 0.5));
    }
  }
  for (const auto& m : s.per_volume_medians()) CHECK(std::count(pooled.begin(), pooled.end(), m.median) >= 1);
  const auto b = derive_shift_bounds(s, {1, 2}, 0.3);
  CHECK(b.level_low == doctest::Approx(oracle::quantile(pooled, 0.005)).epsilon(1e-12));
  CHECK(b.level_high == doctest::Approx(oracle::quantile(pooled, 0.995)).epsilon(1e-12));
  CHECK(b.probability == 0.3);
  CHECK_THROWS_AS(derive_shift_bounds(s, {7}, 0.3), StatsError);
}

TEST_CASE("normalization matches a per-voxel oracle") {
  SUBCASE("integer HU is exact") {
    const auto cases = cohort(6, 6, true);
    const auto s = accumulate_all(cases);
    const auto w = derive_base_window(s);
    std::vector<double> unit;
    for (double x : foreground(cases)) unit.push_back((std::clamp(x, w.lower(), w.upper()) - w.lower()) / w.width());
    const auto m = oracle::two_pass(unit);
    const auto n = normalization_params(s, w);
    CHECK(n.mean == doctest::Approx(m.mean).epsilon(1e-9));
    CHECK(n.std == doctest::Approx(m.std).epsilon(1e-9));
  }
  SUBCASE("continuous HU within 1e-3") {
    const auto cases = cohort(7, 6);
    const auto s = accumulate_all(cases);
    const auto w = ViewingWindow::from_level_width(60.3, 151.7);
    std::vector<double> unit;
    for (double x : foreground(cases)) unit.push_back((std::clamp(x, w.lower(), w.upper()) - w.lower()) / w.width());
    const auto m = oracle::two_pass(unit);
    const auto n = normalization_params(s, w);
    CHECK(std::abs(n.mean - m.mean) < 1e-3);
    CHECK(std::abs(n.std - m.std) < 1e-3);
  }
}

TEST_CASE("volumes without foreground are reported") {
  ForegroundStats s;
  s.accumulate(HuVolume({2, 1, 1}, {1, 1, 1}, {1.f, 2.f}, "empty"), SegmentationMask({2, 1, 1}, {0, 0}));
  CHECK(s.empty());
  CHECK(s.warnings().size() == 1);
  CHECK_THROWS_AS(s.accumulate(HuVolume({1, 1, 1}, {1, 1, 1}, {1.f}, "empty"), SegmentationMask({1, 1, 1}, {1})),
                  StatsError);
}

TEST_CASE("stats document survives json") {
  const auto doc = make_stats_document(accumulate_all(cohort(8, 4)), {1, 2}, {1}, 0.3);
  const auto back = stats_document_from_json(to_json(doc));
  CHECK(back.base_window == doc.base_window);
  CHECK(back.shift_policy == doc.shift_policy);
  CHECK(back.normalization.mean == doc.normalization.mean);
  CHECK(back.stats.n_foreground() == doc.stats.n_foreground());
  CHECK(back.stats.per_volume_medians() == doc.stats.per_volume_medians());
  CHECK(back.shift_classes == LabelSet{1});
  CHECK(percentile(back.stats, 0.37) == percentile(doc.stats, 0.37));

  auto j = nlohmann::json::parse(to_json(doc));
  j.erase("base_window");
  try {
    stats_document_from_json(j.dump());
    FAIL("expected throw");
  } catch (const StatsError& e) {
    CHECK(std::string(e.what()).find("base_window") != std::string::npos);
  }
  j = nlohmann::json::parse(to_json(doc));
  j["schema_version"] = 99;
  CHECK_THROWS_AS(stats_document_from_json(j.dump()), StatsError);
}
