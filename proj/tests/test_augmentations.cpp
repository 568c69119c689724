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
#include <set>

#include "winshift/augmentations.hpp"
#include "winshift/intensity_stats.hpp"
#include "winshift/windowing.hpp"

using namespace winshift;

namespace {

Image2D random_image(std::mt19937_64& rng, std::size_t w, std::size_t h, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Image2D img(w, h, 0.0);
  for (auto& p : img.pixels) p = u(rng);
  return img;
}

Mask2D random_labels(std::mt19937_64& rng, std::size_t w, std::size_t h, int max_label) {
  std::uniform_int_distribution<int> u(0, max_label);
  Mask2D m(w, h, std::uint8_t{0});
  for (auto& p : m.pixels) p = static_cast<std::uint8_t>(u(rng));
  return m;
}

double mean(const Image2D& img) {
  double s = 0;
  for (double p : img.pixels) s += p;
  return s / static_cast<double>(img.size());
}

const ViewingWindow kBase = ViewingWindow::from_level_width(100, 200);
const NormalizationParams kNorm{0.45, 0.2};

}  // namespace

TEST_CASE("multiplicative brightness scales the mean") {
  std::mt19937_64 rng(1);
  const auto z = random_image(rng, 16, 16, -2, 3);
  CHECK(mean(multiplicative_brightness(z, 1.23)) == doctest::Approx(1.23 * mean(z)).epsilon(1e-6));
}

TEST_CASE("contrast stays inside the input range") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> beta(0.65, 1.5);
  for (int t = 0; t < 1000; ++t) {
    const auto z = random_image(rng, 6, 6, -3, 3);
    const auto out = contrast(z, beta(rng));
    const auto [lo, hi] = std::minmax_element(z.pixels.begin(), z.pixels.end());
    const auto [olo, ohi] = std::minmax_element(out.pixels.begin(), out.pixels.end());
    REQUIRE(*olo >= *lo);
    REQUIRE(*ohi <= *hi);
  }
}

TEST_CASE("gamma maps are monotone on the unit interval") {
  std::vector<double> xs;
  for (int i = 0; i <= 200; ++i) xs.push_back(i / 200.0);
  const Image2D x(xs.size(), 1, xs);
  for (double g : {0.7, 1.0, 1.5}) {
    const auto a = gamma(x, g), b = gamma_inverse(x, g);
    for (std::size_t i = 1; i < xs.size(); ++i) {
      REQUIRE(a.pixels[i] >= a.pixels[i - 1]);
      REQUIRE(b.pixels[i] >= b.pixels[i - 1]);
    }
    CHECK(a.pixels.front() == 0.0);
    CHECK(b.pixels.back() == 1.0);
  }
  CHECK_THROWS_AS(gamma(Image2D(1, 1, 1.5), 0.7), StageError);
  CHECK_THROWS_AS(gamma_inverse(Image2D(1, 1, -0.1), 0.7), StageError);
}

TEST_CASE("additive brightness is a pure shift") {
  std::mt19937_64 rng(3);
  const auto u = random_image(rng, 5, 5, 0, 1);
  const auto s = additive_brightness(u, -0.125);
  for (std::size_t i = 0; i < u.size(); ++i) CHECK(s.pixels[i] == u.pixels[i] - 0.125);
}

TEST_CASE("crop-resize keeps the label set and the shape") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1), sc(0.5, 1.0);
  for (int t = 0; t < 300; ++t) {
    const auto img = random_image(rng, 12, 9, -1, 1);
    const auto m = random_labels(rng, 12, 9, t % 3);
    const auto box = make_crop_box(12, 9, sc(rng), u(rng), u(rng));
    REQUIRE(box.x0 + box.width <= 12);
    REQUIRE(box.y0 + box.height <= 9);
    const auto [oi, om] = crop_resize(img, m, box);
    REQUIRE(oi.width == 12);
    REQUIRE(om.height == 9);
    const std::set<std::uint8_t> before(m.pixels.begin(), m.pixels.end());
    for (auto l : om.pixels) REQUIRE(before.count(l) == 1);
  }
  Image2D img(4, 2, std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7});
  Mask2D m(4, 2, std::vector<std::uint8_t>{0, 1, 2, 0, 1, 1, 2, 2});
  const auto [same, same_m] = crop_resize(img, m, CropBox{0, 0, 4, 2});
  CHECK(same == img);
  CHECK(same_m == m);
}

TEST_CASE("flip mirrors image and mask together") {
  Image2D img(3, 2, std::vector<double>{1, 2, 3, 4, 5, 6});
  Mask2D m(3, 2, std::vector<std::uint8_t>{0, 1, 2, 0, 0, 1});
  flip_in_place(img, m, Axis::X);
  CHECK(img.pixels == std::vector<double>{3, 2, 1, 6, 5, 4});
  CHECK(m.pixels == std::vector<std::uint8_t>{2, 1, 0, 1, 0, 0});
  flip_in_place(img, m, Axis::Y);
  CHECK(img.pixels == std::vector<double>{6, 5, 4, 3, 2, 1});
}

TEST_CASE("policy validation") {
  CHECK_NOTHROW(nnunet_intensity_policy());
  CHECK_THROWS_AS(AugmentationPolicy({AugmentationSpec::make(Contrast{{0.65, 1.5}}, 0.1),
                                      AugmentationSpec::make(Gamma{{0.7, 1.5}}, 0.1)}),
                  PolicyError);
  CHECK_THROWS_AS(AugmentationPolicy({AugmentationSpec::make(WindowShift{0, 10}, 0.3),
                                      AugmentationSpec::make(WindowShift{0, 10}, 0.3)}),
                  PolicyError);
  CHECK_THROWS_AS(AugmentationSpec::make(Gamma{{1.5, 0.7}}, 0.1).validate(), PolicyError);
  CHECK_THROWS_AS(AugmentationSpec::make(Gamma{{0.7, 1.5}}, 1.1).validate(), PolicyError);
  auto bad = AugmentationSpec::make(Contrast{{0.65, 1.5}}, 0.1);
  bad.phase = Phase::PreNormalization;
  CHECK_THROWS_AS(bad.validate(), PolicyError);
  const auto ws = window_shift_policy({10, 90, 0.3}).window_shift();
  REQUIRE(ws);
  CHECK(*ws == WindowShiftPolicy{10, 90, 0.3});
}

TEST_CASE("equivalent brightness range spans the shift range over the width") {
  const WindowShiftPolicy shift{40, 140, 0.3};
  const auto r = equivalent_additive_brightness_range(shift, kBase);
  CHECK(r.hi - r.lo == doctest::Approx((shift.level_high - shift.level_low) / kBase.width()).epsilon(1e-12));
  CHECK(r.lo == doctest::Approx((kBase.level() - 140) / 200.0));
}

TEST_CASE("zero-probability policy equals inference preprocessing") {
  std::mt19937_64 rng(5);
  auto specs = nnunet_intensity_policy(0.0).specs();
  specs.insert(specs.begin(), AugmentationSpec::make(WindowShift{20, 180}, 0.0));
  for (auto s : default_geometric_specs()) {
    s.probability = 0.0;
    specs.push_back(s);
  }
  const AugmentationPolicy policy(specs);
  for (int t = 0; t < 20; ++t) {
    const auto hu = random_image(rng, 10, 8, -300, 400);
    const auto mask = random_labels(rng, 10, 8, 2);
    RandomStream r(t);
    const auto out = apply_policy(hu, mask, policy, kBase, kNorm, r);
    REQUIRE(out.image == preprocess_inference(hu, kBase, kNorm));
    REQUIRE(out.mask == mask);
    CHECK_FALSE(out.audit.window_shifted);
  }
}

TEST_CASE("each spec draws a fixed amount of randomness") {
  std::mt19937_64 rng(6);
  const auto hu = random_image(rng, 10, 8, -300, 400);
  const auto mask = random_labels(rng, 10, 8, 2);
  auto specs = nnunet_intensity_policy(0.5).specs();
  specs.insert(specs.begin(), AugmentationSpec::make(WindowShift{20, 180}, 0.5));
  for (const auto& s : default_geometric_specs()) specs.push_back(s);
  const AugmentationPolicy policy(specs);
  std::set<std::uint64_t> positions;
  for (int t = 0; t < 40; ++t) {
    RandomStream r(1000 + t);
    apply_policy(hu, mask, policy, kBase, kNorm, r);
    positions.insert(r.position());
  }
  CHECK(positions.size() == 1);
  // 2 per intensity spec and window shift, 2 for flip (x, y), 4 for crop; 2 words per uniform
  CHECK(*positions.begin() == 2 * (2 * 5 + 2 + 4));
}

TEST_CASE("audit replay reproduces the slice") {
  std::mt19937_64 rng(7);
  auto specs = nnunet_intensity_policy(0.6).specs();
  specs.insert(specs.begin(), AugmentationSpec::make(WindowShift{20, 180}, 0.7));
  for (const auto& s : default_geometric_specs()) specs.push_back(s);
  const AugmentationPolicy policy(specs);
  for (int t = 0; t < 30; ++t) {
    const auto hu = random_image(rng, 9, 7, -300, 400);
    const auto mask = random_labels(rng, 9, 7, 2);
    RandomStream r(t);
    const auto out = apply_policy(hu, mask, policy, kBase, kNorm, r);
    const auto audit = audit_from_json(audit_to_json(out.audit));
    const auto again = replay_audit(hu, mask, audit, kNorm);
    REQUIRE(again.image == out.image);
    REQUIRE(again.mask == out.mask);
  }
}

TEST_CASE("policy json") {
  StatsDocument stats;
  stats.base_window = kBase;
  stats.shift_policy = {30, 150, 0.3};
  const auto p = policy_from_json(R"({"schema_version":1,"kind":"winshift.policy","augmentations":[
      {"kind":"window_shift","probability":0.3},
      {"kind":"additive_brightness","probability":0.2,"params":{"equivalent_to_window_shift":true}},
      {"kind":"flip","probability":0.5}]})",
                                  &stats);
  REQUIRE(p.specs().size() == 3);
  CHECK(*p.window_shift() == WindowShiftPolicy{30, 150, 0.3});
  const auto& ab = std::get<AdditiveBrightness>(p.specs()[1].op);
  CHECK(ab.alpha == equivalent_additive_brightness_range(stats.shift_policy, kBase));
  CHECK(std::get<Flip>(p.specs()[2].op).x);

  const auto again = policy_from_json(to_json(p));
  CHECK(to_json(again) == to_json(p));
  CHECK_THROWS_AS(policy_from_json(R"({"schema_version":1,"augmentations":[{"kind":"window_shift","probability":0.3}]})"),
                  PolicyError);
  CHECK_THROWS_AS(policy_from_json(R"({"schema_version":1,"augmentations":[{"kind":"blur","probability":0.3}]})"),
                  PolicyError);
}
