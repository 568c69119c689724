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

#include "support.hpp"
#include "winshift/npy.hpp"
#include "winshift/volume_io.hpp"

using namespace winshift;
using test::NiftiFixture;
using test::TempDir;

namespace {

VolumeIoError::Kind kind_of(const std::filesystem::path& p) {
  try {
    read_volume(p);
  } catch (const VolumeIoError& e) {
    return e.kind();
  }
  FAIL("expected VolumeIoError");
  return VolumeIoError::Kind::Io;
}

std::vector<float> ramp(std::size_t n) {
  std::vector<float> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<float>(i) - 5.0f;
  return v;
}

}  // namespace

TEST_CASE("nifti float32 little and big endian") {
  TempDir dir("nii");
  for (bool be : {false, true}) {
    NiftiFixture fx;
    fx.big_endian = be;
    fx.pixdim = {0.7f, 0.8f, 2.5f};
    fx.set_values(ramp(24));
    const auto path = dir / (be ? "be.nii" : "le.nii");
    fx.write(path);
    const auto lv = read_volume(path);
    CHECK(lv.volume.dims() == Dims{4, 3, 2});
    CHECK(lv.volume.spacing()[2] == doctest::Approx(2.5));
    CHECK(lv.volume.at(3, 2, 1) == 23.0f - 5.0f);
    CHECK(lv.warnings.empty());
  }
}

TEST_CASE("nifti gz with int16 and slope/intercept") {
  TempDir dir("niigz");
  NiftiFixture fx;
  fx.datatype = 4;
  fx.bitpix = 16;
  fx.scl_slope = 2.0f;
  fx.scl_inter = -1024.0f;
  std::vector<std::int16_t> raw(24);
  for (int i = 0; i < 24; ++i) raw[i] = static_cast<std::int16_t>(i * 10);
  fx.set_values(raw);
  fx.write(dir / "ct.nii.gz");
  const auto lv = read_volume(dir / "ct.nii.gz");
  CHECK(lv.volume.voxels()[5] == 100.0f - 1024.0f);
  CHECK(lv.volume.source_id() == "ct");

  fx.scl_slope = 0.0f;  // means "no scaling"
  fx.write(dir / "noscale.nii");
  CHECK(read_volume(dir / "noscale.nii").volume.voxels()[5] == 50.0f);
}

TEST_CASE("nifti axes follow the sform") {
  TempDir dir("perm");
  NiftiFixture fx;
  fx.sform_code = 1;
  // array axis 0 points along world y, axis 1 along world x
  fx.srow = {{{0, 0.9f, 0, 0}, {0.8f, 0, 0, 0}, {0, 0, 3, 0}}};
  fx.pixdim = {0.8f, 0.9f, 3.0f};
  fx.set_values(ramp(24));
  fx.write(dir / "p.nii");
  const auto lv = read_volume(dir / "p.nii");
  CHECK(lv.volume.dims() == Dims{3, 4, 2});
  CHECK(lv.volume.spacing()[0] == doctest::Approx(0.9));
  // output (x, y, z) reads raw (y, x, z)
  CHECK(lv.volume.at(2, 1, 1) == static_cast<float>(1 + 2 * 4 + 12) - 5.0f);
  CHECK(lv.warnings.empty());

  fx.srow = {{{1, 0.2f, 0, 0}, {0.1f, 1, 0, 0}, {0, 0, 1, 0}}};
  fx.write(dir / "oblique.nii");
  const auto ob = read_volume(dir / "oblique.nii");
  CHECK(ob.volume.dims() == Dims{4, 3, 2});
  REQUIRE(ob.warnings.size() == 1);
  CHECK(ob.warnings[0].find("oblique") != std::string::npos);
}

TEST_CASE("nifti header errors name their field") {
  TempDir dir("bad");
  NiftiFixture fx;
  fx.set_values(ramp(24));

  auto f = fx;
  f.magic = "ni1";
  f.write(dir / "a.nii");
  CHECK(kind_of(dir / "a.nii") == VolumeIoError::Kind::MalformedHeader);

  f = fx;
  f.datatype = 128;  // RGB
  f.bitpix = 24;
  f.write(dir / "b.nii");
  CHECK(kind_of(dir / "b.nii") == VolumeIoError::Kind::UnsupportedDatatype);

  f = fx;
  f.payload.resize(10);
  f.write(dir / "c.nii");
  CHECK(kind_of(dir / "c.nii") == VolumeIoError::Kind::MalformedHeader);

  f = fx;
  f.vox_offset = 200.0f;
  f.write(dir / "d.nii");
  CHECK(kind_of(dir / "d.nii") == VolumeIoError::Kind::MalformedHeader);

  CHECK(kind_of(dir / "missing.nii") == VolumeIoError::Kind::Io);

  try {
    f = fx;
    f.bitpix = 8;
    f.write(dir / "e.nii");
    read_volume(dir / "e.nii");
    FAIL("expected throw");
  } catch (const VolumeIoError& e) {
    CHECK(e.field() == "bitpix");
  }
}

TEST_CASE("mask shape must match image") {
  TempDir dir("mm");
  std::mt19937_64 rng(3);
  const auto vol = test::random_volume(rng, {4, 3, 2});
  write_volume(vol, dir / "v.wsv");
  write_mask(test::random_mask(rng, {4, 3, 3}), dir / "v.seg.wsv");
  try {
    read_volume(dir / "v.wsv", dir / "v.seg.wsv");
    FAIL("expected throw");
  } catch (const VolumeIoError& e) {
    CHECK(e.kind() == VolumeIoError::Kind::DimensionMismatch);
    CHECK(e.field() == "dim");
  }

  NiftiFixture fx;
  fx.set_values(std::vector<float>(24, 1.5f));
  fx.write(dir / "frac.nii");
  CHECK_THROWS_AS(read_mask(dir / "frac.nii"), VolumeIoError);
}

TEST_CASE("sidecar round-trips random volumes bit-exactly") {
  TempDir dir("rt");
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> d(1, 9);
  for (int i = 0; i < 120; ++i) {
    const auto vol = test::random_volume(rng, {d(rng), d(rng), d(rng)});
    const auto mask = test::random_mask(rng, vol.dims());
    write_volume(vol, dir / "x.wsv");
    write_mask(mask, dir / "x.seg.wsv");
    const auto back = read_volume(dir / "x.wsv", dir / "x.seg.wsv");
    REQUIRE(back.volume == vol);
    REQUIRE(back.mask->labels().size() == mask.labels().size());
    CHECK(std::equal(mask.labels().begin(), mask.labels().end(), back.mask->labels().begin()));
  }
}

TEST_CASE("slice export keeps float values and flags classes") {
  TempDir dir("exp");
  std::mt19937_64 rng(5);
  const auto vol = test::random_volume(rng, {5, 4, 3}, -1000, 1000, "case7");
  std::vector<std::uint8_t> labels(60, 0);
  labels[5 * 4 + 2] = kLiver;
  labels[2 * 20 + 1] = kTumor;
  const SegmentationMask mask({5, 4, 3}, labels);
  const auto ex = export_slices(vol, mask, dir.path());
  REQUIRE(ex.slices.size() == 3);
  CHECK(ex.slices[1].liver_present);
  CHECK_FALSE(ex.slices[1].tumor_present);
  CHECK(ex.slices[2].tumor_present);
  const auto arr = npy::read_f4(dir / ex.slices[2].file);
  CHECK(arr.rows == 4);
  CHECK(arr.cols == 5);
  const auto s = vol.axial_slice(2);
  CHECK(std::equal(s.begin(), s.end(), arr.data.begin()));
  const auto j = nlohmann::json::parse(test::slurp(ex.manifest));
  CHECK(j["source_id"] == "case7");
  CHECK(j["slices"].size() == 3);
}

TEST_CASE("npy header is aligned and parseable") {
  const std::size_t shape[2] = {3, 7};
  const auto h = npy::make_header("<f4", shape);
  CHECK(h.size() % 64 == 0);
  CHECK(h.substr(0, 6) == "\x93NUMPY");
  CHECK(h.find("'shape': (3, 7)") != std::string::npos);
  CHECK(h.back() == '\n');
}

TEST_CASE("source ids strip volume extensions") {
  CHECK(source_id_from_path("/a/b/volume-3.nii.gz") == "volume-3");
  CHECK(source_id_from_path("x.nii") == "x");
  CHECK(source_id_from_path("p.wsv") == "p");
}
