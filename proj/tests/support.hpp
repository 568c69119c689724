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

#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <array>

#include <atomic>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "winshift/volume.hpp"

namespace winshift::test {

/// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("winshift_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline HuVolume random_volume(std::mt19937_64& rng, Dims dims, double lo = -1100.0, double hi = 3100.0,
                              std::string id = "vol") {
  std::uniform_real_distribution<double> u(lo, hi);
  std::uniform_real_distribution<double> sp(0.5, 5.0);
  std::vector<float> v(voxel_count(dims));
  for (auto& x : v) x = static_cast<float>(u(rng));
  return HuVolume(dims, {sp(rng), sp(rng), sp(rng)}, std::move(v), std::move(id));
}

inline SegmentationMask random_mask(std::mt19937_64& rng, Dims dims, int n_labels = 3) {
  std::uniform_int_distribution<int> u(0, n_labels - 1);
  std::vector<std::uint8_t> v(voxel_count(dims));
  for (auto& x : v) x = static_cast<std::uint8_t>(u(rng));
  return SegmentationMask(dims, std::move(v));
}

// ---------------------------------------------------------------------------
// Minimal NIfTI-1 writer used to build reader fixtures.

struct NiftiFixture {
  std::array<std::int16_t, 3> dims{4, 3, 2};
  std::array<float, 3> pixdim{1.0f, 1.0f, 1.0f};
  std::int16_t datatype = 16;
  std::int16_t bitpix = 32;
  float scl_slope = 1.0f;
  float scl_inter = 0.0f;
  std::int16_t qform_code = 0;
  std::int16_t sform_code = 0;
  std::array<float, 3> quatern{0.0f, 0.0f, 0.0f};
  float qfac = 1.0f;
  std::array<std::array<float, 4>, 3> srow{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}}};
  float vox_offset = 352.0f;
  const char* magic = "n+1";
  bool big_endian = false;
  /// Raw payload bytes in the file's byte order.
  std::vector<unsigned char> payload;

  template <typename T>
  void set_values(const std::vector<T>& values) {
    payload.resize(values.size() * sizeof(T));
    for (std::size_t i = 0; i < values.size(); ++i) {
      unsigned char b[sizeof(T)];
      std::memcpy(b, &values[i], sizeof(T));
      if (big_endian) std::reverse(b, b + sizeof(T));
      std::memcpy(payload.data() + i * sizeof(T), b, sizeof(T));
    }
  }

  std::vector<unsigned char> bytes() const {
    std::vector<unsigned char> h(std::max<std::size_t>(352, static_cast<std::size_t>(vox_offset)), 0);
    auto put = [&](std::size_t off, auto v) {
      unsigned char b[sizeof(v)];
      std::memcpy(b, &v, sizeof(v));
      if (big_endian) std::reverse(b, b + sizeof(v));
      std::memcpy(h.data() + off, b, sizeof(v));
    };
    put(0, std::int32_t{348});
    put(40, std::int16_t{3});
    for (int i = 0; i < 3; ++i) put(42 + 2 * i, dims[i]);
    for (int i = 3; i < 7; ++i) put(42 + 2 * i, std::int16_t{1});
    put(70, datatype);
    put(72, bitpix);
    put(76, qfac);
    for (int i = 0; i < 3; ++i) put(80 + 4 * i, pixdim[i]);
    put(108, vox_offset);
    put(112, scl_slope);
    put(116, scl_inter);
    put(252, qform_code);
    put(254, sform_code);
    for (int i = 0; i < 3; ++i) put(256 + 4 * i, quatern[i]);
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) put(280 + 16 * r + 4 * c, srow[r][c]);
    }
    std::memcpy(h.data() + 344, magic, 4);
    h.insert(h.end(), payload.begin(), payload.end());
    return h;
  }

  void write(const std::filesystem::path& path) const {
    const auto b = bytes();
    if (path.extension() == ".gz") {
      gzFile f = gzopen(path.c_str(), "wb");
      gzwrite(f, b.data(), static_cast<unsigned>(b.size()));
      gzclose(f);
    } else {
      std::ofstream(path, std::ios::binary).write(reinterpret_cast<const char*>(b.data()), b.size());
    }
  }
};

}  // namespace winshift::test
