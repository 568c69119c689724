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

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace winshift {

/// Row-major 2D grid; `width` is the fast axis (x), `height` the rows (y).
template <typename T>
struct Grid2D {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<T> pixels;

  Grid2D() = default;
  Grid2D(std::size_t w, std::size_t h, std::vector<T> p) : width(w), height(h), pixels(std::move(p)) {
    if (pixels.size() != width * height) throw std::invalid_argument("Grid2D: pixel count does not match shape");
  }
  Grid2D(std::size_t w, std::size_t h, T fill) : width(w), height(h), pixels(w * h, fill) {}

  std::size_t size() const { return pixels.size(); }
  T& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  const T& at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;
};

/// Slice intensities in double precision; HU in, z-scores out.
using Image2D = Grid2D<double>;
using Mask2D = Grid2D<std::uint8_t>;

class StageError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace winshift
