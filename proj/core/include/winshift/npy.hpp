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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace winshift::npy {

/// 2D array as read back from an NPY file; shape is (rows, cols).
template <typename T>
struct Array2D {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;
};

/// Builds a version 1.0 NPY header for a C-order array; the returned bytes
/// include magic and padding so that the payload starts on a 64-byte boundary.
std::string make_header(const std::string& descr, std::span<const std::size_t> shape);

/// Writes little-endian '<f4' data in C order with shape (rows, cols).
void write_f4(const std::filesystem::path& path, std::span<const float> data, std::size_t rows,
              std::size_t cols);
/// Writes '|u1' data in C order with shape (rows, cols).
void write_u1(const std::filesystem::path& path, std::span<const std::uint8_t> data, std::size_t rows,
              std::size_t cols);

Array2D<float> read_f4(const std::filesystem::path& path);
Array2D<std::uint8_t> read_u1(const std::filesystem::path& path);

}  // namespace winshift::npy
