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

#include "winshift/npy.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <regex>
#include <stdexcept>

namespace winshift::npy {

namespace {

constexpr char kMagic[] = "\x93NUMPY";

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::string shape_tuple(std::span<const std::size_t> shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    s += std::to_string(shape[i]);
    if (shape.size() == 1 || i + 1 < shape.size()) s += ",";
    if (i + 1 < shape.size()) s += " ";
  }
  return s + ")";
}

void write_raw(const std::filesystem::path& path, const std::string& header, const void* data,
               std::size_t bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct Parsed {
  std::string descr;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<char> payload;
};

Parsed read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  char pre[10];
  in.read(pre, 10);
  if (!in || std::memcmp(pre, kMagic, 6) != 0) throw std::runtime_error("not an NPY file: " + path.string());
  if (pre[6] != 1) throw std::runtime_error("unsupported NPY version in " + path.string());
  const std::size_t hlen = static_cast<unsigned char>(pre[8]) | (static_cast<unsigned char>(pre[9]) << 8);
  std::string header(hlen, '\0');
  in.read(header.data(), static_cast<std::streamsize>(hlen));
  if (!in) throw std::runtime_error("truncated NPY header: " + path.string());

  static const std::regex descr_re(R"('descr':\s*'([^']+)')");
  static const std::regex order_re(R"('fortran_order':\s*(True|False))");
  static const std::regex shape_re(R"('shape':\s*\((\d+),\s*(\d+)\s*,?\))");
  std::smatch m;
  Parsed p;
  if (!std::regex_search(header, m, descr_re)) throw std::runtime_error("NPY header missing descr");
  p.descr = m[1];
  if (!std::regex_search(header, m, order_re) || m[1] != "False") {
    throw std::runtime_error("only C-order NPY arrays are supported");
  }
  if (!std::regex_search(header, m, shape_re)) throw std::runtime_error("only 2D NPY arrays are supported");
  p.rows = std::stoull(m[1]);
  p.cols = std::stoull(m[2]);
  p.payload.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return p;
}

}  // namespace

std::string make_header(const std::string& descr, std::span<const std::size_t> shape) {
  std::string dict = "{'descr': '" + descr + "', 'fortran_order': False, 'shape': " + shape_tuple(shape) + ", }";
  const std::size_t unpadded = 10 + dict.size() + 1;
  const std::size_t total = (unpadded + 63) / 64 * 64;
  dict.append(total - unpadded, ' ');
  dict.push_back('\n');
  const std::size_t hlen = dict.size();
  std::string out(kMagic, 6);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(hlen & 0xff));
  out.push_back(static_cast<char>((hlen >> 8) & 0xff));
  return out + dict;
}

void write_f4(const std::filesystem::path& path, std::span<const float> data, std::size_t rows,
              std::size_t cols) {
  if (data.size() != rows * cols) throw std::invalid_argument("npy::write_f4: shape does not match data size");
  const std::size_t shape[] = {rows, cols};
  const std::string header = make_header("<f4", shape);
  if constexpr (std::endian::native == std::endian::little) {
    write_raw(path, header, data.data(), data.size_bytes());
  } else {
    std::vector<std::uint32_t> swapped(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
      std::uint32_t u = std::bit_cast<std::uint32_t>(data[i]);
      swapped[i] = __builtin_bswap32(u);
    }
    write_raw(path, header, swapped.data(), swapped.size() * 4);
  }
}

void write_u1(const std::filesystem::path& path, std::span<const std::uint8_t> data, std::size_t rows,
              std::size_t cols) {
  if (data.size() != rows * cols) throw std::invalid_argument("npy::write_u1: shape does not match data size");
  const std::size_t shape[] = {rows, cols};
  write_raw(path, make_header("|u1", shape), data.data(), data.size());
}

Array2D<float> read_f4(const std::filesystem::path& path) {
  Parsed p = read_raw(path);
  if (p.descr != "<f4") throw std::runtime_error("expected <f4 NPY, got " + p.descr);
  if (p.payload.size() != p.rows * p.cols * 4) throw std::runtime_error("NPY payload size mismatch");
  Array2D<float> a{p.rows, p.cols, std::vector<float>(p.rows * p.cols)};
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    std::uint32_t u;
    std::memcpy(&u, p.payload.data() + 4 * i, 4);
    if constexpr (std::endian::native == std::endian::big) u = __builtin_bswap32(u);
    a.data[i] = std::bit_cast<float>(u);
  }
  return a;
}

Array2D<std::uint8_t> read_u1(const std::filesystem::path& path) {
  Parsed p = read_raw(path);
  if (p.descr != "|u1" && p.descr != "<u1") throw std::runtime_error("expected |u1 NPY, got " + p.descr);
  if (p.payload.size() != p.rows * p.cols) throw std::runtime_error("NPY payload size mismatch");
  return {p.rows, p.cols, std::vector<std::uint8_t>(p.payload.begin(), p.payload.end())};
}

}  // namespace winshift::npy
