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

#include <array>
#include <cstdint>
#include <string_view>

namespace winshift {

/// Philox4x32-10 block function (Salmon et al., SC'11): maps a 128-bit
/// counter and 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Sequential view over a Philox stream. The key selects the stream, the
/// counter advances by one block per four 32-bit outputs. Copying a stream
/// copies its position.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key, std::uint64_t start_block = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi); returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller; consumes exactly two uniforms.
  double normal();

  std::uint64_t key() const { return key_; }
  /// Number of 32-bit words consumed so far.
  std::uint64_t position() const { return block_ * 4 + lane_ - 4; }

 private:
  std::uint64_t key_;
  std::uint64_t block_;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned lane_ = 4;
};

std::uint64_t splitmix64(std::uint64_t x);
/// FNV-1a over the bytes of `s`.
std::uint64_t hash_string(std::string_view s);

/// Stream for one slice of one epoch; independent of processing order.
RandomStream derive_stream(std::uint64_t run_seed, std::string_view source_id, std::uint64_t slice_index,
                           std::uint64_t epoch);

}  // namespace winshift
