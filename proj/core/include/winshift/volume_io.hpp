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

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "winshift/volume.hpp"

namespace winshift {

/// I/O failure with a category and the header field (or file) it concerns.
class VolumeIoError : public std::runtime_error {
 public:
  enum class Kind { Io, MalformedHeader, UnsupportedDatatype, DimensionMismatch, InvalidData };

  VolumeIoError(Kind kind, std::string field, const std::string& message);

  Kind kind() const { return kind_; }
  const std::string& field() const { return field_; }

 private:
  Kind kind_;
  std::string field_;
};

const char* to_string(VolumeIoError::Kind kind);

struct LoadedVolume {
  HuVolume volume;
  std::optional<SegmentationMask> mask;
  /// Non-fatal findings, e.g. an oblique affine that was passed through.
  std::vector<std::string> warnings;
};

/// Reads a NIfTI-1 file (.nii or .nii.gz) or a raw sidecar file (.wsv).
/// NIfTI voxels are rescaled with scl_slope/scl_inter and reordered so that
/// array axes follow the dominant world axes of the header affine.
/// When `mask_path` is given the label volume is loaded and checked against
/// the image dims.
LoadedVolume read_volume(const std::filesystem::path& path,
                         const std::optional<std::filesystem::path>& mask_path = std::nullopt);

/// Reads a label volume on its own (any supported format).
SegmentationMask read_mask(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);

/// Raw sidecar format: 64-byte little-endian header followed by the payload.
///
///   offset  size  field
///        0     4  magic "WSHV"
///        4     4  u32 version (1)
///        8    12  u32 dims[3]
///       20    24  f64 spacing[3]
///       44     4  u32 dtype code (1 = f32 HU, 2 = u8 labels)
///       48    16  reserved, zero
inline constexpr std::size_t kSidecarHeaderSize = 64;
inline constexpr std::uint32_t kSidecarVersion = 1;
inline constexpr const char* kSidecarExtension = ".wsv";

void write_volume(const HuVolume& vol, const std::filesystem::path& path);
/// Labels go through the same sidecar layout with dtype code 2. Spacing is
/// written as 1 mm since masks carry no geometry of their own.
void write_mask(const SegmentationMask& mask, const std::filesystem::path& path);

/// Strips directory and volume extensions (.wsv, .nii, .nii.gz).
std::string source_id_from_path(const std::filesystem::path& path);

struct SliceEntry {
  std::size_t index = 0;
  bool liver_present = false;
  bool tumor_present = false;
  std::string file;
};

struct SliceExport {
  std::vector<SliceEntry> slices;
  std::filesystem::path manifest;
};

/// Writes every axial slice of `vol` as a (ny, nx) '<f4' NPY file and a
/// `manifest.json` describing which slices contain liver and tumor.
SliceExport export_slices(const HuVolume& vol, const SegmentationMask& mask, const std::filesystem::path& dir);

}  // namespace winshift
