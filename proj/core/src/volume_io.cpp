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

#include "winshift/volume_io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>

#include "winshift/npy.hpp"

namespace winshift {

namespace fs = std::filesystem;
using Kind = VolumeIoError::Kind;

VolumeIoError::VolumeIoError(Kind kind, std::string field, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + " [" + field + "]: " + message),
      kind_(kind),
      field_(std::move(field)) {}

const char* to_string(VolumeIoError::Kind kind) {
  switch (kind) {
    case Kind::Io: return "io error";
    case Kind::MalformedHeader: return "malformed header";
    case Kind::UnsupportedDatatype: return "unsupported datatype";
    case Kind::DimensionMismatch: return "dimension mismatch";
    case Kind::InvalidData: return "invalid data";
  }
  return "unknown";
}

namespace {

// ---------------------------------------------------------------------------
// Byte helpers

template <typename T>
T load(const unsigned char* p, bool swap) {
  T v;
  std::memcpy(&v, p, sizeof(T));
  if (swap) {
    if constexpr (sizeof(T) == 2) {
      v = std::bit_cast<T>(__builtin_bswap16(std::bit_cast<std::uint16_t>(v)));
    } else if constexpr (sizeof(T) == 4) {
      v = std::bit_cast<T>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
    } else if constexpr (sizeof(T) == 8) {
      v = std::bit_cast<T>(__builtin_bswap64(std::bit_cast<std::uint64_t>(v)));
    }
  }
  return v;
}

template <typename T>
void store_le(std::vector<unsigned char>& buf, std::size_t offset, T v) {
  if constexpr (std::endian::native == std::endian::big) {
    if constexpr (sizeof(T) == 4) v = std::bit_cast<T>(__builtin_bswap32(std::bit_cast<std::uint32_t>(v)));
    if constexpr (sizeof(T) == 8) v = std::bit_cast<T>(__builtin_bswap64(std::bit_cast<std::uint64_t>(v)));
  }
  std::memcpy(buf.data() + offset, &v, sizeof(T));
}

constexpr bool kHostBig = std::endian::native == std::endian::big;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<unsigned char> read_all(const fs::path& path) {
  // gzread passes uncompressed files through unchanged.
  gzFile gz = gzopen(path.string().c_str(), "rb");
  if (gz == nullptr) throw VolumeIoError(Kind::Io, path.string(), "cannot open file");
  std::vector<unsigned char> out;
  unsigned char chunk[1 << 16];
  for (;;) {
    int n = gzread(gz, chunk, sizeof(chunk));
    if (n < 0) {
      int errnum = 0;
      std::string msg = gzerror(gz, &errnum);
      gzclose(gz);
      throw VolumeIoError(Kind::Io, path.string(), "read failed: " + msg);
    }
    if (n == 0) break;
    out.insert(out.end(), chunk, chunk + n);
  }
  gzclose(gz);
  return out;
}

// ---------------------------------------------------------------------------
// Raw sidecar

enum class SidecarType : std::uint32_t { F32 = 1, U8 = 2 };

struct RawImage {
  Dims dims{};
  Spacing spacing{1.0, 1.0, 1.0};
  std::vector<double> values;
};

void write_sidecar(const fs::path& path, const Dims& dims, const Spacing& spacing, SidecarType type,
                   const void* payload, std::size_t payload_bytes) {
  std::vector<unsigned char> header(kSidecarHeaderSize, 0);
  std::memcpy(header.data(), "WSHV", 4);
  store_le<std::uint32_t>(header, 4, kSidecarVersion);
  for (int i = 0; i < 3; ++i) {
    if (dims[i] > 0xffffffffULL) throw VolumeIoError(Kind::InvalidData, "dims", "dimension exceeds 32 bits");
    store_le<std::uint32_t>(header, 8 + 4 * i, static_cast<std::uint32_t>(dims[i]));
    store_le<double>(header, 20 + 8 * i, spacing[i]);
  }
  store_le<std::uint32_t>(header, 44, static_cast<std::uint32_t>(type));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw VolumeIoError(Kind::Io, path.string(), "cannot open for writing");
  out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  if (type == SidecarType::F32 && kHostBig) {
    const auto* src = static_cast<const std::uint32_t*>(payload);
    for (std::size_t i = 0; i < payload_bytes / 4; ++i) {
      std::uint32_t u = __builtin_bswap32(src[i]);
      out.write(reinterpret_cast<const char*>(&u), 4);
    }
  } else {
    out.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
  }
  if (!out) throw VolumeIoError(Kind::Io, path.string(), "write failed");
}

struct Sidecar {
  Dims dims{};
  Spacing spacing{};
  SidecarType type{};
  std::vector<unsigned char> bytes;  // whole file
};

Sidecar parse_sidecar(const fs::path& path, std::vector<unsigned char> bytes) {
  if (bytes.size() < kSidecarHeaderSize) throw VolumeIoError(Kind::MalformedHeader, "header", "file shorter than 64 bytes");
  const unsigned char* h = bytes.data();
  if (std::memcmp(h, "WSHV", 4) != 0) throw VolumeIoError(Kind::MalformedHeader, "magic", "not a sidecar volume: " + path.string());
  const auto version = load<std::uint32_t>(h + 4, kHostBig);
  if (version != kSidecarVersion) {
    throw VolumeIoError(Kind::MalformedHeader, "version", "unsupported sidecar version " + std::to_string(version));
  }
  Sidecar s;
  for (int i = 0; i < 3; ++i) {
    s.dims[i] = load<std::uint32_t>(h + 8 + 4 * i, kHostBig);
    s.spacing[i] = load<double>(h + 20 + 8 * i, kHostBig);
    if (s.dims[i] < 1) throw VolumeIoError(Kind::MalformedHeader, "dims", "dimension must be >= 1");
    if (!(s.spacing[i] > 0.0) || !std::isfinite(s.spacing[i])) {
      throw VolumeIoError(Kind::MalformedHeader, "spacing", "spacing must be positive and finite");
    }
  }
  const auto code = load<std::uint32_t>(h + 44, kHostBig);
  if (code != 1 && code != 2) {
    throw VolumeIoError(Kind::UnsupportedDatatype, "dtype", "unknown sidecar dtype code " + std::to_string(code));
  }
  s.type = static_cast<SidecarType>(code);
  const std::size_t elem = s.type == SidecarType::F32 ? 4 : 1;
  if (bytes.size() != kSidecarHeaderSize + voxel_count(s.dims) * elem) {
    throw VolumeIoError(Kind::MalformedHeader, "dims", "payload size does not match dims in " + path.string());
  }
  s.bytes = std::move(bytes);
  return s;
}

// ---------------------------------------------------------------------------
// NIfTI-1

constexpr std::size_t kNiftiHeaderSize = 348;

struct NiftiImage {
  RawImage image;
  std::vector<std::string> warnings;
};

std::size_t nifti_type_size(std::int16_t datatype) {
  switch (datatype) {
    case 2: case 256: return 1;       // uint8, int8
    case 4: case 512: return 2;       // int16, uint16
    case 8: case 768: case 16: return 4;  // int32, uint32, float32
    case 64: return 8;                // float64
    default: return 0;
  }
}

double nifti_value(const unsigned char* p, std::int16_t datatype, bool swap) {
  switch (datatype) {
    case 2: return *p;
    case 256: return static_cast<std::int8_t>(*p);
    case 4: return load<std::int16_t>(p, swap);
    case 512: return load<std::uint16_t>(p, swap);
    case 8: return load<std::int32_t>(p, swap);
    case 768: return load<std::uint32_t>(p, swap);
    case 16: return load<float>(p, swap);
    case 64: return load<double>(p, swap);
    default: return 0.0;
  }
}

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 quaternion_rotation(double b, double c, double d, double qfac) {
  double a = 1.0 - (b * b + c * c + d * d);
  a = a < 1e-7 ? 0.0 : std::sqrt(a);
  if (a == 0.0) {
    const double n = std::sqrt(b * b + c * c + d * d);
    b /= n; c /= n; d /= n;
  }
  Mat3 r{{{a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)},
          {2 * (b * c + a * d), a * a + c * c - b * b - d * d, 2 * (c * d - a * b)},
          {2 * (b * d - a * c), 2 * (c * d + a * b), a * a + d * d - c * c - b * b}}};
  for (auto& row : r) row[2] *= qfac;
  return r;
}

NiftiImage parse_nifti(const fs::path& path, const std::vector<unsigned char>& bytes) {
  if (bytes.size() < kNiftiHeaderSize) throw VolumeIoError(Kind::MalformedHeader, "sizeof_hdr", "file shorter than 348 bytes");
  const unsigned char* h = bytes.data();
  bool swap = false;
  const auto sizeof_hdr = load<std::int32_t>(h, false);
  if (sizeof_hdr != 348) {
    if (load<std::int32_t>(h, true) == 348) {
      swap = true;
    } else {
      throw VolumeIoError(Kind::MalformedHeader, "sizeof_hdr", "expected 348, got " + std::to_string(sizeof_hdr));
    }
  }
  if (std::memcmp(h + 344, "n+1\0", 4) != 0) {
    if (std::memcmp(h + 344, "ni1\0", 4) == 0) {
      throw VolumeIoError(Kind::MalformedHeader, "magic", "detached .hdr/.img pairs are not supported");
    }
    throw VolumeIoError(Kind::MalformedHeader, "magic", "not a single-file NIfTI-1 image");
  }

  std::array<std::int16_t, 8> dim{};
  for (int i = 0; i < 8; ++i) dim[i] = load<std::int16_t>(h + 40 + 2 * i, swap);
  if (dim[0] < 3 || dim[0] > 7) throw VolumeIoError(Kind::MalformedHeader, "dim", "dim[0] must be in [3, 7]");
  for (int i = 1; i <= 3; ++i) {
    if (dim[i] < 1) throw VolumeIoError(Kind::MalformedHeader, "dim", "dim[" + std::to_string(i) + "] must be >= 1");
  }
  for (int i = 4; i <= dim[0]; ++i) {
    if (dim[i] > 1) throw VolumeIoError(Kind::MalformedHeader, "dim", "only 3D volumes are supported");
  }

  const auto datatype = load<std::int16_t>(h + 70, swap);
  const std::size_t elem = nifti_type_size(datatype);
  if (elem == 0) throw VolumeIoError(Kind::UnsupportedDatatype, "datatype", "NIfTI datatype " + std::to_string(datatype));
  const auto bitpix = load<std::int16_t>(h + 72, swap);
  if (bitpix != static_cast<std::int16_t>(elem * 8)) {
    throw VolumeIoError(Kind::MalformedHeader, "bitpix", "bitpix " + std::to_string(bitpix) + " disagrees with datatype");
  }

  std::array<float, 8> pixdim{};
  for (int i = 0; i < 8; ++i) pixdim[i] = load<float>(h + 76 + 4 * i, swap);
  Spacing spacing{};
  for (int i = 0; i < 3; ++i) {
    spacing[i] = std::fabs(static_cast<double>(pixdim[i + 1]));
    if (!(spacing[i] > 0.0) || !std::isfinite(spacing[i])) {
      throw VolumeIoError(Kind::MalformedHeader, "pixdim", "pixdim[" + std::to_string(i + 1) + "] must be > 0");
    }
  }

  const auto vox_offset = load<float>(h + 108, swap);
  if (!std::isfinite(vox_offset) || vox_offset < 348.0f) {
    throw VolumeIoError(Kind::MalformedHeader, "vox_offset", "vox_offset must be >= 348");
  }
  double slope = load<float>(h + 112, swap);
  double inter = load<float>(h + 116, swap);
  if (!std::isfinite(slope) || slope == 0.0) {
    slope = 1.0;
    inter = 0.0;
  } else if (!std::isfinite(inter)) {
    throw VolumeIoError(Kind::MalformedHeader, "scl_inter", "intercept is not finite");
  }

  NiftiImage out;
  Dims raw_dims{static_cast<std::size_t>(dim[1]), static_cast<std::size_t>(dim[2]), static_cast<std::size_t>(dim[3])};
  const std::size_t n = voxel_count(raw_dims);
  const auto offset = static_cast<std::size_t>(vox_offset);
  if (bytes.size() < offset + n * elem) {
    throw VolumeIoError(Kind::MalformedHeader, "vox_offset", "voxel payload truncated in " + path.string());
  }

  // Direction matrix: sform preferred, then qform, else identity.
  Mat3 m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const auto qform_code = load<std::int16_t>(h + 252, swap);
  const auto sform_code = load<std::int16_t>(h + 254, swap);
  if (sform_code > 0) {
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) m[r][c] = load<float>(h + 280 + 16 * r + 4 * c, swap);
    }
  } else if (qform_code > 0) {
    const double qfac = pixdim[0] < 0 ? -1.0 : 1.0;
    m = quaternion_rotation(load<float>(h + 256, swap), load<float>(h + 260, swap), load<float>(h + 264, swap), qfac);
  }

  // For each array axis pick the world axis it mostly points along.
  std::array<int, 3> world_of{};
  bool oblique = false;
  for (int c = 0; c < 3; ++c) {
    int best = 0;
    double norm = 0.0;
    for (int r = 0; r < 3; ++r) {
      norm += m[r][c] * m[r][c];
      if (std::fabs(m[r][c]) > std::fabs(m[best][c])) best = r;
    }
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) throw VolumeIoError(Kind::MalformedHeader, "srow", "affine has a zero column");
    for (int r = 0; r < 3; ++r) {
      if (r != best && std::fabs(m[r][c]) > 1e-4 * norm) oblique = true;
    }
    world_of[c] = best;
  }
  std::array<int, 3> axis_for_world{-1, -1, -1};
  bool permutation = true;
  for (int c = 0; c < 3; ++c) {
    if (axis_for_world[world_of[c]] != -1) permutation = false;
    axis_for_world[world_of[c]] = c;
  }
  if (!permutation) {
    out.warnings.push_back(path.string() + ": affine axes are degenerate; keeping stored axis order");
    axis_for_world = {0, 1, 2};
  }
  if (oblique) {
    out.warnings.push_back(path.string() + ": oblique affine; axes reordered by dominant direction, not resampled");
  }

  RawImage& img = out.image;
  for (int w = 0; w < 3; ++w) {
    img.dims[w] = raw_dims[axis_for_world[w]];
    img.spacing[w] = spacing[axis_for_world[w]];
  }
  img.values.resize(n);
  const unsigned char* payload = bytes.data() + offset;
  const std::array<std::size_t, 3> raw_stride{1, raw_dims[0], raw_dims[0] * raw_dims[1]};
  std::size_t out_index = 0;
  for (std::size_t z = 0; z < img.dims[2]; ++z) {
    for (std::size_t y = 0; y < img.dims[1]; ++y) {
      for (std::size_t x = 0; x < img.dims[0]; ++x, ++out_index) {
        const std::size_t pos[3] = {x, y, z};
        std::size_t src = 0;
        for (int w = 0; w < 3; ++w) src += pos[w] * raw_stride[axis_for_world[w]];
        img.values[out_index] = nifti_value(payload + src * elem, datatype, swap) * slope + inter;
      }
    }
  }
  return out;
}

bool is_nifti_path(const fs::path& p) {
  const std::string s = p.filename().string();
  return ends_with(s, ".nii") || ends_with(s, ".nii.gz");
}

RawImage load_raw_image(const fs::path& path, std::vector<std::string>& warnings, bool& was_labels) {
  std::vector<unsigned char> bytes = read_all(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), "WSHV", 4) == 0) {
    Sidecar s = parse_sidecar(path, std::move(bytes));
    RawImage img{s.dims, s.spacing, std::vector<double>(voxel_count(s.dims))};
    const unsigned char* p = s.bytes.data() + kSidecarHeaderSize;
    was_labels = s.type == SidecarType::U8;
    for (std::size_t i = 0; i < img.values.size(); ++i) {
      img.values[i] = was_labels ? static_cast<double>(p[i]) : static_cast<double>(load<float>(p + 4 * i, kHostBig));
    }
    return img;
  }
  if (!is_nifti_path(path) && bytes.size() >= kNiftiHeaderSize && std::memcmp(bytes.data() + 344, "n+1", 3) != 0) {
    throw VolumeIoError(Kind::MalformedHeader, "magic", "unrecognized volume format: " + path.string());
  }
  NiftiImage nii = parse_nifti(path, bytes);
  warnings.insert(warnings.end(), nii.warnings.begin(), nii.warnings.end());
  was_labels = false;
  return std::move(nii.image);
}

SegmentationMask to_mask(const fs::path& path, RawImage img) {
  std::vector<std::uint8_t> labels(img.values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = img.values[i];
    if (!(v >= 0.0 && v <= 255.0) || std::nearbyint(v) != v) {
      throw VolumeIoError(Kind::InvalidData, "labels", "non-integral or out-of-range label in " + path.string());
    }
    labels[i] = static_cast<std::uint8_t>(v);
  }
  try {
    return SegmentationMask(img.dims, std::move(labels));
  } catch (const VolumeError& e) {
    throw VolumeIoError(Kind::InvalidData, "labels", e.what());
  }
}

}  // namespace

std::string source_id_from_path(const fs::path& path) {
  std::string name = path.filename().string();
  for (const char* ext : {".nii.gz", ".nii", ".wsv"}) {
    if (ends_with(name, ext)) return name.substr(0, name.size() - std::strlen(ext));
  }
  return path.stem().string();
}

LoadedVolume read_volume(const fs::path& path, const std::optional<fs::path>& mask_path) {
  std::vector<std::string> warnings;
  bool was_labels = false;
  RawImage img = load_raw_image(path, warnings, was_labels);
  if (was_labels) throw VolumeIoError(Kind::UnsupportedDatatype, "dtype", "expected an image, found a label volume");
  std::vector<float> voxels(img.values.size());
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    voxels[i] = static_cast<float>(img.values[i]);
    if (!std::isfinite(voxels[i])) {
      throw VolumeIoError(Kind::InvalidData, "voxels", "non-finite voxel at index " + std::to_string(i));
    }
  }
  HuVolume vol(img.dims, img.spacing, std::move(voxels), source_id_from_path(path));
  std::optional<SegmentationMask> mask;
  if (mask_path) {
    mask = read_mask(*mask_path, &warnings);
    if (mask->dims() != vol.dims()) {
      auto fmt = [](const Dims& d) {
        return "(" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," + std::to_string(d[2]) + ")";
      };
      throw VolumeIoError(Kind::DimensionMismatch, "dim",
                          "image dims " + fmt(vol.dims()) + " vs mask dims " + fmt(mask->dims()));
    }
  }
  return LoadedVolume{std::move(vol), std::move(mask), std::move(warnings)};
}

SegmentationMask read_mask(const fs::path& path, std::vector<std::string>* warnings) {
  std::vector<std::string> local;
  bool was_labels = false;
  RawImage img = load_raw_image(path, warnings ? *warnings : local, was_labels);
  return to_mask(path, std::move(img));
}

void write_volume(const HuVolume& vol, const fs::path& path) {
  const auto v = vol.voxels();
  write_sidecar(path, vol.dims(), vol.spacing(), SidecarType::F32, v.data(), v.size_bytes());
}

void write_mask(const SegmentationMask& mask, const fs::path& path) {
  const auto l = mask.labels();
  write_sidecar(path, mask.dims(), Spacing{1.0, 1.0, 1.0}, SidecarType::U8, l.data(), l.size());
}

SliceExport export_slices(const HuVolume& vol, const SegmentationMask& mask, const fs::path& dir) {
  if (mask.dims() != vol.dims()) throw VolumeIoError(Kind::DimensionMismatch, "dim", "mask does not match volume");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw VolumeIoError(Kind::Io, dir.string(), "cannot create output directory");

  SliceExport result;
  nlohmann::json entries = nlohmann::json::array();
  const auto [nx, ny, nz] = vol.dims();
  for (std::size_t z = 0; z < nz; ++z) {
    char name[32];
    std::snprintf(name, sizeof(name), "_z%04zu.npy", z);
    const std::string file = vol.source_id() + name;
    try {
      npy::write_f4(dir / file, vol.axial_slice(z), ny, nx);
    } catch (const std::runtime_error& e) {
      throw VolumeIoError(Kind::Io, (dir / file).string(), e.what());
    }
    SliceEntry entry{z, mask.slice_contains(z, kLiver), mask.slice_contains(z, kTumor), file};
    entries.push_back({{"index", entry.index},
                       {"liver_present", entry.liver_present},
                       {"tumor_present", entry.tumor_present},
                       {"file", entry.file}});
    result.slices.push_back(std::move(entry));
  }
  nlohmann::json manifest = {{"schema_version", 1},
                             {"source_id", vol.source_id()},
                             {"dims", {nx, ny, nz}},
                             {"slices", std::move(entries)}};
  result.manifest = dir / "manifest.json";
  std::ofstream out(result.manifest, std::ios::trunc);
  if (!out) throw VolumeIoError(Kind::Io, result.manifest.string(), "cannot write manifest");
  out << manifest.dump(2) << '\n';
  return result;
}

}  // namespace winshift
