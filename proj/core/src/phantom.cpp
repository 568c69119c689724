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

#include "winshift/phantom.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "winshift/random.hpp"
#include "winshift/volume_io.hpp"

namespace winshift {

Phantom generate_phantom(const PhantomSpec& spec) {
  if (!(spec.noise_std >= 0.0)) throw GeometryError("phantom noise_std must be >= 0");
  if (!(spec.tumor_radius > 0.0)) throw GeometryError("phantom tumor_radius must be > 0");
  for (std::size_t d : spec.dims) {
    if (d < 1) throw GeometryError("phantom dims must be >= 1");
  }
  const auto [nx, ny, nz] = spec.dims;
  std::array<double, 3> centre{}, semi{}, tumor{};
  for (int a = 0; a < 3; ++a) {
    centre[a] = 0.5 * static_cast<double>(spec.dims[a]) - 0.5;
    semi[a] = spec.liver_extent[a] * static_cast<double>(spec.dims[a]);
    if (!(semi[a] > 0.0)) throw GeometryError("phantom liver extent must be > 0");
    tumor[a] = centre[a] + spec.tumor_offset[a];
  }

  const auto liver_value = static_cast<float>(spec.liver_hu + spec.contrast_boost);
  const auto tumor_value = static_cast<float>(spec.tumor_hu);
  const auto background_value = static_cast<float>(spec.background_hu);

  std::vector<std::uint8_t> labels(voxel_count(spec.dims), kBackground);
  std::vector<float> voxels(labels.size(), background_value);
  PhantomTruth truth;
  std::size_t i = 0;
  for (std::size_t z = 0; z < nz; ++z) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t x = 0; x < nx; ++x, ++i) {
        const double p[3] = {static_cast<double>(x), static_cast<double>(y), static_cast<double>(z)};
        double e = 0.0, r2 = 0.0;
        for (int a = 0; a < 3; ++a) {
          const double u = (p[a] - centre[a]) / semi[a];
          e += u * u;
          r2 += (p[a] - tumor[a]) * (p[a] - tumor[a]);
        }
        const bool in_liver = e <= 1.0;
        const bool in_tumor = r2 <= spec.tumor_radius * spec.tumor_radius;
        if (in_tumor && !in_liver) {
          throw GeometryError("phantom tumor extends outside the liver ellipsoid");
        }
        if (in_tumor) {
          labels[i] = kTumor;
          voxels[i] = tumor_value;
          ++truth.n_tumor;
        } else if (in_liver) {
          labels[i] = kLiver;
          voxels[i] = liver_value;
          ++truth.n_liver;
        }
      }
    }
  }
  if (truth.n_tumor == 0) throw GeometryError("phantom tumor covers no voxel centre");
  if (truth.n_liver == 0) throw GeometryError("phantom has no healthy liver voxels");

  if (spec.noise_std > 0.0) {
    RandomStream rng(splitmix64(spec.seed ^ 0x70A27C0DEULL));
    for (float& v : voxels) v = static_cast<float>(static_cast<double>(v) + spec.noise_std * rng.normal());
  }
  truth.mean_liver_hu = liver_value;
  truth.mean_tumor_hu = tumor_value;
  truth.abs_diff_hu = std::fabs(truth.mean_liver_hu - truth.mean_tumor_hu);

  return Phantom{spec, HuVolume(spec.dims, spec.spacing, std::move(voxels), spec.source_id),
                 SegmentationMask(spec.dims, std::move(labels)), truth};
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::vector<Phantom> generate_cohort(std::size_t n, const TimingDistribution& timing, std::uint64_t seed,
                                     const PhantomSpec& base) {
  if (n < 1) throw GeometryError("cohort needs at least one phantom");
  if (const auto* e = std::get_if<ExplicitBoosts>(&timing); e && e->boosts.size() != n) {
    throw GeometryError("explicit boost list has " + std::to_string(e->boosts.size()) + " entries for " +
                        std::to_string(n) + " phantoms");
  }
  RandomStream rng(splitmix64(seed));
  std::vector<Phantom> cohort;
  cohort.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    PhantomSpec spec = base;
    spec.contrast_boost = std::visit(
        overloaded{[](const ConstantBoost& c) { return c.boost; },
                   [&](const UniformBoost& b) {
                     return b.lo + (static_cast<double>(i) + u) / static_cast<double>(n) * (b.hi - b.lo);
                   },
                   [&](const ExplicitBoosts& e) { return e.boosts[i]; }},
        timing);
    spec.seed = splitmix64(seed ^ (0x5EED0000ULL + i));
    char id[32];
    std::snprintf(id, sizeof(id), "phantom_%03zu", i);
    spec.source_id = id;
    cohort.push_back(generate_phantom(spec));
  }
  return cohort;
}

std::filesystem::path write_cohort(const std::vector<Phantom>& cohort, const std::filesystem::path& dir,
                                   std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  nlohmann::json volumes = nlohmann::json::array();
  for (const Phantom& p : cohort) {
    const std::string id = p.volume.source_id();
    write_volume(p.volume, dir / (id + ".wsv"));
    write_mask(p.mask, dir / (id + ".seg.wsv"));
    volumes.push_back({{"source_id", id},
                       {"image", id + ".wsv"},
                       {"mask", id + ".seg.wsv"},
                       {"contrast_boost", p.spec.contrast_boost},
                       {"noise_std", p.spec.noise_std},
                       {"mean_liver_hu", p.truth.mean_liver_hu},
                       {"mean_tumor_hu", p.truth.mean_tumor_hu},
                       {"abs_diff_hu", p.truth.abs_diff_hu}});
  }
  nlohmann::json manifest = {{"schema_version", 1}, {"kind", "winshift.cohort"}, {"seed", seed}, {"volumes", volumes}};
  const auto path = dir / "cohort.json";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw VolumeIoError(VolumeIoError::Kind::Io, path.string(), "cannot write cohort manifest");
  out << manifest.dump(2) << '\n';
  return path;
}

}  // namespace winshift
