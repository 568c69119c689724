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

#include <benchmark/benchmark.h>

#include "winshift/augmentations.hpp"
#include "winshift/intensity_stats.hpp"
#include "winshift/phantom.hpp"
#include "winshift/windowing.hpp"

using namespace winshift;

namespace {

Image2D noise_slice(std::size_t side) {
  RandomStream rng(1);
  Image2D img(side, side, 0.0);
  for (auto& p : img.pixels) p = rng.uniform(-1024, 1500);
  return img;
}

const ViewingWindow kBase = ViewingWindow::from_level_width(95, 250);
const NormalizationParams kNorm{0.46, 0.22};

void BM_ApplyWindow(benchmark::State& state) {
  const auto img = noise_slice(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(apply_window(img, kBase));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.size()));
}
BENCHMARK(BM_ApplyWindow)->Arg(128)->Arg(512);

void BM_StagedPreprocess(benchmark::State& state) {
  const auto img = noise_slice(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(z_normalize(rescale_unit(apply_window(img, kBase), kBase), kNorm));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.size()));
}
BENCHMARK(BM_StagedPreprocess)->Arg(128)->Arg(512);

void BM_FusedPreprocess(benchmark::State& state) {
  const auto img = noise_slice(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_inference(img, kBase, kNorm));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(img.size()));
}
BENCHMARK(BM_FusedPreprocess)->Arg(128)->Arg(512);

void BM_ApplyPolicy(benchmark::State& state) {
  const auto img = noise_slice(256);
  const Mask2D mask(256, 256, std::uint8_t{1});
  auto specs = state.range(0) ? nnunet_intensity_policy(0.5).specs() : std::vector<AugmentationSpec>{};
  specs.insert(specs.begin(), AugmentationSpec::make(WindowShift{40, 160}, 0.5));
  for (const auto& s : default_geometric_specs()) specs.push_back(s);
  const AugmentationPolicy policy(specs);
  std::uint64_t slice = 0;
  for (auto _ : state) {
    RandomStream rng = derive_stream(7, "bench", slice++, 0);
    benchmark::DoNotOptimize(apply_policy(img, mask, policy, kBase, kNorm, rng));
  }
}
BENCHMARK(BM_ApplyPolicy)->Arg(0)->Arg(1)->ArgNames({"nnunet"});

void BM_StatsAccumulate(benchmark::State& state) {
  PhantomSpec spec;
  spec.dims = {96, 96, 48};
  spec.tumor_radius = 8;
  const auto ph = generate_phantom(spec);
  for (auto _ : state) {
    ForegroundStats s;
    s.accumulate(ph.volume, ph.mask);
    benchmark::DoNotOptimize(s.mean());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(ph.volume.size()));
}
BENCHMARK(BM_StatsAccumulate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
