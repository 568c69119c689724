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

#include "winshift/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "winshift/windowing.hpp"

namespace winshift {

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

AugmentationPipeline::AugmentationPipeline(StatsDocument stats, AugmentationPolicy policy, std::uint64_t seed)
    : stats_(std::move(stats)), policy_(std::move(policy)), seed_(seed) {}

AugmentationPipeline AugmentationPipeline::open(const std::filesystem::path& stats_path,
                                                const std::optional<std::filesystem::path>& policy_path,
                                                std::uint64_t seed) {
  StatsDocument stats = stats_document_from_json(read_text_file(stats_path));
  AugmentationPolicy policy = policy_path ? policy_from_json(read_text_file(*policy_path), &stats)
                                          : window_shift_policy(stats.shift_policy);
  return AugmentationPipeline(std::move(stats), std::move(policy), seed);
}

AugmentedSlice AugmentationPipeline::augment_slice(const Image2D& hu, const Mask2D& mask, std::string_view source_id,
                                                   std::uint64_t slice_index, std::uint64_t epoch) const {
  RandomStream rng = derive_stream(seed_, source_id, slice_index, epoch);
  return apply_policy(hu, mask, policy_, stats_.base_window, stats_.normalization, rng);
}

Image2D AugmentationPipeline::preprocess_slice(const Image2D& hu) const {
  return preprocess_inference(hu, stats_.base_window, stats_.normalization);
}

std::string AugmentationPipeline::describe() const {
  std::ostringstream s;
  s << "AugmentationPipeline(L=" << base_window().level() << ", W=" << base_window().width()
    << ", specs=" << policy_.specs().size() << ", seed=" << seed_ << ")";
  return s.str();
}

}  // namespace winshift
