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

#include "winshift/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>

#include "winshift/volume_io.hpp"

namespace winshift {

namespace fs = std::filesystem;

namespace {

bool is_volume_file(const fs::path& p) {
  const std::string name = p.filename().string();
  return name.ends_with(".wsv") || name.ends_with(".nii") || name.ends_with(".nii.gz");
}

std::optional<fs::path> find_mask(const fs::path& dir, const std::string& id) {
  std::vector<std::string> candidates = {id + ".seg"};
  if (id.starts_with("volume-")) candidates.push_back("segmentation-" + id.substr(7));
  for (const auto& stem : candidates) {
    for (const char* ext : {".wsv", ".nii.gz", ".nii"}) {
      fs::path p = dir / (stem + ext);
      if (fs::is_regular_file(p)) return p;
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<DatasetEntry> list_dataset(const fs::path& data) {
  std::vector<DatasetEntry> out;
  if (fs::is_regular_file(data)) {
    std::ifstream in(data);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw VolumeIoError(VolumeIoError::Kind::InvalidData, data.string(), std::string("bad cohort manifest: ") + e.what());
    }
    if (!j.contains("volumes") || !j["volumes"].is_array()) {
      throw VolumeIoError(VolumeIoError::Kind::InvalidData, "volumes", "cohort manifest has no 'volumes' array");
    }
    const fs::path base = data.parent_path();
    for (const auto& v : j["volumes"]) {
      DatasetEntry e{v.at("source_id").get<std::string>(), base / v.at("image").get<std::string>(), std::nullopt};
      if (v.contains("mask")) e.mask = base / v["mask"].get<std::string>();
      out.push_back(std::move(e));
    }
  } else if (fs::is_directory(data)) {
    for (const auto& entry : fs::directory_iterator(data)) {
      if (!entry.is_regular_file() || !is_volume_file(entry.path())) continue;
      const std::string id = source_id_from_path(entry.path());
      if (id.ends_with(".seg") || id.starts_with("segmentation-")) continue;
      out.push_back({id, entry.path(), find_mask(data, id)});
    }
  } else {
    throw VolumeIoError(VolumeIoError::Kind::Io, data.string(), "dataset path does not exist");
  }
  std::sort(out.begin(), out.end(), [](const DatasetEntry& a, const DatasetEntry& b) { return a.source_id < b.source_id; });
  return out;
}

}  // namespace winshift
