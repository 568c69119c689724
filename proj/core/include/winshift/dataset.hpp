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
#include <string>
#include <vector>

namespace winshift {

struct DatasetEntry {
  std::string source_id;
  std::filesystem::path image;
  std::optional<std::filesystem::path> mask;
};

/// Lists a dataset given either a cohort.json manifest or a directory.
/// In a directory every .wsv/.nii/.nii.gz file is an image unless its name
/// ends in .seg.<ext>; the mask of <id>.<ext> is <id>.seg.<any ext>, and
/// LiTS-style volume-N / segmentation-N pairs are matched as well.
/// Entries are sorted by source_id.
std::vector<DatasetEntry> list_dataset(const std::filesystem::path& data);

}  // namespace winshift
