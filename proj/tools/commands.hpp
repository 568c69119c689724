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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "winshift/intensity_stats.hpp"

namespace winshift::cli {

/// Exit codes of the winshift tool.
enum ExitCode : int { kOk = 0, kConfigError = 2, kDataError = 3, kInternalError = 4 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::filesystem::path data;
  std::filesystem::path out;
  std::optional<std::filesystem::path> stats;
  std::optional<std::filesystem::path> policy;
  std::optional<std::filesystem::path> pred;
  LabelSet labels = default_foreground_labels();
  LabelSet shift_classes = default_foreground_labels();
  std::optional<double> window_level;
  std::optional<double> window_width;
  std::optional<double> p;
  std::optional<double> level_low;
  std::optional<double> level_high;
  std::uint64_t seed = 0;
  std::size_t epochs = 1;
  std::size_t threads = 1;
  double threshold_hu = 20.0;
  bool liver_only = false;
  std::uint8_t dice_label = 2;
  bool pooled_dice = false;

  /// Canonical JSON object embedded in every output manifest.
  std::string to_json() const;
};

/// Options of the `phantom` subcommand.
struct PhantomConfig {
  std::filesystem::path out;
  std::size_t n = 20;
  std::uint64_t seed = 0;
  std::optional<double> boost_const;
  double boost_min = 0.0;
  double boost_max = 100.0;
  std::vector<double> boosts;
  double noise_std = 10.0;
  double liver_hu = 60.0;
  double tumor_hu = 40.0;
  std::vector<std::size_t> dims{48, 48, 24};
};

/// Every command writes into config.out and logs progress to `log`.
void cmd_phantom(const PhantomConfig& config, std::ostream& log);
void cmd_analyze(const RunConfig& config, std::ostream& log);
void cmd_preprocess(const RunConfig& config, std::ostream& log);
void cmd_augment(const RunConfig& config, std::ostream& log);
void cmd_report(const RunConfig& config, std::ostream& log);

/// Parses arguments, dispatches and maps failures to ExitCode values.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace winshift::cli
