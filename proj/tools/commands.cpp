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

#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "winshift/augmentations.hpp"
#include "winshift/dataset.hpp"
#include "winshift/metrics.hpp"
#include "winshift/npy.hpp"
#include "winshift/phantom.hpp"
#include "winshift/pipeline.hpp"
#include "winshift/separation.hpp"
#include "winshift/volume_io.hpp"
#include "winshift/windowing.hpp"

namespace winshift::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir.string());
}

std::vector<DatasetEntry> require_dataset(const RunConfig& config) {
  if (config.data.empty()) throw ConfigError("--data is required");
  if (!fs::exists(config.data)) throw ConfigError("--data path does not exist: " + config.data.string());
  auto entries = list_dataset(config.data);
  if (entries.empty()) throw DataError("dataset at " + config.data.string() + " contains no volumes");
  return entries;
}

void require_out(const RunConfig& config) {
  if (config.out.empty()) throw ConfigError("--out is required");
  ensure_dir(config.out);
}

StatsDocument load_stats(const RunConfig& config) {
  if (!config.stats) throw ConfigError("--stats is required");
  if (!fs::is_regular_file(*config.stats)) throw ConfigError("stats file not found: " + config.stats->string());
  return stats_document_from_json(read_text_file(*config.stats));
}

AugmentationPolicy load_policy(const RunConfig& config, const StatsDocument& stats) {
  AugmentationPolicy policy;
  if (config.policy) {
    if (!fs::is_regular_file(*config.policy)) throw ConfigError("policy file not found: " + config.policy->string());
    policy = policy_from_json(read_text_file(*config.policy), &stats);
  } else {
    policy = window_shift_policy(stats.shift_policy);
  }
  if (!config.p) return policy;
  if (!(*config.p >= 0.0 && *config.p <= 1.0)) throw ConfigError("--p must lie in [0, 1]");
  std::vector<AugmentationSpec> specs = policy.specs();
  for (auto& s : specs) {
    if (std::holds_alternative<WindowShift>(s.op)) s.probability = *config.p;
  }
  return AugmentationPolicy(std::move(specs));
}

std::string slice_name(std::size_t z) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "z%04zu", z);
  return buf;
}

std::vector<float> to_f32(const Image2D& img) { return std::vector<float>(img.pixels.begin(), img.pixels.end()); }

json window_json(const ViewingWindow& w) {
  return {{"level", w.level()}, {"width", w.width()}, {"lower", w.lower()}, {"upper", w.upper()}};
}

LoadedVolume load_entry(const DatasetEntry& e) {
  if (!e.mask) throw DataError("volume '" + e.source_id + "' has no segmentation mask");
  LoadedVolume lv = read_volume(e.image, e.mask);
  lv.volume = lv.volume.with_source_id(e.source_id);
  return lv;
}

json labels_json(const LabelSet& s) { return json(std::vector<int>(s.begin(), s.end())); }

}  // namespace

std::string RunConfig::to_json() const {
  auto opt_path = [](const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); };
  auto opt_num = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json j = {{"data", data.string()},
            {"out", out.string()},
            {"stats", opt_path(stats)},
            {"policy", opt_path(policy)},
            {"pred", opt_path(pred)},
            {"labels", labels_json(labels)},
            {"shift_classes", labels_json(shift_classes)},
            {"window_level", opt_num(window_level)},
            {"window_width", opt_num(window_width)},
            {"p", opt_num(p)},
            {"level_low", opt_num(level_low)},
            {"level_high", opt_num(level_high)},
            {"seed", seed},
            {"epochs", epochs},
            {"threads", threads},
            {"threshold_hu", threshold_hu},
            {"liver_only", liver_only},
            {"dice_label", dice_label},
            {"pooled_dice", pooled_dice}};
  return j.dump();
}

// ---------------------------------------------------------------------------

void cmd_phantom(const PhantomConfig& config, std::ostream& log) {
  if (config.out.empty()) throw ConfigError("--out is required");
  if (config.dims.size() != 3) throw ConfigError("--dims needs three values");
  PhantomSpec base;
  base.dims = {config.dims[0], config.dims[1], config.dims[2]};
  base.noise_std = config.noise_std;
  base.liver_hu = config.liver_hu;
  base.tumor_hu = config.tumor_hu;
  base.tumor_radius = std::max(1.0, 0.2 * static_cast<double>(std::min({base.dims[0], base.dims[1], base.dims[2]})));
  TimingDistribution timing = UniformBoost{config.boost_min, config.boost_max};
  std::size_t n = config.n;
  if (!config.boosts.empty()) {
    timing = ExplicitBoosts{config.boosts};
    n = config.boosts.size();
  } else if (config.boost_const) {
    timing = ConstantBoost{*config.boost_const};
  }
  std::vector<Phantom> cohort;
  try {
    cohort = generate_cohort(n, timing, config.seed, base);
  } catch (const GeometryError& e) {
    throw ConfigError(e.what());
  }
  ensure_dir(config.out);
  const fs::path manifest = write_cohort(cohort, config.out, config.seed);
  log << "wrote " << cohort.size() << " phantoms to " << manifest.string() << '\n';
}

void cmd_analyze(const RunConfig& config, std::ostream& log) {
  if (config.p && !(*config.p >= 0.0 && *config.p <= 1.0)) throw ConfigError("--p must lie in [0, 1]");
  if (config.window_level.has_value() != config.window_width.has_value()) {
    throw ConfigError("--window-level and --window-width go together");
  }
  const auto entries = require_dataset(config);
  require_out(config);

  std::vector<std::optional<ForegroundStats>> partial(entries.size());
  std::vector<std::string> errors(entries.size());
  parallel_for(entries.size(), config.threads, [&](std::size_t i) {
    try {
      LoadedVolume lv = load_entry(entries[i]);
      ForegroundStats s;
      s.accumulate(lv.volume, *lv.mask, config.labels);
      partial[i] = std::move(s);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  ForegroundStats stats;
  std::vector<std::string> failed;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (partial[i]) {
      stats = merge(stats, *partial[i]);
    } else {
      failed.push_back(entries[i].source_id);
      log << "warning: skipping " << entries[i].source_id << ": " << errors[i] << '\n';
    }
  }
  if (failed.size() == entries.size()) throw DataError("no volume could be read");
  if (stats.empty()) throw DataError("dataset has no foreground voxels for the requested labels");
  for (const auto& w : stats.warnings()) log << "warning: " << w << '\n';

  StatsDocument doc = make_stats_document(std::move(stats), config.labels, config.shift_classes, config.p.value_or(kIntensityAugmentationProbability));
  if (config.window_level) {
    doc.base_window = ViewingWindow::from_level_width(*config.window_level, *config.window_width);
    doc.normalization = normalization_params(doc.stats, doc.base_window);
  }
  if (config.level_low) doc.shift_policy.level_low = *config.level_low;
  if (config.level_high) doc.shift_policy.level_high = *config.level_high;
  try {
    doc.shift_policy.validate();
  } catch (const WindowError& e) {
    throw ConfigError(e.what());
  }
  doc.config_json = config.to_json();
  doc.failed_volumes = failed;

  write_text(config.out / "stats.json", to_json(doc));

  std::ostringstream hist;
  hist << "hu_lower,hu_upper,count\n";
  const auto& binning = doc.stats.binning();
  const auto bins = doc.stats.histogram();
  for (std::size_t i = 0; i < bins.size(); ++i) {
    if (bins[i].count == 0) continue;
    hist << binning.bin_lower(i) << ',' << binning.bin_lower(i) + binning.bin_width << ',' << bins[i].count << '\n';
  }
  write_text(config.out / "foreground_histogram.csv", hist.str());

  std::ostringstream med;
  med.precision(17);
  med << "source_id,label,median_hu\n";
  std::map<std::pair<int, long long>, std::size_t> median_bins;
  for (const auto& m : doc.stats.per_volume_medians()) {
    med << m.source_id << ',' << int(m.label) << ',' << m.median << '\n';
    ++median_bins[{m.label, static_cast<long long>(std::floor(m.median))}];
  }
  write_text(config.out / "per_volume_medians.csv", med.str());
  std::ostringstream mh;
  mh << "label,hu_lower,hu_upper,count\n";
  for (const auto& [key, count] : median_bins) {
    mh << key.first << ',' << key.second << ',' << key.second + 1 << ',' << count << '\n';
  }
  write_text(config.out / "median_histogram.csv", mh.str());

  log << "base window L=" << doc.base_window.level() << " W=" << doc.base_window.width() << "; shift levels ["
      << doc.shift_policy.level_low << ", " << doc.shift_policy.level_high << "]\n";
}

namespace {

struct SliceJob {
  std::size_t entry = 0;
  std::size_t z = 0;
};

// Loads every volume once and lists the slices to emit.
struct LoadedDataset {
  std::vector<DatasetEntry> entries;
  std::vector<std::optional<LoadedVolume>> volumes;
  std::vector<SliceJob> jobs;
  std::vector<std::string> failed;
};

LoadedDataset load_dataset(const RunConfig& config, std::ostream& log) {
  LoadedDataset ds;
  ds.entries = require_dataset(config);
  ds.volumes.resize(ds.entries.size());
  std::vector<std::string> errors(ds.entries.size());
  parallel_for(ds.entries.size(), config.threads, [&](std::size_t i) {
    try {
      ds.volumes[i] = load_entry(ds.entries[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < ds.entries.size(); ++i) {
    if (!ds.volumes[i]) {
      ds.failed.push_back(ds.entries[i].source_id);
      log << "warning: skipping " << ds.entries[i].source_id << ": " << errors[i] << '\n';
      continue;
    }
    const auto& lv = *ds.volumes[i];
    for (std::size_t z = 0; z < lv.volume.dims()[2]; ++z) {
      if (config.liver_only && !lv.mask->slice_contains(z, kLiver)) continue;
      ds.jobs.push_back({i, z});
    }
  }
  if (ds.failed.size() == ds.entries.size()) throw DataError("no volume could be read");
  return ds;
}

json slice_entry(const LoadedDataset& ds, const SliceJob& job, const std::string& file, const std::string& mask_file) {
  const auto& lv = *ds.volumes[job.entry];
  return {{"source_id", ds.entries[job.entry].source_id},
          {"index", job.z},
          {"file", file},
          {"mask_file", mask_file},
          {"liver_present", lv.mask->slice_contains(job.z, kLiver)},
          {"tumor_present", lv.mask->slice_contains(job.z, kTumor)}};
}

}  // namespace

void cmd_preprocess(const RunConfig& config, std::ostream& log) {
  const StatsDocument stats = load_stats(config);
  require_out(config);
  const LoadedDataset ds = load_dataset(config, log);
  for (const auto& e : ds.entries) ensure_dir(config.out / e.source_id);

  std::vector<json> rows(ds.jobs.size());
  parallel_for(ds.jobs.size(), config.threads, [&](std::size_t j) {
    const SliceJob& job = ds.jobs[j];
    const auto& lv = *ds.volumes[job.entry];
    const std::string id = ds.entries[job.entry].source_id;
    const std::string file = id + "/" + slice_name(job.z) + ".npy";
    const std::string mask_file = id + "/" + slice_name(job.z) + "_mask.npy";
    const Image2D out = preprocess_inference(axial_slice_image(lv.volume, job.z), stats.base_window, stats.normalization);
    const Mask2D mask = axial_slice_mask(*lv.mask, job.z);
    npy::write_f4(config.out / file, to_f32(out), out.height, out.width);
    npy::write_u1(config.out / mask_file, mask.pixels, mask.height, mask.width);
    rows[j] = slice_entry(ds, job, file, mask_file);
    rows[j]["window"] = window_json(stats.base_window);
  });

  json manifest = {{"schema_version", 1},
                   {"kind", "winshift.preprocess"},
                   {"config", json::parse(config.to_json())},
                   {"base_window", window_json(stats.base_window)},
                   {"normalization", {{"mean", stats.normalization.mean}, {"std", stats.normalization.std}}},
                   {"failed_volumes", ds.failed},
                   {"slices", rows}};
  write_text(config.out / "manifest.json", manifest.dump(2) + "\n");
  log << "preprocessed " << rows.size() << " slices into " << config.out.string() << '\n';
}

void cmd_augment(const RunConfig& config, std::ostream& log) {
  const StatsDocument stats = load_stats(config);
  const AugmentationPolicy policy = load_policy(config, stats);
  require_out(config);
  if (config.epochs < 1) throw ConfigError("--epochs must be >= 1");

  const fs::path manifest_path = config.out / "manifest.json";
  if (fs::is_regular_file(manifest_path)) {
    try {
      const json previous = json::parse(read_text_file(manifest_path));
      if (previous.contains("seed") && previous["seed"] == config.seed) {
        log << "warning: " << manifest_path.string() << " was produced with the same seed " << config.seed
            << "; outputs will be overwritten with identical augmentations\n";
      }
    } catch (const json::exception&) {
    }
  }

  const LoadedDataset ds = load_dataset(config, log);
  const AugmentationPipeline pipeline(stats, policy, config.seed);
  std::vector<json> rows(ds.jobs.size() * config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    char dir[32];
    std::snprintf(dir, sizeof(dir), "epoch_%03zu", epoch);
    for (const auto& e : ds.entries) ensure_dir(config.out / dir / e.source_id);
    parallel_for(ds.jobs.size(), config.threads, [&](std::size_t j) {
      const SliceJob& job = ds.jobs[j];
      const auto& lv = *ds.volumes[job.entry];
      const std::string id = ds.entries[job.entry].source_id;
      const std::string file = std::string(dir) + "/" + id + "/" + slice_name(job.z) + ".npy";
      const std::string mask_file = std::string(dir) + "/" + id + "/" + slice_name(job.z) + "_mask.npy";
      const AugmentedSlice out = pipeline.augment_slice(axial_slice_image(lv.volume, job.z),
                                                        axial_slice_mask(*lv.mask, job.z), id, job.z, epoch);
      npy::write_f4(config.out / file, to_f32(out.image), out.image.height, out.image.width);
      npy::write_u1(config.out / mask_file, out.mask.pixels, out.mask.height, out.mask.width);
      json row = slice_entry(ds, job, file, mask_file);
      row["epoch"] = epoch;
      row["window"] = window_json(out.audit.window);
      row["audit"] = json::parse(audit_to_json(out.audit));
      rows[epoch * ds.jobs.size() + j] = std::move(row);
    });
  }
  json manifest = {{"schema_version", 1},
                   {"kind", "winshift.augment"},
                   {"seed", config.seed},
                   {"epochs", config.epochs},
                   {"config", json::parse(config.to_json())},
                   {"policy", json::parse(to_json(policy))},
                   {"base_window", window_json(stats.base_window)},
                   {"normalization", {{"mean", stats.normalization.mean}, {"std", stats.normalization.std}}},
                   {"failed_volumes", ds.failed},
                   {"slices", rows}};
  write_text(manifest_path, manifest.dump(2) + "\n");
  log << "augmented " << rows.size() << " slices over " << config.epochs << " epoch(s) into " << config.out.string()
      << '\n';
}

namespace {

std::optional<fs::path> find_prediction(const fs::path& dir, const std::string& id) {
  for (const std::string& stem : {id + ".seg", id}) {
    for (const char* ext : {".wsv", ".nii.gz", ".nii"}) {
      const fs::path p = dir / (stem + ext);
      if (fs::is_regular_file(p)) return p;
    }
  }
  return std::nullopt;
}

}  // namespace

void cmd_report(const RunConfig& config, std::ostream& log) {
  const auto entries = require_dataset(config);
  require_out(config);
  std::optional<StatsDocument> stats;
  if (config.stats) stats = load_stats(config);
  if (config.pred && !fs::is_directory(*config.pred)) throw ConfigError("--pred must be a directory");

  std::vector<ContrastMeasurement> measurements(entries.size());
  std::vector<std::optional<VolumeDice>> dice_rows(entries.size());
  std::vector<std::vector<SeparationRow>> separation(entries.size());
  std::vector<std::string> errors(entries.size());
  parallel_for(entries.size(), config.threads, [&](std::size_t i) {
    try {
      const LoadedVolume lv = load_entry(entries[i]);
      measurements[i] = mean_hu_difference(lv.volume, *lv.mask);
      if (config.pred) {
        const auto pred_path = find_prediction(*config.pred, entries[i].source_id);
        if (!pred_path) throw DataError("no prediction for '" + entries[i].source_id + "'");
        const SegmentationMask pred = read_mask(*pred_path);
        if (pred.dims() != lv.mask->dims()) throw DataError("prediction shape differs for '" + entries[i].source_id + "'");
        dice_rows[i] = VolumeDice{entries[i].source_id, dice(pred, *lv.mask, config.dice_label), 0.0};
      }
      if (stats && measurements[i].evaluable) {
        separation[i] = separation_rows(lv.volume, *lv.mask, stats->base_window, stats->shift_policy);
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
      measurements[i] = ContrastMeasurement{};
      measurements[i].source_id = entries[i].source_id;
      measurements[i].note = e.what();
    }
  });
  std::size_t failures = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!errors[i].empty()) {
      ++failures;
      log << "warning: " << entries[i].source_id << ": " << errors[i] << '\n';
    }
  }
  if (failures == entries.size()) throw DataError("no volume could be evaluated");

  ContrastReport contrast = identify_difficult(measurements, config.threshold_hu);
  for (const auto& w : contrast.warnings) log << "warning: " << w << '\n';
  write_text(config.out / "contrast_report.json", to_json(contrast));
  write_text(config.out / "contrast_report.csv", to_csv(contrast));

  if (config.pred) {
    std::vector<VolumeDice> rows;
    for (auto& r : dice_rows) {
      if (r) rows.push_back(std::move(*r));
    }
    const DiceReport report =
        make_dice_report(std::move(rows), config.pooled_dice ? DiceAggregation::Pooled : DiceAggregation::PerVolumeMean);
    write_text(config.out / "dice_report.json", to_json(report));
    write_text(config.out / "dice_report.csv", to_csv(report));
    log << "dice (label " << int(config.dice_label) << "): " << report.dice << '\n';
  }
  if (stats) {
    std::vector<SeparationRow> all;
    for (auto& rows : separation) all.insert(all.end(), rows.begin(), rows.end());
    write_text(config.out / "separation.csv", separation_csv(all));
  }
  log << contrast.difficult_ids().size() << " of " << contrast.per_volume.size() << " evaluable volumes are difficult (<"
      << config.threshold_hu << " HU)\n";
}

// ---------------------------------------------------------------------------

namespace {

void add_common(CLI::App& sub, RunConfig& c, std::vector<int>& labels) {
  sub.add_option("--data", c.data, "Dataset directory or cohort.json");
  sub.add_option("--out", c.out, "Output directory");
  sub.add_option("--labels", labels, "Foreground labels, e.g. 1,2")->delimiter(',');
  sub.add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
}

LabelSet to_labels(const std::vector<int>& v, const char* flag) {
  LabelSet s;
  for (int l : v) {
    if (l < 1 || l > 255) throw ConfigError(std::string(flag) + " entries must lie in [1, 255]");
    s.insert(static_cast<std::uint8_t>(l));
  }
  if (s.empty()) throw ConfigError(std::string(flag) + " must not be empty");
  return s;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"winshift: CT window-shifting preprocessing, augmentation and analysis"};
  app.set_config("--config", "", "Key-value config file; command-line flags take precedence");
  app.require_subcommand(1);

  RunConfig c;
  PhantomConfig pc;
  std::vector<int> labels{1, 2};
  std::vector<int> shift_classes{1, 2};
  double p = 0, level = 0, width = 0, lo = 0, hi = 0, boost_const = 0;
  std::string stats, policy, pred;
  int dice_label = 2;

  auto* phantom = app.add_subcommand("phantom", "Generate a synthetic phantom cohort");
  phantom->add_option("--out", pc.out, "Output directory")->required();
  phantom->add_option("--n", pc.n, "Number of phantoms");
  phantom->add_option("--seed", pc.seed, "Cohort seed");
  auto* boost_const_opt = phantom->add_option("--boost", boost_const, "Constant contrast boost (HU)");
  phantom->add_option("--boost-min", pc.boost_min, "Uniform boost lower bound (HU)");
  phantom->add_option("--boost-max", pc.boost_max, "Uniform boost upper bound (HU)");
  phantom->add_option("--boosts", pc.boosts, "Explicit per-phantom boosts (HU)")->delimiter(',');
  phantom->add_option("--noise", pc.noise_std, "Gaussian noise std (HU)");
  phantom->add_option("--liver-hu", pc.liver_hu, "Unenhanced liver HU");
  phantom->add_option("--tumor-hu", pc.tumor_hu, "Tumor HU");
  phantom->add_option("--dims", pc.dims, "Volume dims nx,ny,nz")->delimiter(',');

  auto* analyze = app.add_subcommand("analyze", "Scan a dataset and write stats.json");
  add_common(*analyze, c, labels);
  analyze->add_option("--shift-classes", shift_classes, "Classes whose per-volume medians set the shift range")
      ->delimiter(',');
  auto* level_opt = analyze->add_option("--window-level", level, "Override base window level (HU)");
  auto* width_opt = analyze->add_option("--window-width", width, "Override base window width (HU)");
  auto* lo_opt = analyze->add_option("--level-low", lo, "Override lower shift level (HU)");
  auto* hi_opt = analyze->add_option("--level-high", hi, "Override upper shift level (HU)");

  auto* preprocess = app.add_subcommand("preprocess", "Write inference-ready slices with the base window");
  add_common(*preprocess, c, labels);
  preprocess->add_flag("--liver-only", c.liver_only, "Only emit slices containing liver");

  auto* augment = app.add_subcommand("augment", "Write augmented training slices with an audit manifest");
  add_common(*augment, c, labels);
  augment->add_option("--policy", policy, "policy.json (default: window shifting from stats)");
  augment->add_option("--seed", c.seed, "Run seed");
  augment->add_option("--epochs", c.epochs, "Number of epochs")->check(CLI::PositiveNumber);
  augment->add_flag("--liver-only", c.liver_only, "Only emit slices containing liver");

  auto* report = app.add_subcommand("report", "Dice, contrast and difficult-case reports");
  add_common(*report, c, labels);
  report->add_option("--pred", pred, "Directory of predicted masks");
  report->add_option("--threshold-hu", c.threshold_hu, "Difficult-case threshold (HU)");
  report->add_option("--dice-label", dice_label, "Label scored by dice")->check(CLI::Range(1, 255));
  report->add_flag("--pooled-dice", c.pooled_dice, "Aggregate dice over pooled counts");

  CLI::Option* p_opt = nullptr;
  for (auto* sub : {analyze, augment}) {
    auto* o = sub->add_option("--p", p, "Window shift probability");
    if (sub == analyze) p_opt = o;
    else sub->callback([&, o] {
      if (o->count()) c.p = p;
    });
  }
  for (auto* sub : {preprocess, augment, report}) sub->add_option("--stats", stats, "stats.json from analyze");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    c.labels = to_labels(labels, "--labels");
    c.shift_classes = to_labels(shift_classes, "--shift-classes");
    if (!stats.empty()) c.stats = stats;
    if (!policy.empty()) c.policy = policy;
    if (!pred.empty()) c.pred = pred;
    c.dice_label = static_cast<std::uint8_t>(dice_label);
    if (p_opt->count()) c.p = p;
    if (level_opt->count()) c.window_level = level;
    if (width_opt->count()) c.window_width = width;
    if (lo_opt->count()) c.level_low = lo;
    if (hi_opt->count()) c.level_high = hi;
    if (boost_const_opt->count()) pc.boost_const = boost_const;

    if (phantom->parsed()) cmd_phantom(pc, out);
    else if (analyze->parsed()) cmd_analyze(c, out);
    else if (preprocess->parsed()) cmd_preprocess(c, out);
    else if (augment->parsed()) cmd_augment(c, out);
    else if (report->parsed()) cmd_report(c, out);
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PolicyError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const WindowError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const VolumeIoError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const StatsError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace winshift::cli
