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

#include "winshift/intensity_stats.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

namespace winshift {

using nlohmann::json;

std::size_t HistogramBinning::index_of(double hu) const {
  const double pos = std::floor((hu - origin) / bin_width);
  if (pos < 0.0) return 0;
  if (pos >= static_cast<double>(bins)) return bins - 1;
  return static_cast<std::size_t>(pos);
}

ForegroundStats::ForegroundStats(HistogramBinning binning) : binning_(binning), bins_(binning.bins) {
  if (binning_.bins == 0 || !(binning_.bin_width > 0.0) || !std::isfinite(binning_.origin)) {
    throw StatsError("histogram binning needs at least one bin of positive width");
  }
}

double ForegroundStats::stddev() const {
  return count_ == 0 ? 0.0 : std::sqrt(std::max(0.0, m2_ / static_cast<double>(count_)));
}

void ForegroundStats::add_moments(std::uint64_t n, double mean, double m2) {
  if (n == 0) return;
  if (count_ == 0) {
    count_ = n;
    mean_ = mean;
    m2_ = m2;
    return;
  }
  // Written symmetrically in the two operands so that merge commutes exactly.
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(n);
  const double total = na + nb;
  const double delta = mean - mean_;
  mean_ = (na * mean_ + nb * mean) / total;
  m2_ = (m2_ + m2) + delta * delta * (na * nb / total);
  count_ += n;
}

void ForegroundStats::add_median(VolumeMedian m) {
  auto key_less = [](const VolumeMedian& a, const VolumeMedian& b) {
    return std::tie(a.source_id, a.label) < std::tie(b.source_id, b.label);
  };
  auto it = std::lower_bound(medians_.begin(), medians_.end(), m, key_less);
  if (it != medians_.end() && it->source_id == m.source_id && it->label == m.label) {
    throw StatsError("duplicate per-volume median for source '" + m.source_id + "' label " +
                     std::to_string(m.label));
  }
  medians_.insert(it, std::move(m));
}

void ForegroundStats::add_volume(const std::string& source_id) {
  auto it = std::lower_bound(volumes_.begin(), volumes_.end(), source_id);
  if (it != volumes_.end() && *it == source_id) {
    throw StatsError("volume '" + source_id + "' accumulated twice");
  }
  volumes_.insert(it, source_id);
}

void ForegroundStats::accumulate(const HuVolume& vol, const SegmentationMask& mask, const LabelSet& foreground_labels) {
  if (vol.dims() != mask.dims()) throw StatsError("accumulate: mask dims differ from volume '" + vol.source_id() + "'");
  add_volume(vol.source_id());

  const auto voxels = vol.voxels();
  const auto labels = mask.labels();
  std::map<std::uint8_t, std::vector<float>> per_class;
  for (std::uint8_t label : foreground_labels) per_class[label];

  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    auto cls = per_class.find(labels[i]);
    if (cls == per_class.end()) continue;
    const double v = voxels[i];
    cls->second.push_back(voxels[i]);

    HistogramBin& bin = bins_[binning_.index_of(v)];
    if (bin.count == 0) {
      bin.min = v;
      bin.max = v;
    } else {
      bin.min = std::min(bin.min, v);
      bin.max = std::max(bin.max, v);
    }
    ++bin.count;
    bin.sum += v;
    bin.sum_sq += v * v;

    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  if (n == 0) {
    warnings_.push_back("volume '" + vol.source_id() + "' has no foreground voxels");
    return;
  }
  add_moments(n, mean, m2);

  for (auto& [label, values] : per_class) {
    if (values.empty()) continue;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double median = values[mid];
    if (values.size() % 2 == 0) {
      const float below = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
      median = 0.5 * (static_cast<double>(below) + median);
    }
    add_median({vol.source_id(), label, median});
  }
}

ForegroundStats merge(const ForegroundStats& a, const ForegroundStats& b) {
  if (!(a.binning_ == b.binning_)) throw StatsError("merge: histogram binning mismatch");
  ForegroundStats out = a;
  for (std::size_t i = 0; i < out.bins_.size(); ++i) {
    const HistogramBin& src = b.bins_[i];
    if (src.count == 0) continue;
    HistogramBin& dst = out.bins_[i];
    if (dst.count == 0) {
      dst = src;
      continue;
    }
    dst.count += src.count;
    dst.sum += src.sum;
    dst.sum_sq += src.sum_sq;
    dst.min = std::min(dst.min, src.min);
    dst.max = std::max(dst.max, src.max);
  }
  out.add_moments(b.count_, b.mean_, b.m2_);
  for (const auto& v : b.volumes_) out.add_volume(v);
  for (const auto& m : b.medians_) out.add_median(m);
  out.warnings_.insert(out.warnings_.end(), b.warnings_.begin(), b.warnings_.end());
  std::sort(out.warnings_.begin(), out.warnings_.end());
  return out;
}

double percentile(const ForegroundStats& stats, double q) {
  if (stats.empty()) throw StatsError("percentile of empty statistics");
  if (!(q >= 0.0 && q <= 1.0)) throw StatsError("percentile fraction must lie in [0, 1]");
  const double target = q * static_cast<double>(stats.n_foreground());
  double cumulative = 0.0;
  for (const HistogramBin& bin : stats.histogram()) {
    if (bin.count == 0) continue;
    const double c = static_cast<double>(bin.count);
    if (cumulative + c >= target) {
      const double frac = std::clamp((target - cumulative) / c, 0.0, 1.0);
      return std::min(bin.max, bin.min + frac * (bin.max - bin.min));
    }
    cumulative += c;
  }
  // Unreachable when counts are consistent; q == 1 lands in the last bin.
  throw StatsError("percentile: histogram counts inconsistent with n_foreground");
}

double sample_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw StatsError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw StatsError("quantile fraction must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

ViewingWindow derive_base_window(const ForegroundStats& stats) {
  const double lower = percentile(stats, kBaseWindowLowerQuantile);
  const double upper = percentile(stats, kBaseWindowUpperQuantile);
  if (!(upper > lower)) {
    throw StatsError("degenerate foreground distribution: base window would have zero width");
  }
  return ViewingWindow::from_bounds(lower, upper);
}

WindowShiftPolicy derive_shift_bounds(const ForegroundStats& stats, const LabelSet& classes, double probability) {
  std::vector<double> pooled;
  LabelSet present;
  for (const VolumeMedian& m : stats.per_volume_medians()) {
    if (classes.contains(m.label)) {
      pooled.push_back(m.median);
      present.insert(m.label);
    }
  }
  for (std::uint8_t c : classes) {
    if (!present.contains(c)) throw StatsError("no per-volume medians for class " + std::to_string(c));
  }
  if (pooled.size() < 2) {
    throw StatsError("need at least 2 per-volume medians to derive shift bounds, have " + std::to_string(pooled.size()));
  }
  std::sort(pooled.begin(), pooled.end());
  WindowShiftPolicy policy{sample_quantile(pooled, kBaseWindowLowerQuantile),
                           sample_quantile(pooled, kBaseWindowUpperQuantile), probability};
  policy.validate();
  return policy;
}

NormalizationParams normalization_params(const ForegroundStats& stats, const ViewingWindow& window) {
  if (stats.empty()) throw StatsError("normalization parameters of empty statistics");
  const double lo = window.lower();
  const double hi = window.upper();
  const double w = window.width();

  // Each bin becomes up to three weighted pieces in unit space: the part
  // clipped to 0, the part clipped to 1 and the part inside the window,
  // assuming values spread uniformly between the bin extrema when a bin
  // straddles a window bound.
  struct Piece {
    double weight, mean, var;
  };
  std::vector<Piece> pieces;
  for (const HistogramBin& bin : stats.histogram()) {
    if (bin.count == 0) continue;
    const double c = static_cast<double>(bin.count);
    if (bin.max <= lo) {
      pieces.push_back({c, 0.0, 0.0});
    } else if (bin.min >= hi) {
      pieces.push_back({c, 1.0, 0.0});
    } else if (bin.min >= lo && bin.max <= hi) {
      const double m = bin.sum / c;
      const double var = bin.max == bin.min ? 0.0 : std::max(0.0, bin.sum_sq / c - m * m);
      pieces.push_back({c, (m - lo) / w, var / (w * w)});
    } else {
      const double span = bin.max - bin.min;
      const double below = std::clamp((lo - bin.min) / span, 0.0, 1.0);
      const double above = std::clamp((bin.max - hi) / span, 0.0, 1.0);
      const double inside = std::max(0.0, 1.0 - below - above);
      if (below > 0.0) pieces.push_back({c * below, 0.0, 0.0});
      if (above > 0.0) pieces.push_back({c * above, 1.0, 0.0});
      if (inside > 0.0) {
        const double a = std::max(bin.min, lo);
        const double b = std::min(bin.max, hi);
        const double len = (b - a) / w;
        pieces.push_back({c * inside, (0.5 * (a + b) - lo) / w, len * len / 12.0});
      }
    }
  }
  double total = 0.0;
  double sum = 0.0;
  for (const Piece& p : pieces) {
    total += p.weight;
    sum += p.weight * p.mean;
  }
  const double mean = sum / total;
  double ss = 0.0;
  for (const Piece& p : pieces) ss += p.weight * ((p.mean - mean) * (p.mean - mean) + p.var);
  const double sd = std::sqrt(ss / total);
  if (!(sd > 0.0)) throw StatsError("foreground has zero spread inside the window; cannot z-normalize");
  return {mean, sd};
}

StatsDocument make_stats_document(ForegroundStats stats, const LabelSet& foreground_labels,
                                  const LabelSet& shift_classes, double shift_probability) {
  const ViewingWindow base = derive_base_window(stats);
  const WindowShiftPolicy policy = derive_shift_bounds(stats, shift_classes, shift_probability);
  const NormalizationParams norm = normalization_params(stats, base);
  StatsDocument doc{std::move(stats)};
  doc.foreground_labels = foreground_labels;
  doc.shift_classes = shift_classes;
  doc.base_window = base;
  doc.shift_policy = policy;
  doc.normalization = norm;
  return doc;
}

// ---------------------------------------------------------------------------
// JSON

class StatsSerializer {
 public:
  static json write(const ForegroundStats& s) {
    json hist = json::array();
    for (std::size_t i = 0; i < s.bins_.size(); ++i) {
      const HistogramBin& b = s.bins_[i];
      if (b.count == 0) continue;
      hist.push_back({i, b.count, b.sum, b.sum_sq, b.min, b.max});
    }
    json medians = json::array();
    for (const auto& m : s.medians_) {
      medians.push_back({{"source_id", m.source_id}, {"label", m.label}, {"median", m.median}});
    }
    return {{"binning", {{"origin", s.binning_.origin}, {"bin_width", s.binning_.bin_width}, {"bins", s.binning_.bins}}},
            {"histogram", std::move(hist)},
            {"n_foreground", s.count_},
            {"mean", s.mean_},
            {"m2", s.m2_},
            {"std", s.stddev()},
            {"per_volume_medians", std::move(medians)},
            {"volumes", s.volumes_},
            {"warnings", s.warnings_}};
  }

  static ForegroundStats read(const json& j);
};

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw StatsError("stats.json: field '" + field + "' " + what);
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) field_error(path + key, "is missing");
  return j.at(key);
}

template <typename T>
T get(const json& j, const std::string& key, const std::string& path = "") {
  const json& v = require(j, key, path);
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    field_error(path + key, "has the wrong type");
  }
}

double get_number(const json& j, const std::string& key, const std::string& path = "") {
  const json& v = require(j, key, path);
  if (!v.is_number()) field_error(path + key, "must be a number");
  return v.get<double>();
}

json window_json(const ViewingWindow& w) {
  return {{"level", w.level()}, {"width", w.width()}, {"lower", w.lower()}, {"upper", w.upper()}};
}

ViewingWindow window_from_json(const json& j, const std::string& path) {
  try {
    if (j.contains("lower") && j.contains("upper")) {
      return ViewingWindow::from_bounds(get_number(j, "lower", path), get_number(j, "upper", path));
    }
    return ViewingWindow::from_level_width(get_number(j, "level", path), get_number(j, "width", path));
  } catch (const WindowError& e) {
    field_error(path.substr(0, path.size() - 1), std::string("is invalid: ") + e.what());
  }
}

}  // namespace

ForegroundStats StatsSerializer::read(const json& j) {
  const json& bj = require(j, "binning", "");
  HistogramBinning binning{get_number(bj, "origin", "binning."), get_number(bj, "bin_width", "binning."),
                           get<std::size_t>(bj, "bins", "binning.")};
  ForegroundStats s(binning);
  const json& hist = require(j, "histogram", "");
  if (!hist.is_array()) field_error("histogram", "must be an array");
  std::uint64_t total = 0;
  for (const json& row : hist) {
    if (!row.is_array() || row.size() != 6) field_error("histogram", "rows must be [index, count, sum, sum_sq, min, max]");
    const auto i = row[0].get<std::size_t>();
    if (i >= binning.bins) field_error("histogram", "bin index out of range");
    HistogramBin& b = s.bins_[i];
    b.count = row[1].get<std::uint64_t>();
    b.sum = row[2].get<double>();
    b.sum_sq = row[3].get<double>();
    b.min = row[4].get<double>();
    b.max = row[5].get<double>();
    total += b.count;
  }
  s.count_ = get<std::uint64_t>(j, "n_foreground");
  if (s.count_ != total) field_error("n_foreground", "does not equal the histogram total");
  s.mean_ = get_number(j, "mean");
  s.m2_ = get_number(j, "m2");
  if (s.m2_ < 0.0) field_error("m2", "must be non-negative");
  for (const json& m : require(j, "per_volume_medians", "")) {
    s.add_median({get<std::string>(m, "source_id", "per_volume_medians."),
                  get<std::uint8_t>(m, "label", "per_volume_medians."),
                  get_number(m, "median", "per_volume_medians.")});
  }
  for (const auto& v : get<std::vector<std::string>>(j, "volumes")) s.add_volume(v);
  s.warnings_ = get<std::vector<std::string>>(j, "warnings");
  return s;
}

std::string to_json(const StatsDocument& doc) {
  json j = {{"schema_version", kStatsSchemaVersion}, {"kind", "winshift.stats"}};
  j["config"] = json::parse(doc.config_json);
  j["foreground_labels"] = doc.foreground_labels;
  j["shift_classes"] = doc.shift_classes;
  j.update(StatsSerializer::write(doc.stats));
  if (!doc.stats.empty()) {
    j["percentiles"] = {{"0.005", percentile(doc.stats, 0.005)},
                        {"0.5", percentile(doc.stats, 0.5)},
                        {"0.995", percentile(doc.stats, 0.995)}};
  }
  j["failed_volumes"] = doc.failed_volumes;
  j["base_window"] = window_json(doc.base_window);
  j["shift_policy"] = {{"level_low", doc.shift_policy.level_low},
                       {"level_high", doc.shift_policy.level_high},
                       {"probability", doc.shift_policy.probability}};
  j["normalization"] = {{"mean", doc.normalization.mean}, {"std", doc.normalization.std}};
  return j.dump(2) + "\n";
}

StatsDocument stats_document_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw StatsError(std::string("stats.json: not valid JSON: ") + e.what());
  }
  const int version = get<int>(j, "schema_version");
  if (version != kStatsSchemaVersion) {
    field_error("schema_version", "is " + std::to_string(version) + ", expected " + std::to_string(kStatsSchemaVersion));
  }
  StatsDocument doc{StatsSerializer::read(j)};
  doc.foreground_labels = get<LabelSet>(j, "foreground_labels");
  doc.shift_classes = get<LabelSet>(j, "shift_classes");
  doc.base_window = window_from_json(require(j, "base_window", ""), "base_window.");
  const json& sp = require(j, "shift_policy", "");
  doc.shift_policy = {get_number(sp, "level_low", "shift_policy."), get_number(sp, "level_high", "shift_policy."),
                      get_number(sp, "probability", "shift_policy.")};
  try {
    doc.shift_policy.validate();
  } catch (const WindowError& e) {
    field_error("shift_policy", std::string("is invalid: ") + e.what());
  }
  const json& nj = require(j, "normalization", "");
  doc.normalization = {get_number(nj, "mean", "normalization."), get_number(nj, "std", "normalization.")};
  if (!(doc.normalization.std > 0.0)) field_error("normalization.std", "must be > 0");
  doc.config_json = j.contains("config") ? j["config"].dump() : "{}";
  if (j.contains("failed_volumes")) doc.failed_volumes = get<std::vector<std::string>>(j, "failed_volumes");
  return doc;
}

}  // namespace winshift
