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

#include "winshift/augmentations.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "winshift/windowing.hpp"

namespace winshift {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_range(const Range& r, const char* what) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || r.lo > r.hi) {
    throw PolicyError(std::string(what) + " range must be a finite interval with lo <= hi");
  }
}

void check_unit(const Image2D& x, const char* op) {
  for (double p : x.pixels) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw StageError(std::string(op) + ": expects unit-scaled input in [0, 1], got " + std::to_string(p));
    }
  }
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Preprocessing: return "preprocessing";
    case Phase::PreNormalization: return "pre_normalization";
    case Phase::PostNormalization: return "post_normalization";
    case Phase::Geometric: return "geometric";
  }
  return "unknown";
}

Phase phase_of(const AugmentationOp& op) {
  return std::visit(overloaded{[](const WindowShift&) { return Phase::Preprocessing; },
                               [](const AdditiveBrightness&) { return Phase::PreNormalization; },
                               [](const Gamma&) { return Phase::PreNormalization; },
                               [](const GammaInverse&) { return Phase::PreNormalization; },
                               [](const MultiplicativeBrightness&) { return Phase::PostNormalization; },
                               [](const Contrast&) { return Phase::PostNormalization; },
                               [](const Flip&) { return Phase::Geometric; },
                               [](const CropResize&) { return Phase::Geometric; }},
                    op);
}

std::string_view kind_name(const AugmentationOp& op) {
  return std::visit(overloaded{[](const WindowShift&) { return "window_shift"; },
                               [](const AdditiveBrightness&) { return "additive_brightness"; },
                               [](const Gamma&) { return "gamma"; },
                               [](const GammaInverse&) { return "gamma_inverse"; },
                               [](const MultiplicativeBrightness&) { return "multiplicative_brightness"; },
                               [](const Contrast&) { return "contrast"; },
                               [](const Flip&) { return "flip"; },
                               [](const CropResize&) { return "crop_resize"; }},
                    op);
}

AugmentationSpec AugmentationSpec::make(AugmentationOp op, double probability) {
  AugmentationSpec spec{std::move(op), probability, Phase::PreNormalization};
  spec.phase = phase_of(spec.op);
  spec.validate();
  return spec;
}

void AugmentationSpec::validate() const {
  if (!(probability >= 0.0 && probability <= 1.0)) throw PolicyError("augmentation probability must lie in [0, 1]");
  if (phase != phase_of(op)) {
    throw PolicyError(std::string(kind_name(op)) + " must run in phase " + std::string(to_string(phase_of(op))));
  }
  std::visit(overloaded{[](const WindowShift& w) {
                          WindowShiftPolicy{w.level_low, w.level_high, 0.0}.validate();
                        },
                        [](const AdditiveBrightness& a) { check_range(a.alpha, "alpha"); },
                        [](const MultiplicativeBrightness& m) { check_range(m.beta, "beta"); },
                        [](const Contrast& c) { check_range(c.beta, "beta"); },
                        [](const Gamma& g) {
                          check_range(g.gamma, "gamma");
                          if (!(g.gamma.lo > 0.0)) throw PolicyError("gamma range must be > 0");
                        },
                        [](const GammaInverse& g) {
                          check_range(g.gamma, "gamma");
                          if (!(g.gamma.lo > 0.0)) throw PolicyError("gamma range must be > 0");
                        },
                        [](const Flip&) {},
                        [](const CropResize& c) {
                          check_range(c.scale, "crop scale");
                          if (!(c.scale.lo > 0.0 && c.scale.hi <= 1.0)) {
                            throw PolicyError("crop scale range must lie in (0, 1]");
                          }
                        }},
             op);
}

AugmentationPolicy::AugmentationPolicy(std::vector<AugmentationSpec> specs) : specs_(std::move(specs)) {
  int shifts = 0;
  bool additive_seen = false;
  Phase last = Phase::Preprocessing;
  for (const AugmentationSpec& s : specs_) {
    s.validate();
    if (s.phase < last) {
      throw PolicyError("phase order violated: " + std::string(kind_name(s.op)) + " (" +
                        std::string(to_string(s.phase)) + ") listed after a " + std::string(to_string(last)) + " op");
    }
    last = s.phase;
    if (std::holds_alternative<WindowShift>(s.op) && ++shifts > 1) {
      throw PolicyError("a policy may contain at most one window_shift");
    }
    if (std::holds_alternative<AdditiveBrightness>(s.op)) additive_seen = true;
    if (additive_seen && (std::holds_alternative<Gamma>(s.op) || std::holds_alternative<GammaInverse>(s.op))) {
      throw PolicyError("gamma ops need [0, 1] input and cannot follow additive_brightness");
    }
  }
}

std::optional<WindowShiftPolicy> AugmentationPolicy::window_shift() const {
  for (const AugmentationSpec& s : specs_) {
    if (const auto* w = std::get_if<WindowShift>(&s.op)) return WindowShiftPolicy{w->level_low, w->level_high, s.probability};
  }
  return std::nullopt;
}

AugmentationPolicy nnunet_intensity_policy(double p) {
  return AugmentationPolicy({AugmentationSpec::make(Gamma{kNnUnetGammaRange}, p),
                             AugmentationSpec::make(GammaInverse{kNnUnetGammaRange}, p),
                             AugmentationSpec::make(MultiplicativeBrightness{kNnUnetBrightnessRange}, p),
                             AugmentationSpec::make(Contrast{kNnUnetContrastRange}, p)});
}

AugmentationPolicy window_shift_policy(const WindowShiftPolicy& shift) {
  shift.validate();
  return AugmentationPolicy({AugmentationSpec::make(WindowShift{shift.level_low, shift.level_high}, shift.probability)});
}

std::vector<AugmentationSpec> default_geometric_specs() {
  return {AugmentationSpec::make(CropResize{kDefaultCropScale}, kCropResizeProbability),
          AugmentationSpec::make(Flip{true, false}, kFlipProbability)};
}

Range equivalent_additive_brightness_range(const WindowShiftPolicy& shift, const ViewingWindow& base) {
  shift.validate();
  const double w = base.width();
  const double level = base.level();
  return {(level - shift.level_high) / w, (level - shift.level_low) / w};
}

// ---------------------------------------------------------------------------
// Pixel operations

Image2D additive_brightness(const Image2D& unit, double alpha) {
  Image2D out = unit;
  for (double& p : out.pixels) p += alpha;
  return out;
}

Image2D multiplicative_brightness(const Image2D& z, double beta) {
  Image2D out = z;
  for (double& p : out.pixels) p *= beta;
  return out;
}

Image2D contrast(const Image2D& z, double beta) {
  Image2D out = z;
  if (out.pixels.empty()) return out;
  const auto [mn, mx] = std::minmax_element(z.pixels.begin(), z.pixels.end());
  const double lo = *mn;
  const double hi = *mx;
  for (double& p : out.pixels) p = std::clamp(p * beta, lo, hi);
  return out;
}

Image2D gamma(const Image2D& unit, double g) {
  if (!(g > 0.0)) throw StageError("gamma must be > 0");
  check_unit(unit, "gamma");
  Image2D out = unit;
  for (double& p : out.pixels) p = std::pow(p, g);
  return out;
}

Image2D gamma_inverse(const Image2D& unit, double g) {
  if (!(g > 0.0)) throw StageError("gamma must be > 0");
  check_unit(unit, "gamma_inverse");
  Image2D out = unit;
  for (double& p : out.pixels) p = 1.0 - std::pow(1.0 - p, g);
  return out;
}

void flip_in_place(Image2D& image, Mask2D& mask, Axis axis) {
  if (image.width != mask.width || image.height != mask.height) throw StageError("flip: image and mask shapes differ");
  const std::size_t w = image.width;
  const std::size_t h = image.height;
  if (axis == Axis::X) {
    for (std::size_t y = 0; y < h; ++y) {
      std::reverse(image.pixels.begin() + static_cast<std::ptrdiff_t>(y * w),
                   image.pixels.begin() + static_cast<std::ptrdiff_t>((y + 1) * w));
      std::reverse(mask.pixels.begin() + static_cast<std::ptrdiff_t>(y * w),
                   mask.pixels.begin() + static_cast<std::ptrdiff_t>((y + 1) * w));
    }
  } else {
    for (std::size_t y = 0; y < h / 2; ++y) {
      std::swap_ranges(image.pixels.begin() + static_cast<std::ptrdiff_t>(y * w),
                       image.pixels.begin() + static_cast<std::ptrdiff_t>((y + 1) * w),
                       image.pixels.begin() + static_cast<std::ptrdiff_t>((h - 1 - y) * w));
      std::swap_ranges(mask.pixels.begin() + static_cast<std::ptrdiff_t>(y * w),
                       mask.pixels.begin() + static_cast<std::ptrdiff_t>((y + 1) * w),
                       mask.pixels.begin() + static_cast<std::ptrdiff_t>((h - 1 - y) * w));
    }
  }
}

CropBox make_crop_box(std::size_t width, std::size_t height, double scale, double u_x, double u_y) {
  const double cw = scale * static_cast<double>(width);
  const double ch = scale * static_cast<double>(height);
  if (!(cw >= 1.0) || !(ch >= 1.0)) throw StageError("crop_resize: crop would be smaller than one pixel");
  CropBox box;
  box.width = std::min(width, static_cast<std::size_t>(std::lround(cw)));
  box.height = std::min(height, static_cast<std::size_t>(std::lround(ch)));
  const std::size_t slack_x = width - box.width;
  const std::size_t slack_y = height - box.height;
  box.x0 = std::min(slack_x, static_cast<std::size_t>(u_x * static_cast<double>(slack_x + 1)));
  box.y0 = std::min(slack_y, static_cast<std::size_t>(u_y * static_cast<double>(slack_y + 1)));
  return box;
}

std::pair<Image2D, Mask2D> crop_resize(const Image2D& image, const Mask2D& mask, const CropBox& box) {
  if (image.width != mask.width || image.height != mask.height) {
    throw StageError("crop_resize: image and mask shapes differ");
  }
  if (box.width < 1 || box.height < 1) throw StageError("crop_resize: crop would be smaller than one pixel");
  if (box.x0 + box.width > image.width || box.y0 + box.height > image.height) {
    throw StageError("crop_resize: crop box exceeds the slice");
  }
  const std::size_t w = image.width;
  const std::size_t h = image.height;
  const double sx = static_cast<double>(box.width) / static_cast<double>(w);
  const double sy = static_cast<double>(box.height) / static_cast<double>(h);
  const double x_lo = static_cast<double>(box.x0);
  const double x_hi = static_cast<double>(box.x0 + box.width - 1);
  const double y_lo = static_cast<double>(box.y0);
  const double y_hi = static_cast<double>(box.y0 + box.height - 1);

  Image2D out_img(w, h, 0.0);
  Mask2D out_mask(w, h, std::uint8_t{0});
  for (std::size_t y = 0; y < h; ++y) {
    const double src_y = std::clamp(y_lo + (static_cast<double>(y) + 0.5) * sy - 0.5, y_lo, y_hi);
    const auto y0 = static_cast<std::size_t>(std::floor(src_y));
    const std::size_t y1 = std::min(y0 + 1, box.y0 + box.height - 1);
    const double ty = src_y - static_cast<double>(y0);
    const auto yn = static_cast<std::size_t>(std::clamp(std::floor(src_y + 0.5), y_lo, y_hi));
    for (std::size_t x = 0; x < w; ++x) {
      const double src_x = std::clamp(x_lo + (static_cast<double>(x) + 0.5) * sx - 0.5, x_lo, x_hi);
      const auto x0 = static_cast<std::size_t>(std::floor(src_x));
      const std::size_t x1 = std::min(x0 + 1, box.x0 + box.width - 1);
      const double tx = src_x - static_cast<double>(x0);
      const double top = image.at(x0, y0) + tx * (image.at(x1, y0) - image.at(x0, y0));
      const double bottom = image.at(x0, y1) + tx * (image.at(x1, y1) - image.at(x0, y1));
      out_img.at(x, y) = top + ty * (bottom - top);
      const auto xn = static_cast<std::size_t>(std::clamp(std::floor(src_x + 0.5), x_lo, x_hi));
      out_mask.at(x, y) = mask.at(xn, yn);
    }
  }
  return {std::move(out_img), std::move(out_mask)};
}

// ---------------------------------------------------------------------------
// Policy execution

namespace {

// Applies one intensity op with a known parameter.
void run_intensity(const AugmentationOp& op, double param, Image2D& x) {
  std::visit(overloaded{[&](const AdditiveBrightness&) { x = additive_brightness(x, param); },
                        [&](const MultiplicativeBrightness&) { x = multiplicative_brightness(x, param); },
                        [&](const Contrast&) { x = contrast(x, param); },
                        [&](const Gamma&) { x = gamma(x, param); },
                        [&](const GammaInverse&) { x = gamma_inverse(x, param); },
                        [](const auto&) {}},
             op);
}

Range param_range(const AugmentationOp& op) {
  return std::visit(overloaded{[](const AdditiveBrightness& a) { return a.alpha; },
                               [](const MultiplicativeBrightness& m) { return m.beta; },
                               [](const Contrast& c) { return c.beta; },
                               [](const Gamma& g) { return g.gamma; },
                               [](const GammaInverse& g) { return g.gamma; },
                               [](const auto&) { return Range{}; }},
                    op);
}

const char* param_name(const AugmentationOp& op) {
  return std::visit(overloaded{[](const AdditiveBrightness&) { return "alpha"; },
                               [](const MultiplicativeBrightness&) { return "beta"; },
                               [](const Contrast&) { return "beta"; },
                               [](const Gamma&) { return "gamma"; },
                               [](const GammaInverse&) { return "gamma"; },
                               [](const auto&) { return ""; }},
                    op);
}

Image2D window_to_unit(const Image2D& hu, const ViewingWindow& w) {
  Image2D out = hu;
  for (double& p : out.pixels) p = unit_pixel(clip_pixel(p, w), w);
  return out;
}

void run_geometric(const AppliedOp& rec, Image2D& image, Mask2D& mask) {
  if (!rec.applied) return;
  if (rec.kind == "flip") {
    if (rec.params.at("x") != 0.0) flip_in_place(image, mask, Axis::X);
    if (rec.params.at("y") != 0.0) flip_in_place(image, mask, Axis::Y);
  } else if (rec.kind == "crop_resize") {
    CropBox box{static_cast<std::size_t>(rec.params.at("x0")), static_cast<std::size_t>(rec.params.at("y0")),
                static_cast<std::size_t>(rec.params.at("width")), static_cast<std::size_t>(rec.params.at("height"))};
    auto [img, m] = crop_resize(image, mask, box);
    image = std::move(img);
    mask = std::move(m);
  }
}

}  // namespace

AugmentedSlice apply_policy(const Image2D& hu, const Mask2D& mask, const AugmentationPolicy& policy,
                            const ViewingWindow& base, const NormalizationParams& norm, RandomStream& rng) {
  if (hu.width != mask.width || hu.height != mask.height) throw StageError("apply_policy: image and mask shapes differ");
  if (!(norm.std > 0.0)) throw StageError("apply_policy: std must be > 0");

  AugmentedSlice out{Image2D{}, mask, AugmentationAudit{base, false, {}}};
  const auto& specs = policy.specs();
  std::size_t i = 0;

  // (1) window selection
  for (; i < specs.size() && specs[i].phase == Phase::Preprocessing; ++i) {
    const auto& ws = std::get<WindowShift>(specs[i].op);
    const ViewingWindow w = sample_window_level({ws.level_low, ws.level_high, specs[i].probability}, base, rng);
    out.audit.window = w;
    out.audit.window_shifted = !(w == base);
    out.audit.ops.push_back({"window_shift", out.audit.window_shifted, {{"level", w.level()}, {"width", w.width()}}});
  }
  out.image = window_to_unit(hu, out.audit.window);

  // (2)-(4) intensity ops around z-normalization
  bool normalized = false;
  for (; i < specs.size() && specs[i].phase != Phase::Geometric; ++i) {
    const AugmentationSpec& s = specs[i];
    if (s.phase == Phase::PostNormalization && !normalized) {
      for (double& p : out.image.pixels) p = z_pixel(p, norm);
      normalized = true;
    }
    const double gate = rng.uniform();
    const Range r = param_range(s.op);
    const double param = rng.uniform(r.lo, r.hi);
    const bool fire = gate < s.probability;
    if (fire) run_intensity(s.op, param, out.image);
    out.audit.ops.push_back({std::string(kind_name(s.op)), fire, {{param_name(s.op), param}}});
  }
  if (!normalized) {
    for (double& p : out.image.pixels) p = z_pixel(p, norm);
  }

  // (5) geometric ops
  for (; i < specs.size(); ++i) {
    const AugmentationSpec& s = specs[i];
    AppliedOp rec{std::string(kind_name(s.op)), false, {}};
    if (const auto* f = std::get_if<Flip>(&s.op)) {
      const bool fx = rng.uniform() < s.probability && f->x;
      const bool fy = rng.uniform() < s.probability && f->y;
      rec.applied = fx || fy;
      rec.params = {{"x", fx ? 1.0 : 0.0}, {"y", fy ? 1.0 : 0.0}};
    } else {
      const auto& c = std::get<CropResize>(s.op);
      const double gate = rng.uniform();
      const double scale = rng.uniform(c.scale.lo, c.scale.hi);
      const double ux = rng.uniform();
      const double uy = rng.uniform();
      rec.applied = gate < s.probability;
      rec.params = {{"scale", scale}};
      if (rec.applied) {
        const CropBox box = make_crop_box(out.image.width, out.image.height, scale, ux, uy);
        rec.params["x0"] = static_cast<double>(box.x0);
        rec.params["y0"] = static_cast<double>(box.y0);
        rec.params["width"] = static_cast<double>(box.width);
        rec.params["height"] = static_cast<double>(box.height);
      }
    }
    run_geometric(rec, out.image, out.mask);
    out.audit.ops.push_back(std::move(rec));
  }
  return out;
}

AugmentedSlice replay_audit(const Image2D& hu, const Mask2D& mask, const AugmentationAudit& audit,
                            const NormalizationParams& norm) {
  if (!(norm.std > 0.0)) throw StageError("replay_audit: std must be > 0");
  AugmentedSlice out{window_to_unit(hu, audit.window), mask, audit};
  bool normalized = false;
  auto normalize = [&] {
    if (normalized) return;
    for (double& p : out.image.pixels) p = z_pixel(p, norm);
    normalized = true;
  };
  for (const AppliedOp& rec : audit.ops) {
    if (rec.kind == "window_shift") continue;
    if (rec.kind == "flip" || rec.kind == "crop_resize") {
      normalize();
      run_geometric(rec, out.image, out.mask);
      continue;
    }
    const bool post = rec.kind == "multiplicative_brightness" || rec.kind == "contrast";
    if (post) normalize();
    if (!rec.applied) continue;
    if (rec.kind == "additive_brightness") out.image = additive_brightness(out.image, rec.params.at("alpha"));
    else if (rec.kind == "gamma") out.image = gamma(out.image, rec.params.at("gamma"));
    else if (rec.kind == "gamma_inverse") out.image = gamma_inverse(out.image, rec.params.at("gamma"));
    else if (rec.kind == "multiplicative_brightness") out.image = multiplicative_brightness(out.image, rec.params.at("beta"));
    else if (rec.kind == "contrast") out.image = contrast(out.image, rec.params.at("beta"));
    else throw PolicyError("replay: unknown op '" + rec.kind + "'");
  }
  normalize();
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json range_json(const Range& r) { return {{"min", r.lo}, {"max", r.hi}}; }

[[noreturn]] void policy_field_error(std::size_t index, const std::string& field, const std::string& what) {
  throw PolicyError("policy.json: augmentations[" + std::to_string(index) + "]." + field + " " + what);
}

Range range_from(const json& params, std::size_t index) {
  if (!params.contains("min") || !params.contains("max") || !params["min"].is_number() || !params["max"].is_number()) {
    policy_field_error(index, "params", "needs numeric 'min' and 'max'");
  }
  return {params["min"].get<double>(), params["max"].get<double>()};
}

}  // namespace

std::string to_json(const AugmentationPolicy& policy) {
  json list = json::array();
  for (const AugmentationSpec& s : policy.specs()) {
    json params = std::visit(
        overloaded{[](const WindowShift& w) { return json{{"level_low", w.level_low}, {"level_high", w.level_high}}; },
                   [](const AdditiveBrightness& a) { return range_json(a.alpha); },
                   [](const MultiplicativeBrightness& m) { return range_json(m.beta); },
                   [](const Contrast& c) { return range_json(c.beta); },
                   [](const Gamma& g) { return range_json(g.gamma); },
                   [](const GammaInverse& g) { return range_json(g.gamma); },
                   [](const Flip& f) {
                     json axes = json::array();
                     if (f.x) axes.push_back("x");
                     if (f.y) axes.push_back("y");
                     return json{{"axes", axes}};
                   },
                   [](const CropResize& c) { return range_json(c.scale); }},
        s.op);
    list.push_back({{"kind", kind_name(s.op)}, {"params", params}, {"probability", s.probability},
                    {"phase", to_string(s.phase)}});
  }
  json j = {{"schema_version", kPolicySchemaVersion}, {"kind", "winshift.policy"}, {"augmentations", list}};
  return j.dump(2) + "\n";
}

AugmentationPolicy policy_from_json(const std::string& text, const StatsDocument* stats) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw PolicyError(std::string("policy.json: not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema_version") || !j["schema_version"].is_number_integer()) {
    throw PolicyError("policy.json: field 'schema_version' is missing");
  }
  if (j["schema_version"].get<int>() != kPolicySchemaVersion) {
    throw PolicyError("policy.json: field 'schema_version' is " + j["schema_version"].dump() + ", expected " +
                      std::to_string(kPolicySchemaVersion));
  }
  if (!j.contains("augmentations") || !j["augmentations"].is_array()) {
    throw PolicyError("policy.json: field 'augmentations' must be an array");
  }
  std::vector<AugmentationSpec> specs;
  std::size_t index = 0;
  for (const json& a : j["augmentations"]) {
    if (!a.contains("kind") || !a["kind"].is_string()) policy_field_error(index, "kind", "is missing");
    const std::string kind = a["kind"];
    const json params = a.value("params", json::object());
    double p = 0.0;
    if (a.contains("probability")) {
      if (!a["probability"].is_number()) policy_field_error(index, "probability", "must be a number");
      p = a["probability"].get<double>();
    } else if (kind == "window_shift" && stats != nullptr) {
      p = stats->shift_policy.probability;
    } else {
      policy_field_error(index, "probability", "is missing");
    }

    AugmentationOp op;
    if (kind == "window_shift") {
      if (params.contains("level_low") && params.contains("level_high")) {
        op = WindowShift{params["level_low"].get<double>(), params["level_high"].get<double>()};
      } else if (stats != nullptr) {
        op = WindowShift{stats->shift_policy.level_low, stats->shift_policy.level_high};
      } else {
        policy_field_error(index, "params", "needs level_low/level_high or a stats document");
      }
    } else if (kind == "additive_brightness") {
      if (params.value("equivalent_to_window_shift", false)) {
        if (stats == nullptr) policy_field_error(index, "params", "equivalent_to_window_shift needs a stats document");
        op = AdditiveBrightness{equivalent_additive_brightness_range(stats->shift_policy, stats->base_window)};
      } else {
        op = AdditiveBrightness{range_from(params, index)};
      }
    } else if (kind == "multiplicative_brightness") {
      op = MultiplicativeBrightness{range_from(params, index)};
    } else if (kind == "contrast") {
      op = Contrast{range_from(params, index)};
    } else if (kind == "gamma") {
      op = Gamma{range_from(params, index)};
    } else if (kind == "gamma_inverse") {
      op = GammaInverse{range_from(params, index)};
    } else if (kind == "flip") {
      Flip f{false, false};
      for (const json& axis : params.value("axes", json::array({"x"}))) {
        if (axis == "x") f.x = true;
        else if (axis == "y") f.y = true;
        else policy_field_error(index, "params.axes", "entries must be \"x\" or \"y\"");
      }
      op = f;
    } else if (kind == "crop_resize") {
      op = CropResize{range_from(params, index)};
    } else {
      policy_field_error(index, "kind", "'" + kind + "' is not a known augmentation");
    }
    AugmentationSpec spec{op, p, phase_of(op)};
    if (a.contains("phase") && a["phase"] != to_string(spec.phase)) {
      policy_field_error(index, "phase", "must be \"" + std::string(to_string(spec.phase)) + "\" for " + kind);
    }
    try {
      spec.validate();
    } catch (const PolicyError& e) {
      policy_field_error(index, "params", e.what());
    }
    specs.push_back(std::move(spec));
    ++index;
  }
  return AugmentationPolicy(std::move(specs));
}

std::string audit_to_json(const AugmentationAudit& audit) {
  json ops = json::array();
  for (const AppliedOp& op : audit.ops) ops.push_back({{"kind", op.kind}, {"applied", op.applied}, {"params", op.params}});
  json j = {{"window", {{"level", audit.window.level()}, {"width", audit.window.width()},
                        {"lower", audit.window.lower()}, {"upper", audit.window.upper()}}},
            {"window_shifted", audit.window_shifted},
            {"ops", ops}};
  return j.dump();
}

AugmentationAudit audit_from_json(const std::string& text) {
  const json j = json::parse(text);
  const json& w = j.at("window");
  AugmentationAudit audit{ViewingWindow::from_bounds(w.at("lower").get<double>(), w.at("upper").get<double>()),
                          j.at("window_shifted").get<bool>(), {}};
  for (const json& op : j.at("ops")) {
    audit.ops.push_back({op.at("kind").get<std::string>(), op.at("applied").get<bool>(),
                         op.at("params").get<std::map<std::string, double>>()});
  }
  return audit;
}

}  // namespace winshift
