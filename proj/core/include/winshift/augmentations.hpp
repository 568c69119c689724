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

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "winshift/image.hpp"
#include "winshift/intensity_stats.hpp"
#include "winshift/random.hpp"
#include "winshift/viewing_window.hpp"

namespace winshift {

class PolicyError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Closed parameter interval [lo, hi].
struct Range {
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Range&, const Range&) = default;
};

/// Where in the pipeline an augmentation runs. Values are in execution order.
enum class Phase { Preprocessing = 0, PreNormalization = 1, PostNormalization = 2, Geometric = 3 };

std::string_view to_string(Phase phase);

struct AdditiveBrightness { Range alpha; };
struct MultiplicativeBrightness { Range beta; };
struct Contrast { Range beta; };
struct Gamma { Range gamma; };
struct GammaInverse { Range gamma; };
/// Level range for window shifting; the gate probability lives on the spec.
struct WindowShift { double level_low = 0.0; double level_high = 0.0; };
struct Flip { bool x = true; bool y = false; };
/// Side length of the crop as a fraction of the slice, per axis.
struct CropResize { Range scale; };

using AugmentationOp = std::variant<AdditiveBrightness, MultiplicativeBrightness, Contrast, Gamma, GammaInverse,
                                    WindowShift, Flip, CropResize>;

/// Phase in which an op must run.
Phase phase_of(const AugmentationOp& op);
std::string_view kind_name(const AugmentationOp& op);

struct AugmentationSpec {
  AugmentationOp op;
  double probability = 0.0;
  Phase phase = Phase::PreNormalization;

  /// Spec whose phase follows from the op.
  static AugmentationSpec make(AugmentationOp op, double probability);
  void validate() const;
};

/// Ordered, validated list of augmentations.
class AugmentationPolicy {
 public:
  AugmentationPolicy() = default;
  explicit AugmentationPolicy(std::vector<AugmentationSpec> specs);

  const std::vector<AugmentationSpec>& specs() const { return specs_; }
  bool empty() const { return specs_.empty(); }
  /// The window shift spec as a sampling policy, if the policy has one.
  std::optional<WindowShiftPolicy> window_shift() const;

 private:
  std::vector<AugmentationSpec> specs_;
};

// Default strengths of the nnU-Net intensity augmentations.
inline constexpr Range kNnUnetBrightnessRange{0.7, 1.3};
inline constexpr Range kNnUnetContrastRange{0.65, 1.5};
inline constexpr Range kNnUnetGammaRange{0.7, 1.5};
inline constexpr double kNnUnetProbability = 0.15;
inline constexpr double kIntensityAugmentationProbability = 0.3;
inline constexpr double kFlipProbability = 0.5;
inline constexpr double kCropResizeProbability = 0.2;
inline constexpr Range kDefaultCropScale{0.8, 1.0};

/// Gamma, inverse gamma, multiplicative brightness and contrast, each with
/// probability `p`, in phase order.
AugmentationPolicy nnunet_intensity_policy(double p = kNnUnetProbability);
/// Single window shift spec built from derived bounds.
AugmentationPolicy window_shift_policy(const WindowShiftPolicy& shift);
/// Crop-and-resize then flip, as used for every compared scheme.
std::vector<AugmentationSpec> default_geometric_specs();

/// Additive brightness range that moves unit-scaled pixels by the same
/// amounts as recentring the base window anywhere in [level_low, level_high]:
/// a level shift of d HU moves a pixel by -d / W.
Range equivalent_additive_brightness_range(const WindowShiftPolicy& shift, const ViewingWindow& base);

// Pixel operations. The unit-scaled ones expect [0, 1] input.

Image2D additive_brightness(const Image2D& unit, double alpha);
Image2D multiplicative_brightness(const Image2D& z, double beta);
/// Scales by beta, then clips back into the input's own [min, max].
Image2D contrast(const Image2D& z, double beta);
/// x^gamma; throws StageError for pixels outside [0, 1].
Image2D gamma(const Image2D& unit, double g);
/// 1 - (1 - x)^gamma; throws StageError for pixels outside [0, 1].
Image2D gamma_inverse(const Image2D& unit, double g);

enum class Axis { X, Y };

/// Mirrors image and mask along `axis`.
void flip_in_place(Image2D& image, Mask2D& mask, Axis axis);

/// Axis-aligned crop in pixel units.
struct CropBox {
  std::size_t x0 = 0, y0 = 0, width = 0, height = 0;
};

/// Crops `box` and resizes back to the input shape: bilinear for the image,
/// nearest neighbour for the mask.
std::pair<Image2D, Mask2D> crop_resize(const Image2D& image, const Mask2D& mask, const CropBox& box);
/// Crop box for a side-length fraction and two uniforms placing it.
CropBox make_crop_box(std::size_t width, std::size_t height, double scale, double u_x, double u_y);

/// One executed (or skipped) spec in the audit trail.
struct AppliedOp {
  std::string kind;
  bool applied = false;
  std::map<std::string, double> params;
};

struct AugmentationAudit {
  ViewingWindow window = ViewingWindow::from_bounds(0.0, 1.0);
  bool window_shifted = false;
  std::vector<AppliedOp> ops;
};

struct AugmentedSlice {
  Image2D image;
  Mask2D mask;
  AugmentationAudit audit;
};

/// Runs the policy on one HU slice: window (shifted or base) and rescale,
/// pre-normalization ops, z-normalization with `norm`, post-normalization
/// ops, geometric ops. Every spec draws a fixed number of values from `rng`
/// whether or not its gate fires.
AugmentedSlice apply_policy(const Image2D& hu, const Mask2D& mask, const AugmentationPolicy& policy,
                            const ViewingWindow& base, const NormalizationParams& norm, RandomStream& rng);

/// Re-executes an audit record without randomness.
AugmentedSlice replay_audit(const Image2D& hu, const Mask2D& mask, const AugmentationAudit& audit,
                            const NormalizationParams& norm);

inline constexpr int kPolicySchemaVersion = 1;

std::string to_json(const AugmentationPolicy& policy);
/// Parses policy.json. Window shift specs without explicit levels, and
/// additive brightness specs marked `"equivalent_to_window_shift": true`,
/// are resolved against `stats` (required in that case).
AugmentationPolicy policy_from_json(const std::string& text, const StatsDocument* stats = nullptr);

}  // namespace winshift

namespace winshift {

/// Compact JSON object for manifests: window bounds plus every op.
std::string audit_to_json(const AugmentationAudit& audit);
AugmentationAudit audit_from_json(const std::string& text);

}  // namespace winshift
