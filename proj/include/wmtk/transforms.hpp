#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "wmtk/image.hpp"

namespace wmtk {

/// Declarative description of one image edit or a composition of them.
struct TransformSpec {
  enum class Kind {
    identity,
    crop,        // centered, sides scaled by sqrt(area_ratio)
    resize,      // sides scaled by sqrt(area_ratio), bicubic
    rotate90,
    jpeg,        // quality in [1,100]
    brightness,  // factor >= 0
    contrast,
    saturation,
    sharpness,
    text_overlay,
    combined,
  };

  Kind kind = Kind::identity;
  double value = 0.0;  // area ratio or enhancement factor
  int quality = 0;     // jpeg only
  std::vector<TransformSpec> steps;  // combined only

  static TransformSpec identity();
  static TransformSpec crop(double area_ratio);
  static TransformSpec resize(double area_ratio);
  static TransformSpec rotate90();
  static TransformSpec jpeg(int quality);
  static TransformSpec brightness(double f);
  static TransformSpec contrast(double f);
  static TransformSpec saturation(double f);
  static TransformSpec sharpness(double f);
  static TransformSpec text_overlay();
  static TransformSpec combined(std::vector<TransformSpec> steps);

  std::string name() const;

  /// Parse "crop:0.5", "jpeg:80", "brightness:1.5", "identity", "rotate90",
  /// "text"; a comma-separated chain becomes a combined transform.
  static TransformSpec parse(const std::string& text);
};

/// Apply a transform. rng_seed drives the seeded kinds (text placement);
/// a fixed seed makes the result bit-for-bit deterministic.
ImageBuffer apply_transform(const ImageBuffer& x, const TransformSpec& t, uint64_t rng_seed);

/// Degradation-equivalent JPEG channel: BT.601 YCbCr, 4:2:0 subsampling,
/// 8x8 DCT, standard tables scaled by the conventional quality mapping,
/// dequantize, reassemble. Entropy coding is omitted (it is lossless).
ImageBuffer jpeg_roundtrip(const ImageBuffer& x, int quality);

/// Per-pixel gain map clamp(a + b*localstd3x3(luma), lo, hi). Larger over
/// texture, smaller on flat background.
ImageBuffer jnd_mask(const ImageBuffer& x, double a = 0.5, double b = 8.0,
                     double lo = 0.25, double hi = 2.0);

/// The quantization table the JPEG channel uses at this quality (row-major
/// 8x8, luma or chroma base table scaled and floored to >= 1).
std::array<double, 64> jpeg_quant_table(int quality, bool chroma);

}  // namespace wmtk
