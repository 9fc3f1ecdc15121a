#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wmtk {

/// H x W x 3 image, channels interleaved, values expected in [0,1].
struct ImageBuffer {
  int height = 0;
  int width = 0;
  std::vector<double> px;  // size height*width*3

  ImageBuffer() = default;
  ImageBuffer(int h, int w, double fill = 0.0)
      : height(h), width(w), px(static_cast<size_t>(h) * w * 3, fill) {
    if (h < 1 || w < 1) throw std::invalid_argument("ImageBuffer: non-positive size");
  }

  double& at(int y, int x, int c) { return px[(static_cast<size_t>(y) * width + x) * 3 + c]; }
  double at(int y, int x, int c) const {
    return px[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  size_t value_count() const { return px.size(); }

  void clamp01() {
    for (auto& v : px) v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
  }
};

/// Single-channel plane used by luminance-domain processing.
struct Plane {
  int h = 0;
  int w = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(int h_, int w_, double fill = 0.0)
      : h(h_), w(w_), v(static_cast<size_t>(h_) * w_, fill) {}

  double& at(int y, int x) { return v[static_cast<size_t>(y) * w + x]; }
  double at(int y, int x) const { return v[static_cast<size_t>(y) * w + x]; }
};

inline double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// BT.601 luma weights
constexpr double kLumaR = 0.299, kLumaG = 0.587, kLumaB = 0.114;

Plane luminance(const ImageBuffer& img);

/// Adjoint of `luminance`: distribute a luma-plane gradient over RGB.
ImageBuffer luminance_adjoint(const Plane& g);

/// Separable Catmull-Rom resample to oh x ow. Samples outside the source are
/// clamped to the border. Output is NOT clamped to [0,1]; callers decide.
ImageBuffer resize_bicubic(const ImageBuffer& src, int oh, int ow);

/// Adjoint of resize_bicubic for a gradient g of shape oh x ow, scattered
/// back onto an ih x iw source grid.
ImageBuffer resize_bicubic_adjoint(const ImageBuffer& g, int ih, int iw);

Plane resize_bicubic_plane(const Plane& src, int oh, int ow);

/// Normalized 1-D Gaussian taps over [-radius, radius].
std::vector<double> gaussian_taps(int radius, double sigma);

/// Separable convolution with replicate-edge handling.
Plane separable_filter(const Plane& p, const std::vector<double>& taps);

/// Exact adjoint of separable_filter (scatter with the same tap table).
Plane separable_filter_adjoint(const Plane& g, const std::vector<double>& taps);

/// -10 log10(MSE) over all H*W*3 values; +inf when identical.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Mean local SSIM on luminance; 11x11 Gaussian window (sigma 1.5),
/// C1 = 0.01^2, C2 = 0.03^2 for unit dynamic range. Windows are evaluated
/// only where they fit entirely inside the image.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

}  // namespace wmtk
