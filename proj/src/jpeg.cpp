#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "dct8.h"
#include "wmtk/image.hpp"
#include "wmtk/transforms.hpp"

namespace wmtk {

namespace {

using detail::dct2d;
using detail::idct2d;

// Annex K base quantization tables.
constexpr int kLumaQ[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
constexpr int kChromaQ[64] = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

// Conventional quality-factor mapping: scale percent is 5000/q below 50,
// 200-2q at or above, entries floored to >= 1.
std::array<double, 64> scaled_table(const int* base, int quality) {
  const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<double, 64> t{};
  for (int i = 0; i < 64; ++i) {
    int v = (base[i] * scale + 50) / 100;
    t[i] = static_cast<double>(std::clamp(v, 1, 255));
  }
  return t;
}

// quantize/dequantize every 8x8 block of a plane (values centered at 0)
void quantize_plane(Plane& p, const std::array<double, 64>& q) {
  double block[64], coef[64];
  for (int by = 0; by < p.h; by += 8) {
    for (int bx = 0; bx < p.w; bx += 8) {
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) block[y * 8 + x] = p.at(by + y, bx + x);
      dct2d(block, coef);
      for (int i = 0; i < 64; ++i) coef[i] = q[i] * std::nearbyint(coef[i] / q[i]);
      idct2d(coef, block);
      for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) p.at(by + y, bx + x) = block[y * 8 + x];
    }
  }
}

}  // namespace

std::array<double, 64> jpeg_quant_table(int quality, bool chroma) {
  if (quality < 1 || quality > 100) {
    throw std::invalid_argument("jpeg_quant_table: quality must lie in [1,100]");
  }
  return scaled_table(chroma ? kChromaQ : kLumaQ, quality);
}

ImageBuffer jpeg_roundtrip(const ImageBuffer& x, int quality) {
  if (quality < 1 || quality > 100) {
    throw std::invalid_argument("jpeg_roundtrip: quality must lie in [1,100]");
  }
  const int h = x.height, w = x.width;
  // pad to a multiple of 16 by edge replication so 4:2:0 macroblocks fit
  const int ph = (h + 15) / 16 * 16, pw = (w + 15) / 16 * 16;

  Plane yp(ph, pw), cb(ph, pw), cr(ph, pw);
  for (int yy = 0; yy < ph; ++yy) {
    const int sy = std::min(yy, h - 1);
    for (int xx = 0; xx < pw; ++xx) {
      const int sx = std::min(xx, w - 1);
      const double r = x.at(sy, sx, 0) * 255.0;
      const double g = x.at(sy, sx, 1) * 255.0;
      const double b = x.at(sy, sx, 2) * 255.0;
      yp.at(yy, xx) = 0.299 * r + 0.587 * g + 0.114 * b - 128.0;
      cb.at(yy, xx) = -0.168736 * r - 0.331264 * g + 0.5 * b;
      cr.at(yy, xx) = 0.5 * r - 0.418688 * g - 0.081312 * b;
    }
  }

  // 4:2:0 subsample chroma by 2x2 averaging
  Plane cb2(ph / 2, pw / 2), cr2(ph / 2, pw / 2);
  for (int yy = 0; yy < ph / 2; ++yy) {
    for (int xx = 0; xx < pw / 2; ++xx) {
      cb2.at(yy, xx) = 0.25 * (cb.at(2 * yy, 2 * xx) + cb.at(2 * yy, 2 * xx + 1) +
                               cb.at(2 * yy + 1, 2 * xx) + cb.at(2 * yy + 1, 2 * xx + 1));
      cr2.at(yy, xx) = 0.25 * (cr.at(2 * yy, 2 * xx) + cr.at(2 * yy, 2 * xx + 1) +
                               cr.at(2 * yy + 1, 2 * xx) + cr.at(2 * yy + 1, 2 * xx + 1));
    }
  }

  quantize_plane(yp, scaled_table(kLumaQ, quality));
  const auto cq = scaled_table(kChromaQ, quality);
  quantize_plane(cb2, cq);
  quantize_plane(cr2, cq);

  ImageBuffer out(h, w);
  for (int yy = 0; yy < h; ++yy) {
    for (int xx = 0; xx < w; ++xx) {
      const double Y = yp.at(yy, xx) + 128.0;
      const double Cb = cb2.at(yy / 2, xx / 2);
      const double Cr = cr2.at(yy / 2, xx / 2);
      out.at(yy, xx, 0) = clamp01((Y + 1.402 * Cr) / 255.0);
      out.at(yy, xx, 1) = clamp01((Y - 0.344136 * Cb - 0.714136 * Cr) / 255.0);
      out.at(yy, xx, 2) = clamp01((Y + 1.772 * Cb) / 255.0);
    }
  }
  return out;
}

}  // namespace wmtk
