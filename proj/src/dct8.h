#pragma once

#include <cmath>

// Orthonormal 8-point DCT-II helpers shared by the JPEG channel and the
// DCT-DWT codec.

namespace wmtk::detail {

struct Dct8 {
  double m[8][8];
  Dct8() {
    constexpr double pi = 3.14159265358979323846;
    for (int u = 0; u < 8; ++u) {
      const double cu = u == 0 ? std::sqrt(0.125) : 0.5;
      for (int x = 0; x < 8; ++x) m[u][x] = cu * std::cos((2 * x + 1) * u * pi / 16.0);
    }
  }
};

inline const Dct8& dct8_basis() {
  static const Dct8 basis;
  return basis;
}

inline void dct2d(const double in[64], double out[64]) {
  const Dct8& kDct = dct8_basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y)
    for (int u = 0; u < 8; ++u) {
      double acc = 0.0;
      for (int x = 0; x < 8; ++x) acc += kDct.m[u][x] * in[y * 8 + x];
      tmp[y * 8 + u] = acc;
    }
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      double acc = 0.0;
      for (int y = 0; y < 8; ++y) acc += kDct.m[v][y] * tmp[y * 8 + u];
      out[v * 8 + u] = acc;
    }
}

inline void idct2d(const double in[64], double out[64]) {
  const Dct8& kDct = dct8_basis();
  double tmp[64];
  for (int u = 0; u < 8; ++u)
    for (int y = 0; y < 8; ++y) {
      double acc = 0.0;
      for (int v = 0; v < 8; ++v) acc += kDct.m[v][y] * in[v * 8 + u];
      tmp[y * 8 + u] = acc;
    }
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      double acc = 0.0;
      for (int u = 0; u < 8; ++u) acc += kDct.m[u][x] * tmp[y * 8 + u];
      out[y * 8 + x] = acc;
    }
}

}  // namespace wmtk::detail
