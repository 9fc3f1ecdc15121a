#include "wmtk/synth.hpp"

#include <algorithm>
#include <cmath>

#include "wmtk/rng.hpp"

namespace wmtk {

namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Smoothly interpolated random grid ("value noise") with the given cell size.
Plane value_noise(int h, int w, int cell, Rng& rng) {
  const int gh = h / cell + 2, gw = w / cell + 2;
  std::vector<double> grid(static_cast<size_t>(gh) * gw);
  for (auto& g : grid) g = rng.next_double() * 2.0 - 1.0;

  Plane p(h, w);
  for (int y = 0; y < h; ++y) {
    const double fy = static_cast<double>(y) / cell;
    const int iy = static_cast<int>(fy);
    const double ty = smoothstep(fy - iy);
    for (int x = 0; x < w; ++x) {
      const double fx = static_cast<double>(x) / cell;
      const int ix = static_cast<int>(fx);
      const double tx = smoothstep(fx - ix);
      const double* row0 = &grid[static_cast<size_t>(iy) * gw + ix];
      const double* row1 = row0 + gw;
      const double a = row0[0] + (row0[1] - row0[0]) * tx;
      const double b = row1[0] + (row1[1] - row1[0]) * tx;
      p.at(y, x) = a + (b - a) * ty;
    }
  }
  return p;
}

}  // namespace

ImageBuffer synthetic_image(int h, int w, uint64_t seed) {
  Rng rng(mix_seed(seed, 0x51c0));
  const int base_cell = std::max(8, std::min(h, w) / 8);

  // luminance structure: a few octaves, roughly 1/f amplitudes
  Plane lum(h, w);
  double amp = 0.32;
  for (int cell = base_cell; cell >= 4; cell /= 2) {
    const Plane n = value_noise(h, w, cell, rng);
    for (size_t i = 0; i < lum.v.size(); ++i) lum.v[i] += amp * n.v[i];
    amp *= 0.55;
  }

  // fine texture confined to a seeded soft half of the image
  {
    const Plane tex = value_noise(h, w, 2, rng);
    const Plane region = value_noise(h, w, std::max(16, base_cell * 2), rng);
    for (size_t i = 0; i < lum.v.size(); ++i) {
      const double m = std::clamp(0.5 + 2.0 * region.v[i], 0.0, 1.0);
      lum.v[i] += 0.05 * m * tex.v[i];
    }
  }

  // color ramp between two random anchors, driven by its own low-pass field
  double c0[3], c1[3];
  for (int c = 0; c < 3; ++c) {
    c0[c] = 0.18 + 0.5 * rng.next_double();
    c1[c] = 0.18 + 0.5 * rng.next_double();
  }
  const Plane ramp = value_noise(h, w, base_cell * 2, rng);

  ImageBuffer img(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = std::clamp(0.5 + 0.9 * ramp.at(y, x), 0.0, 1.0);
      for (int c = 0; c < 3; ++c) {
        img.at(y, x, c) = c0[c] + (c1[c] - c0[c]) * t + lum.at(y, x);
      }
    }
  }

  // soft elliptical blobs with their own tint
  const int n_blobs = 3 + static_cast<int>(rng.next_below(4));
  for (int bi = 0; bi < n_blobs; ++bi) {
    const double cy = rng.next_double() * h, cx = rng.next_double() * w;
    const double ry = (0.08 + 0.2 * rng.next_double()) * h;
    const double rx = (0.08 + 0.2 * rng.next_double()) * w;
    double tint[3];
    for (double& t : tint) t = (rng.next_double() - 0.5) * 0.5;
    const int y0 = std::max(0, static_cast<int>(cy - ry)), y1 = std::min(h, static_cast<int>(cy + ry) + 1);
    const int x0 = std::max(0, static_cast<int>(cx - rx)), x1 = std::min(w, static_cast<int>(cx + rx) + 1);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const double dy = (y - cy) / ry, dx = (x - cx) / rx;
        const double d2 = dy * dy + dx * dx;
        if (d2 >= 1.0) continue;
        const double fall = smoothstep(1.0 - d2);
        for (int c = 0; c < 3; ++c) img.at(y, x, c) += fall * tint[c];
      }
    }
  }

  // pull the luminance mean toward 0.4 and keep headroom for enhancement
  // transforms; soft-knee compression instead of hard clipping
  double mean = 0.0;
  for (double v : img.px) mean += v;
  mean /= static_cast<double>(img.px.size());
  const double shift = 0.40 - mean;
  for (auto& v : img.px) {
    double u = v + shift;
    u = 0.5 + 0.42 * std::tanh((u - 0.5) / 0.42);
    v = clamp01(u);
  }
  return img;
}

std::vector<ImageBuffer> synthetic_corpus(int n, int h, int w, uint64_t seed) {
  std::vector<ImageBuffer> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(synthetic_image(h, w, mix_seed(seed, i)));
  return out;
}

}  // namespace wmtk
