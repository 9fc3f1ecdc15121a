#include "wmtk/image.hpp"

#include <algorithm>
#include <limits>

namespace wmtk {

Plane luminance(const ImageBuffer& img) {
  Plane p(img.height, img.width);
  const double* src = img.px.data();
  for (size_t i = 0; i < p.v.size(); ++i) {
    p.v[i] = kLumaR * src[i * 3] + kLumaG * src[i * 3 + 1] + kLumaB * src[i * 3 + 2];
  }
  return p;
}

ImageBuffer luminance_adjoint(const Plane& g) {
  ImageBuffer out(g.h, g.w);
  for (size_t i = 0; i < g.v.size(); ++i) {
    out.px[i * 3] = kLumaR * g.v[i];
    out.px[i * 3 + 1] = kLumaG * g.v[i];
    out.px[i * 3 + 2] = kLumaB * g.v[i];
  }
  return out;
}

namespace {

// Catmull-Rom kernel
double cubic_weight(double t) {
  t = std::fabs(t);
  if (t < 1.0) return 1.5 * t * t * t - 2.5 * t * t + 1.0;
  if (t < 2.0) return -0.5 * t * t * t + 2.5 * t * t - 4.0 * t + 2.0;
  return 0.0;
}

struct Tap {
  int idx[4];
  double w[4];
};

// For each output coordinate, the 4 clamped source taps and weights.
std::vector<Tap> make_taps(int out_n, int in_n) {
  std::vector<Tap> taps(out_n);
  const double scale = static_cast<double>(in_n) / out_n;
  for (int o = 0; o < out_n; ++o) {
    const double src = (o + 0.5) * scale - 0.5;
    const int base = static_cast<int>(std::floor(src));
    const double frac = src - base;
    for (int t = 0; t < 4; ++t) {
      const int j = base - 1 + t;
      taps[o].idx[t] = std::clamp(j, 0, in_n - 1);
      taps[o].w[t] = cubic_weight(frac - (t - 1));
    }
  }
  return taps;
}

}  // namespace

ImageBuffer resize_bicubic(const ImageBuffer& src, int oh, int ow) {
  if (oh < 1 || ow < 1) throw std::invalid_argument("resize_bicubic: non-positive target");
  const auto hx = make_taps(ow, src.width);
  const auto hy = make_taps(oh, src.height);

  // horizontal pass
  ImageBuffer mid(src.height, ow);
  for (int y = 0; y < src.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      const Tap& t = hx[x];
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = 0; i < 4; ++i) acc += t.w[i] * src.at(y, t.idx[i], c);
        mid.at(y, x, c) = acc;
      }
    }
  }
  // vertical pass
  ImageBuffer out(oh, ow);
  for (int y = 0; y < oh; ++y) {
    const Tap& t = hy[y];
    for (int x = 0; x < ow; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int i = 0; i < 4; ++i) acc += t.w[i] * mid.at(t.idx[i], x, c);
        out.at(y, x, c) = acc;
      }
    }
  }
  return out;
}

ImageBuffer resize_bicubic_adjoint(const ImageBuffer& g, int ih, int iw) {
  const auto hx = make_taps(g.width, iw);
  const auto hy = make_taps(g.height, ih);

  // adjoint of vertical pass: scatter rows
  ImageBuffer mid(ih, g.width);
  for (int y = 0; y < g.height; ++y) {
    const Tap& t = hy[y];
    for (int x = 0; x < g.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = g.at(y, x, c);
        for (int i = 0; i < 4; ++i) mid.at(t.idx[i], x, c) += t.w[i] * v;
      }
    }
  }
  // adjoint of horizontal pass
  ImageBuffer out(ih, iw);
  for (int y = 0; y < ih; ++y) {
    for (int x = 0; x < g.width; ++x) {
      const Tap& t = hx[x];
      for (int c = 0; c < 3; ++c) {
        const double v = mid.at(y, x, c);
        for (int i = 0; i < 4; ++i) out.at(y, t.idx[i], c) += t.w[i] * v;
      }
    }
  }
  return out;
}

Plane resize_bicubic_plane(const Plane& src, int oh, int ow) {
  if (oh < 1 || ow < 1) throw std::invalid_argument("resize_bicubic_plane: non-positive target");
  const auto hx = make_taps(ow, src.w);
  const auto hy = make_taps(oh, src.h);
  Plane mid(src.h, ow);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < ow; ++x) {
      const Tap& t = hx[x];
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) acc += t.w[i] * src.at(y, t.idx[i]);
      mid.at(y, x) = acc;
    }
  }
  Plane out(oh, ow);
  for (int y = 0; y < oh; ++y) {
    const Tap& t = hy[y];
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int i = 0; i < 4; ++i) acc += t.w[i] * mid.at(t.idx[i], x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

std::vector<double> gaussian_taps(int radius, double sigma) {
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    taps[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += taps[i + radius];
  }
  for (auto& t : taps) t /= sum;
  return taps;
}

Plane separable_filter(const Plane& p, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  Plane mid(p.h, p.w), out(p.h, p.w);
  for (int y = 0; y < p.h; ++y) {
    for (int x = 0; x < p.w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += taps[i + r] * p.at(y, std::clamp(x + i, 0, p.w - 1));
      mid.at(y, x) = acc;
    }
  }
  for (int y = 0; y < p.h; ++y) {
    for (int x = 0; x < p.w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += taps[i + r] * mid.at(std::clamp(y + i, 0, p.h - 1), x);
      out.at(y, x) = acc;
    }
  }
  return out;
}

Plane separable_filter_adjoint(const Plane& g, const std::vector<double>& taps) {
  const int r = static_cast<int>(taps.size()) / 2;
  Plane mid(g.h, g.w), out(g.h, g.w);
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      const double v = g.at(y, x);
      for (int i = -r; i <= r; ++i) mid.at(std::clamp(y + i, 0, g.h - 1), x) += taps[i + r] * v;
    }
  }
  for (int y = 0; y < g.h; ++y) {
    for (int x = 0; x < g.w; ++x) {
      const double v = mid.at(y, x);
      for (int i = -r; i <= r; ++i) out.at(y, std::clamp(x + i, 0, g.w - 1)) += taps[i + r] * v;
    }
  }
  return out;
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument("psnr: dimension mismatch");
  }
  double mse = 0.0;
  for (size_t i = 0; i < a.px.size(); ++i) {
    const double d = a.px[i] - b.px[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.px.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

double ssim(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.height != b.height || a.width != b.width) {
    throw std::invalid_argument("ssim: dimension mismatch");
  }
  if (a.height < 11 || a.width < 11) throw std::invalid_argument("ssim: image smaller than window");
  constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  const auto taps = gaussian_taps(5, 1.5);

  const Plane la = luminance(a), lb = luminance(b);
  Plane aa(la.h, la.w), bb(la.h, la.w), ab(la.h, la.w);
  for (size_t i = 0; i < la.v.size(); ++i) {
    aa.v[i] = la.v[i] * la.v[i];
    bb.v[i] = lb.v[i] * lb.v[i];
    ab.v[i] = la.v[i] * lb.v[i];
  }
  const Plane mu_a = separable_filter(la, taps);
  const Plane mu_b = separable_filter(lb, taps);
  const Plane m_aa = separable_filter(aa, taps);
  const Plane m_bb = separable_filter(bb, taps);
  const Plane m_ab = separable_filter(ab, taps);

  // interior pixels only: their windows never touch the replicated border
  double sum = 0.0;
  int64_t count = 0;
  for (int y = 5; y < la.h - 5; ++y) {
    for (int x = 5; x < la.w - 5; ++x) {
      const double ma = mu_a.at(y, x), mb = mu_b.at(y, x);
      const double va = m_aa.at(y, x) - ma * ma;
      const double vb = m_bb.at(y, x) - mb * mb;
      const double cov = m_ab.at(y, x) - ma * mb;
      const double num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
      const double den = (ma * ma + mb * mb + c1) * (va + vb + c2);
      sum += num / den;
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

}  // namespace wmtk
