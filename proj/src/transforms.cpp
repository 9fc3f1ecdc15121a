#include "wmtk/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wmtk/rng.hpp"

namespace wmtk {

TransformSpec TransformSpec::identity() { return {}; }

TransformSpec TransformSpec::crop(double area_ratio) {
  if (area_ratio <= 0.0 || area_ratio > 1.0) {
    throw std::invalid_argument("crop: area_ratio must lie in (0,1]");
  }
  TransformSpec t;
  t.kind = Kind::crop;
  t.value = area_ratio;
  return t;
}

TransformSpec TransformSpec::resize(double area_ratio) {
  if (area_ratio <= 0.0 || area_ratio > 1.0) {
    throw std::invalid_argument("resize: area_ratio must lie in (0,1]");
  }
  TransformSpec t;
  t.kind = Kind::resize;
  t.value = area_ratio;
  return t;
}

TransformSpec TransformSpec::rotate90() {
  TransformSpec t;
  t.kind = Kind::rotate90;
  return t;
}

TransformSpec TransformSpec::jpeg(int quality) {
  if (quality < 1 || quality > 100) throw std::invalid_argument("jpeg: quality must lie in [1,100]");
  TransformSpec t;
  t.kind = Kind::jpeg;
  t.quality = quality;
  return t;
}

namespace {
TransformSpec factor_spec(TransformSpec::Kind kind, double f, const char* what) {
  if (f < 0.0) throw std::invalid_argument(std::string(what) + ": factor must be >= 0");
  TransformSpec t;
  t.kind = kind;
  t.value = f;
  return t;
}
}  // namespace

TransformSpec TransformSpec::brightness(double f) { return factor_spec(Kind::brightness, f, "brightness"); }
TransformSpec TransformSpec::contrast(double f) { return factor_spec(Kind::contrast, f, "contrast"); }
TransformSpec TransformSpec::saturation(double f) { return factor_spec(Kind::saturation, f, "saturation"); }
TransformSpec TransformSpec::sharpness(double f) { return factor_spec(Kind::sharpness, f, "sharpness"); }

TransformSpec TransformSpec::text_overlay() {
  TransformSpec t;
  t.kind = Kind::text_overlay;
  return t;
}

TransformSpec TransformSpec::combined(std::vector<TransformSpec> steps) {
  TransformSpec t;
  t.kind = Kind::combined;
  t.steps = std::move(steps);
  return t;
}

std::string TransformSpec::name() const {
  std::ostringstream os;
  auto num = [](double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  };
  switch (kind) {
    case Kind::identity: return "identity";
    case Kind::crop: return "crop_" + num(value);
    case Kind::resize: return "resize_" + num(value);
    case Kind::rotate90: return "rotate90";
    case Kind::jpeg: return "jpeg_" + std::to_string(quality);
    case Kind::brightness: return "brightness_" + num(value);
    case Kind::contrast: return "contrast_" + num(value);
    case Kind::saturation: return "saturation_" + num(value);
    case Kind::sharpness: return "sharpness_" + num(value);
    case Kind::text_overlay: return "text_overlay";
    case Kind::combined: {
      os << "combined[";
      for (size_t i = 0; i < steps.size(); ++i) os << (i ? "+" : "") << steps[i].name();
      os << "]";
      return os.str();
    }
  }
  return "?";
}

TransformSpec TransformSpec::parse(const std::string& text) {
  if (text.find(',') != std::string::npos) {
    std::vector<TransformSpec> steps;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (!part.empty()) steps.push_back(parse(part));
    }
    if (steps.empty()) throw std::invalid_argument("parse: empty transform chain");
    return combined(std::move(steps));
  }
  std::string head = text, arg;
  if (auto pos = text.find(':'); pos != std::string::npos) {
    head = text.substr(0, pos);
    arg = text.substr(pos + 1);
  }
  auto fval = [&]() {
    if (arg.empty()) throw std::invalid_argument("parse: '" + head + "' needs a parameter");
    return std::stod(arg);
  };
  if (head == "identity" || head == "none") return identity();
  if (head == "crop") return crop(fval());
  if (head == "resize") return resize(fval());
  if (head == "rotate90") return rotate90();
  if (head == "jpeg") return jpeg(static_cast<int>(std::lround(fval())));
  if (head == "brightness") return brightness(fval());
  if (head == "contrast") return contrast(fval());
  if (head == "saturation") return saturation(fval());
  if (head == "sharpness") return sharpness(fval());
  if (head == "text" || head == "text_overlay") return text_overlay();
  throw std::invalid_argument("parse: unknown transform '" + head + "'");
}

// ---------------------------------------------------------------------------

namespace {

constexpr int kMinSide = 8;

ImageBuffer center_crop(const ImageBuffer& x, double area_ratio) {
  const double s = std::sqrt(area_ratio);
  const int oh = static_cast<int>(std::floor(x.height * s));
  const int ow = static_cast<int>(std::floor(x.width * s));
  if (oh < kMinSide || ow < kMinSide) {
    throw std::invalid_argument("crop: output side would fall below 8");
  }
  const int y0 = (x.height - oh) / 2;
  const int x0 = (x.width - ow) / 2;
  ImageBuffer out(oh, ow);
  for (int y = 0; y < oh; ++y)
    for (int xx = 0; xx < ow; ++xx)
      for (int c = 0; c < 3; ++c) out.at(y, xx, c) = x.at(y0 + y, x0 + xx, c);
  return out;
}

ImageBuffer area_resize(const ImageBuffer& x, double area_ratio) {
  const double s = std::sqrt(area_ratio);
  const int oh = static_cast<int>(std::floor(x.height * s));
  const int ow = static_cast<int>(std::floor(x.width * s));
  if (oh < kMinSide || ow < kMinSide) {
    throw std::invalid_argument("resize: output side would fall below 8");
  }
  ImageBuffer out = resize_bicubic(x, oh, ow);
  out.clamp01();
  return out;
}

ImageBuffer rotate90_cw(const ImageBuffer& x) {
  ImageBuffer out(x.width, x.height);
  for (int y = 0; y < x.height; ++y)
    for (int xx = 0; xx < x.width; ++xx)
      for (int c = 0; c < 3; ++c) out.at(xx, x.height - 1 - y, c) = x.at(y, xx, c);
  return out;
}

ImageBuffer enhance_brightness(const ImageBuffer& x, double f) {
  ImageBuffer out = x;
  for (auto& v : out.px) v = clamp01(f * v);
  return out;
}

ImageBuffer enhance_contrast(const ImageBuffer& x, double f) {
  const Plane l = luminance(x);
  double mean = 0.0;
  for (double v : l.v) mean += v;
  mean /= static_cast<double>(l.v.size());
  ImageBuffer out = x;
  for (auto& v : out.px) v = clamp01(mean + f * (v - mean));
  return out;
}

ImageBuffer enhance_saturation(const ImageBuffer& x, double f) {
  ImageBuffer out(x.height, x.width);
  for (int y = 0; y < x.height; ++y) {
    for (int xx = 0; xx < x.width; ++xx) {
      const double lp =
          kLumaR * x.at(y, xx, 0) + kLumaG * x.at(y, xx, 1) + kLumaB * x.at(y, xx, 2);
      for (int c = 0; c < 3; ++c) out.at(y, xx, c) = clamp01(lp + f * (x.at(y, xx, c) - lp));
    }
  }
  return out;
}

// 3x3 smoothing kernel [[1,1,1],[1,5,1],[1,1,1]]/13, replicate edges
ImageBuffer smooth3x3(const ImageBuffer& x) {
  ImageBuffer out(x.height, x.width);
  for (int y = 0; y < x.height; ++y) {
    for (int xx = 0; xx < x.width; ++xx) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int yy = std::clamp(y + dy, 0, x.height - 1);
            const int xc = std::clamp(xx + dx, 0, x.width - 1);
            acc += (dy == 0 && dx == 0 ? 5.0 : 1.0) * x.at(yy, xc, c);
          }
        }
        out.at(y, xx, c) = acc / 13.0;
      }
    }
  }
  return out;
}

ImageBuffer enhance_sharpness(const ImageBuffer& x, double f) {
  const ImageBuffer s = smooth3x3(x);
  ImageBuffer out(x.height, x.width);
  for (size_t i = 0; i < x.px.size(); ++i) out.px[i] = clamp01((1.0 - f) * s.px[i] + f * x.px[i]);
  return out;
}

// 5x7 dot-matrix glyphs for the hex charset; rows top to bottom, 5-bit masks.
constexpr uint8_t kGlyphs[16][7] = {
    {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E},  // 0
    {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E},  // 1
    {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F},  // 2
    {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E},  // 3
    {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02},  // 4
    {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E},  // 5
    {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E},  // 6
    {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08},  // 7
    {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E},  // 8
    {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C},  // 9
    {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11},  // A
    {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E},  // B
    {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E},  // C
    {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E},  // D
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F},  // E
    {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10},  // F
};

ImageBuffer overlay_text(const ImageBuffer& x, uint64_t seed) {
  Rng rng(mix_seed(seed, 0x7e97));
  const int n_chars = 4 + static_cast<int>(rng.next_below(5));  // 4..8 glyphs

  // choose the largest dot size whose text block covers at most 5% of area
  const int cols = 6 * n_chars - 1, rows = 7;
  int dot = 1;
  const double area_budget = 0.05 * x.height * x.width;
  while (static_cast<double>(cols * (dot + 1)) * (rows * (dot + 1)) <= area_budget &&
         cols * (dot + 1) < x.width && rows * (dot + 1) < x.height) {
    ++dot;
  }
  const int bw = cols * dot, bh = rows * dot;
  if (bw >= x.width || bh >= x.height) return x;  // image too small for any glyph

  const int y0 = static_cast<int>(rng.next_below(x.height - bh));
  const int x0 = static_cast<int>(rng.next_below(x.width - bw));
  const double color = rng.next_bit() ? 1.0 : 0.0;  // opaque white or black

  ImageBuffer out = x;
  for (int ci = 0; ci < n_chars; ++ci) {
    const int glyph = static_cast<int>(rng.next_below(16));
    const int gx = x0 + ci * 6 * dot;
    for (int r = 0; r < 7; ++r) {
      for (int col = 0; col < 5; ++col) {
        if (!(kGlyphs[glyph][r] >> (4 - col) & 1)) continue;
        for (int dy = 0; dy < dot; ++dy) {
          for (int dx = 0; dx < dot; ++dx) {
            const int py = y0 + r * dot + dy, px = gx + col * dot + dx;
            for (int c = 0; c < 3; ++c) out.at(py, px, c) = color;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

ImageBuffer apply_transform(const ImageBuffer& x, const TransformSpec& t, uint64_t rng_seed) {
  switch (t.kind) {
    case TransformSpec::Kind::identity: return x;
    case TransformSpec::Kind::crop: return center_crop(x, t.value);
    case TransformSpec::Kind::resize: return area_resize(x, t.value);
    case TransformSpec::Kind::rotate90: return rotate90_cw(x);
    case TransformSpec::Kind::jpeg: return jpeg_roundtrip(x, t.quality);
    case TransformSpec::Kind::brightness: return enhance_brightness(x, t.value);
    case TransformSpec::Kind::contrast: return enhance_contrast(x, t.value);
    case TransformSpec::Kind::saturation: return enhance_saturation(x, t.value);
    case TransformSpec::Kind::sharpness: return enhance_sharpness(x, t.value);
    case TransformSpec::Kind::text_overlay: return overlay_text(x, rng_seed);
    case TransformSpec::Kind::combined: {
      ImageBuffer cur = x;
      for (size_t i = 0; i < t.steps.size(); ++i) {
        cur = apply_transform(cur, t.steps[i], mix_seed(rng_seed, i));
      }
      return cur;
    }
  }
  throw std::logic_error("apply_transform: unhandled kind");
}

ImageBuffer jnd_mask(const ImageBuffer& x, double a, double b, double lo, double hi) {
  const Plane l = luminance(x);
  ImageBuffer mask(x.height, x.width);
  for (int y = 0; y < x.height; ++y) {
    for (int xx = 0; xx < x.width; ++xx) {
      double sum = 0.0, sum2 = 0.0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const double v =
              l.at(std::clamp(y + dy, 0, x.height - 1), std::clamp(xx + dx, 0, x.width - 1));
          sum += v;
          sum2 += v * v;
        }
      }
      const double mean = sum / 9.0;
      const double var = std::max(0.0, sum2 / 9.0 - mean * mean);
      const double g = std::clamp(a + b * std::sqrt(var), lo, hi);
      for (int c = 0; c < 3; ++c) mask.at(y, xx, c) = g;
    }
  }
  return mask;
}

}  // namespace wmtk
