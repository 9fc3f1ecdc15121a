#include "wmtk/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dct8.h"
#include "wmtk/rng.hpp"
#include "wmtk/transforms.hpp"

namespace wmtk {

namespace {

// Fixed gain on the carrier correlations so soft values land at a scale
// where the logistic loss has usable curvature.
constexpr double kSoftGain = 8.0;

// Soft-space magnitude the white-box attacks steer toward. Kept small: the
// expensive part of a removal is cancelling the embedded amplitude, and a
// modest target leaves more of the distortion budget for that.
constexpr double kAttackTargetAmp = 1.0;

// Scale on the distortion term so lambda values around 0.1 sit near the
// message/distortion balance point of this extractor.
constexpr double kLambdaScale = 0.5;

const std::vector<double>& carrier_lowpass_taps() {
  static const std::vector<double> taps = gaussian_taps(4, 2.0);  // 9x9, sigma 2
  return taps;
}

// BT.601, no level shift; Y in [0,1], chroma signed around 0.
void rgb_to_ycbcr(double r, double g, double b, double& y, double& cb, double& cr) {
  y = 0.299 * r + 0.587 * g + 0.114 * b;
  cb = -0.168736 * r - 0.331264 * g + 0.5 * b;
  cr = 0.5 * r - 0.418688 * g - 0.081312 * b;
}

void ycbcr_to_rgb(double y, double cb, double cr, double& r, double& g, double& b) {
  r = y + 1.402 * cr;
  g = y - 0.344136 * cb - 0.714136 * cr;
  b = y + 1.772 * cb;
}

// One-level orthonormal Haar split of the even-sized top-left region.
struct HaarBands {
  Plane ll, lh, hl, hh;
};

HaarBands haar_forward(const Plane& p, int eh, int ew) {
  HaarBands b{Plane(eh / 2, ew / 2), Plane(eh / 2, ew / 2), Plane(eh / 2, ew / 2),
              Plane(eh / 2, ew / 2)};
  for (int y = 0; y < eh / 2; ++y) {
    for (int x = 0; x < ew / 2; ++x) {
      const double a = p.at(2 * y, 2 * x), c = p.at(2 * y, 2 * x + 1);
      const double d = p.at(2 * y + 1, 2 * x), e = p.at(2 * y + 1, 2 * x + 1);
      b.ll.at(y, x) = 0.5 * (a + c + d + e);
      b.lh.at(y, x) = 0.5 * (a - c + d - e);
      b.hl.at(y, x) = 0.5 * (a + c - d - e);
      b.hh.at(y, x) = 0.5 * (a - c - d + e);
    }
  }
  return b;
}

void haar_inverse(const HaarBands& b, Plane& p) {
  for (int y = 0; y < b.ll.h; ++y) {
    for (int x = 0; x < b.ll.w; ++x) {
      const double ll = b.ll.at(y, x), lh = b.lh.at(y, x);
      const double hl = b.hl.at(y, x), hh = b.hh.at(y, x);
      p.at(2 * y, 2 * x) = 0.5 * (ll + lh + hl + hh);
      p.at(2 * y, 2 * x + 1) = 0.5 * (ll - lh + hl - hh);
      p.at(2 * y + 1, 2 * x) = 0.5 * (ll + lh - hl - hh);
      p.at(2 * y + 1, 2 * x + 1) = 0.5 * (ll - lh - hl + hh);
    }
  }
}

// QIM lattice for one coefficient: even multiples of delta/2 carry bit 0,
// odd multiples carry bit 1.
constexpr int kQimRow = 3, kQimCol = 2;

double qim_snap(double c, int bit, double delta) {
  const double offset = bit ? delta * 0.5 : 0.0;
  return delta * std::nearbyint((c - offset) / delta) + offset;
}

int qim_decode(double c, double delta) {
  const long long n = static_cast<long long>(std::nearbyint(c / (delta * 0.5)));
  return static_cast<int>(((n % 2) + 2) % 2);
}

void check_ss_key(const CodecKey& key) {
  if (key.kind != CodecKind::spreadspectrum || key.carriers.empty()) {
    throw std::invalid_argument("spread-spectrum operation needs a spreadspectrum key");
  }
}

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::fabs(x))); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> whiten_or_pass(const CodecKey& key, const std::vector<double>& raw) {
  return key.whitening ? apply_whitening(*key.whitening, raw) : raw;
}

// Map soft-space sensitivities back through the (optional) whitening layer.
std::vector<double> whitening_adjoint(const CodecKey& key, const std::vector<double>& v) {
  if (!key.whitening) return v;
  const auto& w = key.whitening->weight;
  const int k = key.k;
  std::vector<double> out(k, 0.0);
  for (int r = 0; r < k; ++r) {
    const double vr = v[r];
    if (vr == 0.0) continue;
    for (int c = 0; c < k; ++c) out[c] += w[static_cast<size_t>(r) * k + c] * vr;
  }
  return out;
}

double squared_distortion(const ImageBuffer& a, const ImageBuffer& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.px.size(); ++i) {
    const double d = a.px[i] - b.px[i];
    s += d * d;
  }
  return s;
}

double rms_deviation(const ImageBuffer& a, const ImageBuffer& b) {
  return std::sqrt(squared_distortion(a, b) / static_cast<double>(a.px.size()));
}

}  // namespace

CodecKey keygen(CodecKind kind, int k, uint64_t seed, const KeygenParams& params) {
  if (k < 1 || k > 256) throw std::invalid_argument("keygen: k must lie in [1,256]");
  if (params.alpha <= 0.0) throw std::invalid_argument("keygen: alpha must be > 0");
  if (params.delta <= 0.0) throw std::invalid_argument("keygen: delta must be > 0");
  if (params.canonical_size < 32) throw std::invalid_argument("keygen: canonical_size too small");

  CodecKey key;
  key.kind = kind;
  key.k = k;
  key.seed = seed;
  key.alpha = params.alpha;
  key.delta = params.delta;
  key.canonical_size = params.canonical_size;
  if (kind == CodecKind::dctdwt) return key;

  const int cs = key.canonical_size;
  const size_t n = static_cast<size_t>(cs) * cs;
  Rng rng(mix_seed(seed, 0xCA44));

  key.carriers.assign(k, std::vector<double>(n));
  for (int j = 0; j < k; ++j) {
    Plane field(cs, cs);
    for (auto& v : field.v) v = rng.next_gauss();
    field = separable_filter(field, carrier_lowpass_taps());
    double mean = 0.0;
    for (double v : field.v) mean += v;
    mean /= static_cast<double>(n);
    for (size_t i = 0; i < n; ++i) key.carriers[j][i] = field.v[i] - mean;
  }

  // modified Gram-Schmidt; linear combinations of zero-mean fields stay
  // zero-mean, so orthogonality and centering both hold exactly
  for (int j = 0; j < k; ++j) {
    auto& cj = key.carriers[j];
    for (int i = 0; i < j; ++i) {
      const auto& ci = key.carriers[i];
      double dot = 0.0;
      for (size_t t = 0; t < n; ++t) dot += cj[t] * ci[t];
      // earlier carriers are already unit-RMS: ||ci||^2 = n
      const double coef = dot / static_cast<double>(n);
      for (size_t t = 0; t < n; ++t) cj[t] -= coef * ci[t];
    }
    double ss = 0.0;
    for (double v : cj) ss += v * v;
    const double rms = std::sqrt(ss / static_cast<double>(n));
    if (rms < 1e-12) throw std::runtime_error("keygen: carrier collapsed during orthogonalization");
    for (auto& v : cj) v /= rms;
  }
  return key;
}

BitMessage key_default_message(const CodecKey& key) {
  Rng rng(mix_seed(key.seed, 0x3a9e));
  return BitMessage::random(key.k, rng);
}

// --- DCT-DWT ---------------------------------------------------------------

int dctdwt_capacity(int height, int width) { return (height / 2 / 8) * (width / 2 / 8); }

ImageBuffer embed_dctdwt(const ImageBuffer& x, const CodecKey& key, const BitMessage& m) {
  if (m.k() != key.k) throw std::invalid_argument("embed_dctdwt: message length != key.k");
  if (dctdwt_capacity(x.height, x.width) < key.k) {
    throw std::invalid_argument("embed_dctdwt: image too small for payload");
  }
  const int eh = x.height / 2 * 2, ew = x.width / 2 * 2;

  // split luminance, keep chroma untouched
  Plane yp(x.height, x.width), cb(x.height, x.width), cr(x.height, x.width);
  for (int yy = 0; yy < x.height; ++yy)
    for (int xx = 0; xx < x.width; ++xx)
      rgb_to_ycbcr(x.at(yy, xx, 0), x.at(yy, xx, 1), x.at(yy, xx, 2), yp.at(yy, xx),
                   cb.at(yy, xx), cr.at(yy, xx));

  HaarBands bands = haar_forward(yp, eh, ew);
  const int nby = bands.ll.h / 8, nbx = bands.ll.w / 8;
  double block[64], coef[64];
  int bi = 0;
  for (int by = 0; by < nby; ++by) {
    for (int bx = 0; bx < nbx; ++bx, ++bi) {
      for (int yy = 0; yy < 8; ++yy)
        for (int xx = 0; xx < 8; ++xx) block[yy * 8 + xx] = bands.ll.at(by * 8 + yy, bx * 8 + xx);
      detail::dct2d(block, coef);
      const int bit = m.bits[bi % key.k];
      coef[kQimRow * 8 + kQimCol] = qim_snap(coef[kQimRow * 8 + kQimCol], bit, key.delta);
      detail::idct2d(coef, block);
      for (int yy = 0; yy < 8; ++yy)
        for (int xx = 0; xx < 8; ++xx) bands.ll.at(by * 8 + yy, bx * 8 + xx) = block[yy * 8 + xx];
    }
  }
  haar_inverse(bands, yp);

  ImageBuffer out(x.height, x.width);
  for (int yy = 0; yy < x.height; ++yy) {
    for (int xx = 0; xx < x.width; ++xx) {
      double r, g, b;
      ycbcr_to_rgb(yp.at(yy, xx), cb.at(yy, xx), cr.at(yy, xx), r, g, b);
      out.at(yy, xx, 0) = clamp01(r);
      out.at(yy, xx, 1) = clamp01(g);
      out.at(yy, xx, 2) = clamp01(b);
    }
  }
  return out;
}

BitMessage extract_dctdwt(const ImageBuffer& x, const CodecKey& key) {
  if (dctdwt_capacity(x.height, x.width) < key.k) {
    throw std::invalid_argument("extract_dctdwt: image too small for payload");
  }
  const int eh = x.height / 2 * 2, ew = x.width / 2 * 2;
  const Plane yp = luminance(x);
  const HaarBands bands = haar_forward(yp, eh, ew);
  const int nby = bands.ll.h / 8, nbx = bands.ll.w / 8;

  std::vector<int> votes(key.k, 0);
  double block[64], coef[64];
  int bi = 0;
  for (int by = 0; by < nby; ++by) {
    for (int bx = 0; bx < nbx; ++bx, ++bi) {
      for (int yy = 0; yy < 8; ++yy)
        for (int xx = 0; xx < 8; ++xx) block[yy * 8 + xx] = bands.ll.at(by * 8 + yy, bx * 8 + xx);
      detail::dct2d(block, coef);
      votes[bi % key.k] += qim_decode(coef[kQimRow * 8 + kQimCol], key.delta) ? 1 : -1;
    }
  }
  BitMessage m;
  m.bits.resize(key.k);
  for (int j = 0; j < key.k; ++j) m.bits[j] = votes[j] >= 0 ? 1 : 0;
  return m;
}

// --- spread spectrum ---------------------------------------------------------

std::vector<double> ss_soft_raw(const ImageBuffer& x, const CodecKey& key) {
  check_ss_key(key);
  const int cs = key.canonical_size;
  const ImageBuffer canon = resize_bicubic(x, cs, cs);
  const Plane lum = luminance(canon);
  const Plane low = separable_filter(lum, carrier_lowpass_taps());
  Plane hp(cs, cs);
  for (size_t i = 0; i < hp.v.size(); ++i) hp.v[i] = lum.v[i] - low.v[i];

  const double n = static_cast<double>(hp.v.size());
  const double scale = kSoftGain / std::sqrt(n);
  std::vector<double> soft(key.k);
  for (int j = 0; j < key.k; ++j) {
    const auto& c = key.carriers[j];
    double dot = 0.0;
    for (size_t i = 0; i < c.size(); ++i) dot += hp.v[i] * c[i];
    soft[j] = dot * scale;
  }
  return soft;
}

ImageBuffer ss_soft_adjoint(const CodecKey& key, const std::vector<double>& v, int height,
                            int width) {
  check_ss_key(key);
  if (static_cast<int>(v.size()) != key.k) {
    throw std::invalid_argument("ss_soft_adjoint: sensitivity length != key.k");
  }
  const int cs = key.canonical_size;
  const size_t n = static_cast<size_t>(cs) * cs;
  const double scale = kSoftGain / std::sqrt(static_cast<double>(n));

  Plane hp_adj(cs, cs);
  for (int j = 0; j < key.k; ++j) {
    const double vj = v[j] * scale;
    if (vj == 0.0) continue;
    const auto& c = key.carriers[j];
    for (size_t i = 0; i < n; ++i) hp_adj.v[i] += vj * c[i];
  }
  const Plane low_adj = separable_filter_adjoint(hp_adj, carrier_lowpass_taps());
  Plane lum_adj(cs, cs);
  for (size_t i = 0; i < n; ++i) lum_adj.v[i] = hp_adj.v[i] - low_adj.v[i];
  const ImageBuffer canon_adj = luminance_adjoint(lum_adj);
  return resize_bicubic_adjoint(canon_adj, height, width);
}

std::pair<SoftMessage, BitMessage> extract_ss(const ImageBuffer& x, const CodecKey& key) {
  const std::vector<double> soft = whiten_or_pass(key, ss_soft_raw(x, key));
  BitMessage m;
  m.bits = hard_bits(soft);
  return {SoftMessage{soft}, m};
}

ImageBuffer embed_ss_additive(const ImageBuffer& x, const CodecKey& key, const BitMessage& m) {
  check_ss_key(key);
  if (m.k() != key.k) throw std::invalid_argument("embed_ss_additive: message length != key.k");
  const int cs = key.canonical_size;
  if (std::min(x.height, x.width) < cs / 4) {
    throw std::invalid_argument("embed_ss_additive: image smaller than canonical frame / 4");
  }

  // message direction: +-1 per bit in the decision domain. Whitening is a
  // rotation, so with a whitened key the signs must be mapped back through
  // W^{-1} or the decoded bits would come out scrambled.
  std::vector<double> coef(key.k);
  for (int j = 0; j < key.k; ++j) coef[j] = m.bits[j] ? 1.0 : -1.0;
  if (key.whitening) {
    const auto inv = key.whitening->inverse_weight();
    std::vector<double> mapped(key.k, 0.0);
    for (int r = 0; r < key.k; ++r) {
      const double* row = &inv[static_cast<size_t>(r) * key.k];
      for (int c = 0; c < key.k; ++c) mapped[r] += row[c] * coef[c];
    }
    coef = std::move(mapped);
  }

  Plane pattern(cs, cs);
  for (int j = 0; j < key.k; ++j) {
    const auto& c = key.carriers[j];
    for (size_t i = 0; i < pattern.v.size(); ++i) pattern.v[i] += coef[j] * c[i];
  }
  const Plane up = resize_bicubic_plane(pattern, x.height, x.width);
  const ImageBuffer mask = jnd_mask(x);

  // normalize the JND-modulated pattern so the pre-clamp distortion RMS is
  // exactly alpha, which makes PSNR a pure function of alpha
  std::vector<double> d(up.v.size());
  double ss = 0.0;
  for (size_t i = 0; i < up.v.size(); ++i) {
    d[i] = mask.px[i * 3] * up.v[i];
    ss += d[i] * d[i];
  }
  const double rms = std::sqrt(ss / static_cast<double>(d.size()));
  if (rms == 0.0) return x;

  ImageBuffer out = x;
  for (size_t i = 0; i < d.size(); ++i) {
    const double add = key.alpha * d[i] / rms;
    for (int c = 0; c < 3; ++c) out.px[i * 3 + c] = clamp01(out.px[i * 3 + c] + add);
  }
  return out;
}

double bce_message_loss(const SoftMessage& soft, const BitMessage& m) {
  if (static_cast<int>(soft.values.size()) != m.k()) {
    throw std::invalid_argument("bce_message_loss: length mismatch");
  }
  double loss = 0.0;
  for (int i = 0; i < m.k(); ++i) {
    const double s = soft.values[i];
    loss += m.bits[i] ? softplus(-s) : softplus(s);
  }
  return loss;
}

ImageBuffer embed_ss_iterative(const ImageBuffer& x, const CodecKey& key, const BitMessage& m,
                               double lambda_i, int steps, double learning_rate) {
  check_ss_key(key);
  if (m.k() != key.k) throw std::invalid_argument("embed_ss_iterative: message length != key.k");
  if (steps < 1) throw std::invalid_argument("embed_ss_iterative: steps must be >= 1");
  if (lambda_i < 0.0) throw std::invalid_argument("embed_ss_iterative: lambda_i must be >= 0");

  const ImageBuffer mask = jnd_mask(x);
  const double lam = lambda_i * kLambdaScale;
  auto total_loss = [&](const ImageBuffer& cand) {
    const SoftMessage soft{whiten_or_pass(key, ss_soft_raw(cand, key))};
    return bce_message_loss(soft, m) + lam * squared_distortion(cand, x);
  };

  ImageBuffer cur = x;
  ImageBuffer best = x;
  double best_loss = total_loss(x);

  // Steepest descent along the JND-preconditioned gradient. The restriction
  // of the loss to that line is convex (the extractor is affine), so the
  // step length comes from an exact 1-D solve instead of a fixed rate; the
  // learning_rate parameter rescales it around the 0.1 default.
  const double step_scale = learning_rate / 0.1;

  for (int it = 0; it < steps; ++it) {
    const std::vector<double> soft = whiten_or_pass(key, ss_soft_raw(cur, key));
    std::vector<double> v(key.k);
    for (int j = 0; j < key.k; ++j) v[j] = sigmoid(soft[j]) - static_cast<double>(m.bits[j]);
    const ImageBuffer g_msg = ss_soft_adjoint(key, whitening_adjoint(key, v), x.height, x.width);

    ImageBuffer dir(x.height, x.width);
    for (size_t i = 0; i < dir.px.size(); ++i) {
      dir.px[i] =
          mask.px[i] * (g_msg.px[i] + 2.0 * lam * (cur.px[i] - x.px[i]));
    }

    // image of the direction under the extractor, by affine differencing
    ImageBuffer probe = cur;
    for (size_t i = 0; i < probe.px.size(); ++i) probe.px[i] -= dir.px[i];
    const std::vector<double> soft_probe = whiten_or_pass(key, ss_soft_raw(probe, key));
    std::vector<double> q(key.k);  // soft shift per unit step
    for (int j = 0; j < key.k; ++j) q[j] = soft_probe[j] - soft[j];

    double dev_dot = 0.0, dir_sq = 0.0;
    for (size_t i = 0; i < dir.px.size(); ++i) {
      dev_dot += (cur.px[i] - x.px[i]) * dir.px[i];
      dir_sq += dir.px[i] * dir.px[i];
    }
    if (dir_sq == 0.0) break;

    // derivative of the restricted loss f(cur - s*dir); increasing in s
    // (convex restriction), negative at s = 0 by construction
    auto fprime = [&](double s) {
      double d = lam * (-2.0 * dev_dot + 2.0 * s * dir_sq);
      for (int j = 0; j < key.k; ++j) {
        d += (sigmoid(soft[j] + s * q[j]) - static_cast<double>(m.bits[j])) * q[j];
      }
      return d;
    };
    // bracket the root of the (increasing) derivative, then bisect. With
    // lambda = 0 the restriction decreases toward an asymptote, so the
    // bracket is capped where the largest pixel move spans the value range.
    double max_dir = 0.0;
    for (double dv : dir.px) max_dir = std::max(max_dir, std::fabs(dv));
    const double s_cap = 1.0 / max_dir;
    double hi = std::min(1.0, s_cap);
    while (hi < s_cap && fprime(hi) < 0.0) hi = std::min(2.0 * hi, s_cap);
    double lo = 0.0;
    if (fprime(hi) < 0.0) {
      lo = hi;
    } else {
      for (int b = 0; b < 60; ++b) {
        const double mid = 0.5 * (lo + hi);
        (fprime(mid) < 0.0 ? lo : hi) = mid;
      }
    }
    const double step = 0.5 * (lo + hi) * step_scale;

    for (size_t i = 0; i < cur.px.size(); ++i) {
      cur.px[i] = clamp01(cur.px[i] - step * dir.px[i]);
    }
    const double loss = total_loss(cur);
    if (loss < best_loss) {
      best_loss = loss;
      best = cur;
    }
  }
  return best;
}

WhiteningTransform fit_ss_whitening(const CodecKey& key,
                                    const std::vector<ImageBuffer>& vanilla_corpus,
                                    double eigen_floor) {
  check_ss_key(key);
  const int n = static_cast<int>(vanilla_corpus.size());
  std::vector<double> samples;
  samples.reserve(static_cast<size_t>(n) * key.k);
  for (const auto& img : vanilla_corpus) {
    const auto soft = ss_soft_raw(img, key);
    samples.insert(samples.end(), soft.begin(), soft.end());
  }
  return fit_whitening(samples, n, key.k, eigen_floor);
}

// --- attacks -----------------------------------------------------------------

namespace {

AttackResult steer_extractor(const ImageBuffer& x0, const CodecKey& key,
                             const std::vector<double>& target_soft, double psnr_floor) {
  check_ss_key(key);
  if (!(psnr_floor > 0.0)) throw std::invalid_argument("attack: psnr_floor must be > 0");
  const double rms_max = std::pow(10.0, -psnr_floor / 20.0);
  if (!(rms_max > 0.0)) return {x0, false};

  constexpr int kSteps = 10;

  // Projected gradient descent on the PSNR ball. The extractor is affine,
  // so the optimal step length along the gradient has a closed form;
  // raw-gradient scaling with a fixed rate would either stall or oscillate
  // depending on the floor.
  ImageBuffer cur = x0;
  for (int it = 0; it < kSteps; ++it) {
    const std::vector<double> soft = whiten_or_pass(key, ss_soft_raw(cur, key));
    std::vector<double> resid(key.k);
    for (int j = 0; j < key.k; ++j) resid[j] = soft[j] - target_soft[j];
    const ImageBuffer g =
        ss_soft_adjoint(key, whitening_adjoint(key, resid), x0.height, x0.width);

    // image of the step direction under the extractor: A g = soft(x+g)-soft(x)
    ImageBuffer probe = cur;
    for (size_t i = 0; i < probe.px.size(); ++i) probe.px[i] += g.px[i];
    const std::vector<double> soft_probe = whiten_or_pass(key, ss_soft_raw(probe, key));
    double rag = 0.0, ag2 = 0.0;
    for (int j = 0; j < key.k; ++j) {
      const double agj = soft_probe[j] - soft[j];
      rag += resid[j] * agj;
      ag2 += agj * agj;
    }
    if (ag2 == 0.0) break;
    const double step = rag / ag2;
    for (size_t i = 0; i < cur.px.size(); ++i) cur.px[i] -= step * g.px[i];

    // project back into the PSNR ball around the input, then into range
    const double rms = rms_deviation(cur, x0);
    if (rms > rms_max) {
      const double s = rms_max / rms;
      for (size_t i = 0; i < cur.px.size(); ++i) cur.px[i] = x0.px[i] + s * (cur.px[i] - x0.px[i]);
    }
    cur.clamp01();
  }
  const bool moved = cur.px != x0.px;
  return {std::move(cur), moved};
}

}  // namespace

AttackResult adversarial_remove(const ImageBuffer& x_w, const CodecKey& key, double psnr_floor,
                                uint64_t seed) {
  Rng rng(mix_seed(seed, 0xAD0B));
  const BitMessage target = BitMessage::random(key.k, rng);
  std::vector<double> target_soft(key.k);
  for (int j = 0; j < key.k; ++j) {
    target_soft[j] = (target.bits[j] ? 1.0 : -1.0) * kAttackTargetAmp;
  }
  return steer_extractor(x_w, key, target_soft, psnr_floor);
}

AttackResult adversarial_forge(const ImageBuffer& x, const CodecKey& key,
                               const BitMessage& victim_m, double psnr_floor) {
  if (victim_m.k() != key.k) throw std::invalid_argument("adversarial_forge: message length != key.k");
  std::vector<double> target_soft(key.k);
  for (int j = 0; j < key.k; ++j) {
    target_soft[j] = (victim_m.bits[j] ? 1.0 : -1.0) * kAttackTargetAmp;
  }
  return steer_extractor(x, key, target_soft, psnr_floor);
}

}  // namespace wmtk
