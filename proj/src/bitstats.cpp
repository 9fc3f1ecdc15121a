#include "wmtk/bitstats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wmtk {

BitMessage::BitMessage(std::vector<uint8_t> b) : bits(std::move(b)) {
  for (uint8_t v : bits) {
    if (v > 1) throw std::invalid_argument("BitMessage: bits must be 0 or 1");
  }
}

BitMessage BitMessage::random(int k, Rng& rng) {
  if (k < 0) throw std::invalid_argument("BitMessage::random: negative k");
  BitMessage m;
  m.bits.resize(k);
  for (int i = 0; i < k; ++i) m.bits[i] = static_cast<uint8_t>(rng.next_bit());
  return m;
}

BitMessage BitMessage::from_string(const std::string& s) {
  BitMessage m;
  m.bits.reserve(s.size());
  for (char c : s) {
    if (c == '0') m.bits.push_back(0);
    else if (c == '1') m.bits.push_back(1);
    else throw std::invalid_argument("BitMessage::from_string: expected only '0'/'1'");
  }
  return m;
}

std::string BitMessage::to_string() const {
  std::string s(bits.size(), '0');
  for (size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? '1' : '0';
  return s;
}

BitMessage BitMessage::complemented() const {
  BitMessage m = *this;
  for (auto& b : m.bits) b ^= 1;
  return m;
}

uint64_t BitMessage::packed() const {
  if (bits.size() > 64) throw std::invalid_argument("BitMessage::packed: k > 64");
  uint64_t w = 0;
  for (size_t i = 0; i < bits.size(); ++i) w |= static_cast<uint64_t>(bits[i]) << i;
  return w;
}

BitMessage BitMessage::unpack(uint64_t word, int k) {
  if (k < 0 || k > 64) throw std::invalid_argument("BitMessage::unpack: k out of range");
  BitMessage m;
  m.bits.resize(k);
  for (int i = 0; i < k; ++i) m.bits[i] = static_cast<uint8_t>((word >> i) & 1);
  return m;
}

int match_bits(const BitMessage& a, const BitMessage& b) {
  if (a.k() != b.k()) throw std::invalid_argument("match_bits: length mismatch");
  int m = 0;
  for (int i = 0; i < a.k(); ++i) m += (a.bits[i] == b.bits[i]);
  return m;
}

// ---------------------------------------------------------------------------
// Binomial tails.

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

// Exact P(M >= tau) for M ~ Binomial(k, 1/2), k <= 64. The binomial
// coefficients and their sum are exact integers (sum < 2^64 for tau >= 1),
// so the only rounding is the final division by 2^k.
long double exact_half_tail_ge(int k, int tau) {
  if (tau <= 0) return 1.0L;
  unsigned __int128 sum = 0;
  unsigned __int128 c = 1;  // C(k, tau) built incrementally
  for (int i = 1; i <= tau; ++i) c = c * (k - i + 1) / i;
  for (int i = tau; i <= k; ++i) {
    sum += c;
    c = c * (k - i) / (i + 1);
  }
  return static_cast<long double>(sum) / std::exp2l(static_cast<long double>(k));
}

// Log-gamma route for k > 64.
double lgamma_half_tail_ge(int k, int tau) {
  if (tau <= 0) return 1.0;
  const double log_half = -0.69314718055994530941723212145818;
  double sum = 0.0, comp = 0.0;  // Kahan
  const double lg_k1 = std::lgamma(k + 1.0);
  for (int i = k; i >= tau; --i) {
    const double term =
        std::exp(lg_k1 - std::lgamma(i + 1.0) - std::lgamma(k - i + 1.0) + k * log_half);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return std::min(sum, 1.0);
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
  return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double fpr_of_threshold(int k, int tau, TailConvention conv) {
  if (k < 1) throw std::invalid_argument("fpr_of_threshold: k must be >= 1");
  if (tau < 0 || tau > k) throw std::invalid_argument("fpr_of_threshold: tau out of [0,k]");
  if (conv == TailConvention::GT) {
    // P(M > tau) = P(M >= tau+1); the tau = k tail is empty.
    return tau == k ? 0.0 : fpr_of_threshold(k, tau + 1, TailConvention::GE);
  }
  if (tau == 0) return 1.0;

  // Closed form: P(M >= tau) = I_{1/2}(tau, k - tau + 1).
  const double beta_route = regularized_incomplete_beta(tau, k - tau + 1.0, 0.5);
  const double sum_route = (k <= 64)
                               ? static_cast<double>(exact_half_tail_ge(k, tau))
                               : lgamma_half_tail_ge(k, tau);
  const double tol = (k <= 64) ? 1e-12 : 1e-9;
  if (std::fabs(beta_route - sum_route) > tol * sum_route) {
    throw std::logic_error("fpr_of_threshold: summation and beta routes disagree");
  }
  return sum_route;
}

double binomial_tail_ge(int k, int tau, double p) {
  if (k < 1) throw std::invalid_argument("binomial_tail_ge: k must be >= 1");
  if (tau < 0 || tau > k) throw std::invalid_argument("binomial_tail_ge: tau out of [0,k]");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_tail_ge: p out of [0,1]");
  if (tau == 0) return 1.0;
  return regularized_incomplete_beta(tau, k - tau + 1.0, p);
}

double global_fpr(double fpr, int64_t n_users) {
  if (fpr < 0.0 || fpr > 1.0) throw std::invalid_argument("global_fpr: fpr out of [0,1]");
  if (n_users < 1) throw std::invalid_argument("global_fpr: n_users must be >= 1");
  if (fpr >= 1.0) return 1.0;
  return -std::expm1(static_cast<double>(n_users) * std::log1p(-fpr));
}

int threshold_for_fpr(int k, double target_fpr, int64_t n_users) {
  if (target_fpr <= 0.0 || target_fpr >= 1.0) {
    throw std::invalid_argument("threshold_for_fpr: target_fpr must lie in (0,1)");
  }
  if (n_users < 1) throw std::invalid_argument("threshold_for_fpr: n_users must be >= 1");
  for (int tau = 0; tau <= k; ++tau) {
    if (global_fpr(fpr_of_threshold(k, tau), n_users) <= target_fpr) return tau;
  }
  throw InfeasibleThreshold("threshold_for_fpr: target unreachable even at tau = k");
}

DetectionVerdict detect(const BitMessage& m, const BitMessage& m_prime, int tau) {
  const int score = match_bits(m, m_prime);
  DetectionVerdict v;
  v.score = score;
  v.threshold = tau;
  v.flagged = score >= tau;
  v.p_value = fpr_of_threshold(m.k(), score);
  return v;
}

IdentificationVerdict identify(const BitMessage& m_prime,
                               const std::vector<BitMessage>& keys, int tau) {
  if (keys.empty()) throw std::invalid_argument("identify: empty key list");
  int best = -1, best_score = -1;
  for (size_t i = 0; i < keys.size(); ++i) {
    const int s = match_bits(m_prime, keys[i]);
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(i);
    }
  }
  IdentificationVerdict v;
  v.best_score = best_score;
  v.threshold = tau;
  v.flagged = best_score >= tau;
  if (v.flagged) v.best_index = best;
  return v;
}

}  // namespace wmtk
