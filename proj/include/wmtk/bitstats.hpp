#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmtk/rng.hpp"

namespace wmtk {

/// A k-bit signature. Bits are stored one per byte, each 0 or 1.
struct BitMessage {
  std::vector<uint8_t> bits;

  BitMessage() = default;
  explicit BitMessage(std::vector<uint8_t> b);

  int k() const { return static_cast<int>(bits.size()); }

  static BitMessage random(int k, Rng& rng);
  static BitMessage from_string(const std::string& s);  // e.g. "10110..."
  std::string to_string() const;

  BitMessage complemented() const;

  // packed little-endian (bit i -> bit i of the word); requires k <= 64
  uint64_t packed() const;
  static BitMessage unpack(uint64_t word, int k);

  bool operator==(const BitMessage& o) const { return bits == o.bits; }
};

/// Result of the single-signature detection test.
struct DetectionVerdict {
  int score = 0;       // matching bits M
  int threshold = 0;   // tau
  bool flagged = false;
  double p_value = 1.0;  // P(M' >= score) under the fair-coin null
};

/// Result of the N-signature identification test.
struct IdentificationVerdict {
  std::optional<int> best_index;
  int best_score = 0;
  bool flagged = false;
  int threshold = 0;
};

/// Tail convention for the score distribution under the null.
/// GE counts M >= tau, GT counts M > tau. GE is the toolkit default.
enum class TailConvention { GE, GT };

/// Number of positions where a and b agree. Throws on length mismatch.
int match_bits(const BitMessage& a, const BitMessage& b);

/// P(M >= tau) (or > tau under GT) for M ~ Binomial(k, 1/2).
/// Computed by exact integer summation for k <= 64 (log-gamma summation
/// beyond) and cross-checked against the regularized incomplete beta
/// closed form; the two routes must agree to 1e-12 relative.
double fpr_of_threshold(int k, int tau, TailConvention conv = TailConvention::GE);

/// P(M >= tau) for M ~ Binomial(k, p). General-p tail, used for analytic
/// TPR oracles in channel simulations.
double binomial_tail_ge(int k, int tau, double p);

/// 1 - (1 - fpr)^n_users, evaluated in log1p form so tiny rates survive.
double global_fpr(double fpr, int64_t n_users);

struct InfeasibleThreshold : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Smallest tau whose global FPR over n_users tests is <= target_fpr.
/// Throws InfeasibleThreshold when even tau = k cannot reach the target.
int threshold_for_fpr(int k, double target_fpr, int64_t n_users);

/// Flag iff M(m, m_prime) >= tau; p_value is the GE tail at the observed score.
DetectionVerdict detect(const BitMessage& m, const BitMessage& m_prime, int tau);

/// Attribute m_prime to the best-matching key (ties -> lowest index); flag
/// only if the best score clears tau. Unflagged verdicts carry no index.
IdentificationVerdict identify(const BitMessage& m_prime,
                               const std::vector<BitMessage>& keys, int tau);

// Regularized incomplete beta I_x(a, b). Exposed for tests and for the
// closed-form FPR route.
double regularized_incomplete_beta(double a, double b, double x);

}  // namespace wmtk
