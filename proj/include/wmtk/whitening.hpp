#pragma once

#include <cstdint>
#include <vector>

namespace wmtk {

/// Affine map y = W x + b that takes the fitting population to zero mean and
/// (near-)identity covariance. W = (L + eps I)^{-1/2} U^T from the
/// eigendecomposition of the sample covariance, b = -W mu.
struct WhiteningTransform {
  int k = 0;
  std::vector<double> weight;  // k x k, row-major
  std::vector<double> bias;    // k
  double eigen_floor = 0.0;

  static WhiteningTransform identity(int k);
  /// W^{-1} (dense solve); needed to express message directions in the
  /// unwhitened coordinate frame.
  std::vector<double> inverse_weight() const;
};

/// Bias / correlation summary for a population of hard bits.
struct IidReport {
  std::vector<double> per_bit_mean;
  double max_bias = 0.0;          // max |mean - 1/2|
  double max_offdiag_corr = 0.0;  // max |Pearson r|, degenerate pairs excluded
  int sample_count = 0;
  bool degenerate = false;  // some column was constant
};

/// Fit on an n-by-k sample matrix (row-major). eigen_floor < 0 selects the
/// default 1e-8 * trace(Sigma) / k. Requires n >= k + 1 and finite input.
WhiteningTransform fit_whitening(const std::vector<double>& samples, int n, int k,
                                 double eigen_floor = -1.0);

std::vector<double> apply_whitening(const WhiteningTransform& t,
                                    const std::vector<double>& soft);

/// Hard decisions from whitened (or raw) soft values: > 0 decodes to 1.
std::vector<uint8_t> hard_bits(const std::vector<double>& soft);

IidReport iid_diagnostics(const std::vector<uint8_t>& bits, int n, int k);

}  // namespace wmtk
