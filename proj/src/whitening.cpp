#include "wmtk/whitening.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace wmtk {

WhiteningTransform WhiteningTransform::identity(int k) {
  WhiteningTransform t;
  t.k = k;
  t.weight.assign(static_cast<size_t>(k) * k, 0.0);
  t.bias.assign(k, 0.0);
  for (int i = 0; i < k; ++i) t.weight[static_cast<size_t>(i) * k + i] = 1.0;
  return t;
}

std::vector<double> WhiteningTransform::inverse_weight() const {
  Eigen::MatrixXd w(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) w(r, c) = weight[static_cast<size_t>(r) * k + c];
  Eigen::MatrixXd inv = w.partialPivLu().solve(Eigen::MatrixXd::Identity(k, k));
  std::vector<double> out(static_cast<size_t>(k) * k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) out[static_cast<size_t>(r) * k + c] = inv(r, c);
  return out;
}

WhiteningTransform fit_whitening(const std::vector<double>& samples, int n, int k,
                                 double eigen_floor) {
  if (k < 1) throw std::invalid_argument("fit_whitening: k must be >= 1");
  if (n <= k) throw std::invalid_argument("fit_whitening: insufficient samples (need n > k)");
  if (samples.size() != static_cast<size_t>(n) * k) {
    throw std::invalid_argument("fit_whitening: sample matrix size mismatch");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit_whitening: non-finite input");
  }

  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> x(
      samples.data(), n, k);
  const Eigen::VectorXd mu = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
  const Eigen::MatrixXd sigma = centered.transpose() * centered / double(n - 1);

  double eps = eigen_floor;
  if (eps < 0.0) eps = 1e-8 * sigma.trace() / k;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success) throw std::runtime_error("fit_whitening: eigensolver failed");
  const Eigen::VectorXd lam = es.eigenvalues();
  const Eigen::MatrixXd u = es.eigenvectors();

  Eigen::VectorXd inv_sqrt(k);
  for (int i = 0; i < k; ++i) {
    const double l = std::max(lam(i), 0.0) + eps;
    if (l <= 0.0) throw std::runtime_error("fit_whitening: degenerate covariance with zero floor");
    inv_sqrt(i) = 1.0 / std::sqrt(l);
  }
  const Eigen::MatrixXd w = inv_sqrt.asDiagonal() * u.transpose();
  const Eigen::VectorXd b = -(w * mu);

  WhiteningTransform t;
  t.k = k;
  t.eigen_floor = eps;
  t.weight.resize(static_cast<size_t>(k) * k);
  t.bias.resize(k);
  for (int r = 0; r < k; ++r) {
    t.bias[r] = b(r);
    for (int c = 0; c < k; ++c) t.weight[static_cast<size_t>(r) * k + c] = w(r, c);
  }
  return t;
}

std::vector<double> apply_whitening(const WhiteningTransform& t,
                                    const std::vector<double>& soft) {
  if (static_cast<int>(soft.size()) != t.k) {
    throw std::invalid_argument("apply_whitening: dimension mismatch");
  }
  std::vector<double> out(t.k);
  for (int r = 0; r < t.k; ++r) {
    double acc = t.bias[r];
    const double* row = &t.weight[static_cast<size_t>(r) * t.k];
    for (int c = 0; c < t.k; ++c) acc += row[c] * soft[c];
    out[r] = acc;
  }
  return out;
}

std::vector<uint8_t> hard_bits(const std::vector<double>& soft) {
  std::vector<uint8_t> b(soft.size());
  for (size_t i = 0; i < soft.size(); ++i) b[i] = soft[i] > 0.0 ? 1 : 0;
  return b;
}

IidReport iid_diagnostics(const std::vector<uint8_t>& bits, int n, int k) {
  if (n < 2) throw std::invalid_argument("iid_diagnostics: need at least 2 samples");
  if (bits.size() != static_cast<size_t>(n) * k) {
    throw std::invalid_argument("iid_diagnostics: bit matrix size mismatch");
  }
  IidReport rep;
  rep.sample_count = n;
  rep.per_bit_mean.assign(k, 0.0);

  std::vector<double> mean(k, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) mean[j] += bits[static_cast<size_t>(i) * k + j];
  for (int j = 0; j < k; ++j) {
    mean[j] /= n;
    rep.per_bit_mean[j] = mean[j];
    rep.max_bias = std::max(rep.max_bias, std::fabs(mean[j] - 0.5));
  }

  // second moments; for 0/1 data E[xy] is enough for Pearson r
  std::vector<double> cross(static_cast<size_t>(k) * k, 0.0);
  for (int i = 0; i < n; ++i) {
    const uint8_t* row = &bits[static_cast<size_t>(i) * k];
    for (int a = 0; a < k; ++a) {
      if (!row[a]) continue;
      for (int b = a + 1; b < k; ++b) cross[static_cast<size_t>(a) * k + b] += row[b];
    }
  }
  for (int a = 0; a < k; ++a) {
    const double va = mean[a] * (1.0 - mean[a]);
    if (va <= 0.0) {
      rep.degenerate = true;  // constant column: correlation reported as 0
      continue;
    }
    for (int b = a + 1; b < k; ++b) {
      const double vb = mean[b] * (1.0 - mean[b]);
      if (vb <= 0.0) {
        rep.degenerate = true;
        continue;
      }
      const double cov = cross[static_cast<size_t>(a) * k + b] / n - mean[a] * mean[b];
      rep.max_offdiag_corr =
          std::max(rep.max_offdiag_corr, std::fabs(cov / std::sqrt(va * vb)));
    }
  }
  return rep;
}

}  // namespace wmtk
