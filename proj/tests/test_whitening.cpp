#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "wmtk/rng.hpp"
#include "wmtk/whitening.hpp"

using namespace wmtk;

namespace {

// Correlated Gaussian generator x = A z + mu with a fixed random mixing
// matrix; the constructed covariance A A^T is the known ground truth.
struct GaussianMaker {
  int k;
  std::vector<double> a;   // k x k
  std::vector<double> mu;  // k

  GaussianMaker(int k_, uint64_t seed) : k(k_), a(static_cast<size_t>(k_) * k_), mu(k_) {
    Rng rng(seed);
    for (auto& v : a) v = rng.next_gauss() * 0.7;
    for (int i = 0; i < k; ++i) a[static_cast<size_t>(i) * k + i] += 1.5;  // keep full rank
    for (auto& v : mu) v = 2.0 * rng.next_gauss();
  }

  std::vector<double> draw(int n, Rng& rng) const {
    std::vector<double> out(static_cast<size_t>(n) * k);
    std::vector<double> z(k);
    for (int i = 0; i < n; ++i) {
      for (auto& v : z) v = rng.next_gauss();
      for (int r = 0; r < k; ++r) {
        double acc = mu[r];
        for (int c = 0; c < k; ++c) acc += a[static_cast<size_t>(r) * k + c] * z[c];
        out[static_cast<size_t>(i) * k + r] = acc;
      }
    }
    return out;
  }
};

std::vector<double> whiten_all(const WhiteningTransform& t, const std::vector<double>& samples,
                               int n) {
  std::vector<double> out(samples.size());
  std::vector<double> row(t.k);
  for (int i = 0; i < n; ++i) {
    std::copy_n(&samples[static_cast<size_t>(i) * t.k], t.k, row.begin());
    const auto w = apply_whitening(t, row);
    std::copy(w.begin(), w.end(), &out[static_cast<size_t>(i) * t.k]);
  }
  return out;
}

// plain sample covariance (and mean) of an n-by-k matrix
void sample_stats(const std::vector<double>& x, int n, int k, std::vector<double>& mean,
                  std::vector<double>& cov) {
  mean.assign(k, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) mean[j] += x[static_cast<size_t>(i) * k + j];
  for (auto& m : mean) m /= n;
  cov.assign(static_cast<size_t>(k) * k, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int r = 0; r < k; ++r) {
      const double dr = x[static_cast<size_t>(i) * k + r] - mean[r];
      for (int c = r; c < k; ++c) {
        cov[static_cast<size_t>(r) * k + c] +=
            dr * (x[static_cast<size_t>(i) * k + c] - mean[c]);
      }
    }
  }
  for (int r = 0; r < k; ++r)
    for (int c = r; c < k; ++c) {
      cov[static_cast<size_t>(r) * k + c] /= (n - 1);
      cov[static_cast<size_t>(c) * k + r] = cov[static_cast<size_t>(r) * k + c];
    }
}

}  // namespace

TEST_CASE("fit on known correlated Gaussian whitens to identity") {
  const int k = 16, n = 10000;
  GaussianMaker gen(k, 404);
  Rng rng(405);
  const auto samples = gen.draw(n, rng);
  const WhiteningTransform t = fit_whitening(samples, n, k);

  const auto whitened = whiten_all(t, samples, n);
  std::vector<double> mean, cov;
  sample_stats(whitened, n, k, mean, cov);

  // exact on the fitting sample up to the eigenvalue floor
  for (int j = 0; j < k; ++j) CHECK(std::fabs(mean[j]) <= 1e-9);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const double want = r == c ? 1.0 : 0.0;
      CHECK(std::fabs(cov[static_cast<size_t>(r) * k + c] - want) < 1e-5);
    }
  }

  // held-out draws from the same generator stay near identity
  const int m = 10000;
  const auto held = gen.draw(m, rng);
  const auto held_w = whiten_all(t, held, m);
  sample_stats(held_w, m, k, mean, cov);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const double want = r == c ? 1.0 : 0.0;
      CHECK(std::fabs(cov[static_cast<size_t>(r) * k + c] - want) < 0.05);
    }
  }

  // hard-bit means on held-out data: symmetric around 1/2
  std::vector<uint8_t> bits(held_w.size());
  for (size_t i = 0; i < held_w.size(); ++i) bits[i] = held_w[i] > 0.0 ? 1 : 0;
  const IidReport rep = iid_diagnostics(bits, m, k);
  CHECK(rep.max_bias < 0.02);
}

TEST_CASE("already-white input stays white") {
  const int k = 8, n = 5000;
  Rng rng(406);
  std::vector<double> samples(static_cast<size_t>(n) * k);
  for (auto& v : samples) v = rng.next_gauss();
  const WhiteningTransform t = fit_whitening(samples, n, k);
  const auto w = whiten_all(t, samples, n);
  std::vector<double> mean, cov;
  sample_stats(w, n, k, mean, cov);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c)
      CHECK(std::fabs(cov[static_cast<size_t>(r) * k + c] - (r == c ? 1.0 : 0.0)) < 1e-4);
}

TEST_CASE("degenerate and invalid inputs") {
  const int k = 4;
  // all rows identical: covariance zero, the floor keeps the fit finite
  std::vector<double> same(static_cast<size_t>(10) * k, 3.25);
  const WhiteningTransform t = fit_whitening(same, 10, k, 1e-6);
  for (double v : t.weight) CHECK(std::isfinite(v));
  const auto w = apply_whitening(t, {3.25, 3.25, 3.25, 3.25});
  for (double v : w) CHECK(std::fabs(v) < 1e-6);

  std::vector<double> few(static_cast<size_t>(4) * k, 0.0);
  CHECK_THROWS_AS(fit_whitening(few, 4, k), std::invalid_argument);

  std::vector<double> bad(static_cast<size_t>(10) * k, 0.0);
  bad[5] = std::nan("");
  CHECK_THROWS_AS(fit_whitening(bad, 10, k), std::invalid_argument);
}

TEST_CASE("apply_whitening centering and identity") {
  const int k = 6, n = 512;
  GaussianMaker gen(k, 407);
  Rng rng(408);
  const auto samples = gen.draw(n, rng);
  const WhiteningTransform t = fit_whitening(samples, n, k);

  std::vector<double> mean(k, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < k; ++j) mean[j] += samples[static_cast<size_t>(i) * k + j] / n;
  const auto at_mean = apply_whitening(t, mean);
  for (double v : at_mean) CHECK(std::fabs(v) < 1e-9);

  const WhiteningTransform id = WhiteningTransform::identity(k);
  const std::vector<double> probe{1.0, -2.0, 0.5, 3.0, 0.0, -7.5};
  CHECK(apply_whitening(id, probe) == probe);

  CHECK_THROWS_AS(apply_whitening(t, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("whitening is affine") {
  const int k = 5, n = 256;
  GaussianMaker gen(k, 409);
  Rng rng(410);
  const auto samples = gen.draw(n, rng);
  const WhiteningTransform t = fit_whitening(samples, n, k);

  std::vector<double> a(k), b(k);
  for (int i = 0; i < k; ++i) {
    a[i] = rng.next_gauss();
    b[i] = rng.next_gauss();
  }
  for (double alpha : {0.0, 0.25, 0.8, 1.0}) {
    std::vector<double> mix(k);
    for (int i = 0; i < k; ++i) mix[i] = alpha * a[i] + (1.0 - alpha) * b[i];
    const auto wm = apply_whitening(t, mix);
    const auto wa = apply_whitening(t, a);
    const auto wb = apply_whitening(t, b);
    for (int i = 0; i < k; ++i) {
      CHECK(wm[i] == doctest::Approx(alpha * wa[i] + (1.0 - alpha) * wb[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("hard bits are scale invariant and zero decodes to 0") {
  const std::vector<double> soft{0.3, -0.1, 2.0, -5.0, 0.0};
  const auto base = hard_bits(soft);
  CHECK(base == std::vector<uint8_t>{1, 0, 1, 0, 0});
  for (double s : {0.1, 3.0, 1e6}) {
    std::vector<double> scaled(soft);
    for (auto& v : scaled) v *= s;
    CHECK(hard_bits(scaled) == base);
  }
}

TEST_CASE("inverse_weight actually inverts") {
  const int k = 7, n = 300;
  GaussianMaker gen(k, 411);
  Rng rng(412);
  const auto samples = gen.draw(n, rng);
  const WhiteningTransform t = fit_whitening(samples, n, k);
  const auto inv = t.inverse_weight();
  // W^{-1} W = I
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      double acc = 0.0;
      for (int j = 0; j < k; ++j)
        acc += inv[static_cast<size_t>(r) * k + j] * t.weight[static_cast<size_t>(j) * k + c];
      CHECK(std::fabs(acc - (r == c ? 1.0 : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("iid_diagnostics") {
  // seeded fair coins: CLT-scale bounds
  {
    const int n = 100000, k = 16;
    Rng rng(413);
    std::vector<uint8_t> bits(static_cast<size_t>(n) * k);
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_bit());
    const IidReport rep = iid_diagnostics(bits, n, k);
    CHECK(rep.max_bias <= 0.01);
    CHECK(rep.max_offdiag_corr <= 0.02);
    CHECK(rep.sample_count == n);
    CHECK_FALSE(rep.degenerate);
  }
  // constant column
  {
    const int n = 100, k = 3;
    Rng rng(414);
    std::vector<uint8_t> bits(static_cast<size_t>(n) * k);
    for (int i = 0; i < n; ++i) {
      bits[static_cast<size_t>(i) * k] = 1;
      bits[static_cast<size_t>(i) * k + 1] = static_cast<uint8_t>(rng.next_bit());
      bits[static_cast<size_t>(i) * k + 2] = static_cast<uint8_t>(rng.next_bit());
    }
    const IidReport rep = iid_diagnostics(bits, n, k);
    CHECK(rep.per_bit_mean[0] == 1.0);
    CHECK(rep.max_bias == 0.5);
    CHECK(rep.degenerate);
  }
  // duplicated column pair
  {
    const int n = 200, k = 2;
    Rng rng(415);
    std::vector<uint8_t> bits(static_cast<size_t>(n) * k);
    for (int i = 0; i < n; ++i) {
      const uint8_t b = static_cast<uint8_t>(rng.next_bit());
      bits[static_cast<size_t>(i) * k] = b;
      bits[static_cast<size_t>(i) * k + 1] = b;
    }
    const IidReport rep = iid_diagnostics(bits, n, k);
    CHECK(rep.max_offdiag_corr == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(iid_diagnostics({1, 0}, 1, 2), std::invalid_argument);
}
