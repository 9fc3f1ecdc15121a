// Acceptance suite: every criterion prints one PASS/FAIL line with the
// measured values and its wall-clock budget. The process exits non-zero if
// any criterion fails.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wmtk/bitstats.hpp"
#include "wmtk/codec.hpp"
#include "wmtk/rng.hpp"
#include "wmtk/synth.hpp"
#include "wmtk/tracing.hpp"
#include "wmtk/transforms.hpp"
#include "wmtk/whitening.hpp"

using namespace wmtk;

namespace {

int hw_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return static_cast<int>(std::min(n == 0 ? 1u : n, 8u));
}

const std::vector<ImageBuffer>& seed_corpus() {
  static const auto c = synthetic_corpus(64, 512, 512, 20240001);
  return c;
}

const CodecKey& ss_key() {
  static const CodecKey key = [] {
    CodecKey k = keygen(CodecKind::spreadspectrum, 48, 42);
    k.whitening = fit_ss_whitening(k, synthetic_corpus(600, 256, 256, 20240002));
    return k;
  }();
  return key;
}

const CodecKey& dct_key() {
  static const CodecKey key = keygen(CodecKind::dctdwt, 48, 4242);
  return key;
}

double accuracy(const BitMessage& truth, const BitMessage& got) {
  return static_cast<double>(match_bits(truth, got)) / truth.k();
}

// mean bit accuracy of one embedding config across the seed corpus x messages
template <typename EmbedFn, typename ExtractFn>
double corpus_accuracy(const std::vector<BitMessage>& messages, const EmbedFn& embed,
                       const ExtractFn& extract, const TransformSpec& channel, uint64_t seed,
                       double* psnr_mean = nullptr) {
  const auto& corpus = seed_corpus();
  const int64_t n = static_cast<int64_t>(messages.size()) * corpus.size();
  std::vector<double> acc(n), ps(n);
  std::vector<std::thread> pool;
  std::atomic<int64_t> next{0};
  const int jobs = hw_jobs();
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int64_t i = next.fetch_add(1);
        if (i >= n) return;
        const auto& m = messages[i / corpus.size()];
        const auto& x = corpus[i % corpus.size()];
        const ImageBuffer w = embed(x, m);
        ps[i] = psnr(x, w);
        const ImageBuffer attacked = apply_transform(w, channel, mix_seed(seed, i));
        acc[i] = accuracy(m, extract(attacked));
      }
    });
  }
  for (auto& th : pool) th.join();
  double a = 0.0, p = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    a += acc[i];
    p += std::isfinite(ps[i]) ? ps[i] : 99.0;
  }
  if (psnr_mean) *psnr_mean = p / static_cast<double>(n);
  return a / static_cast<double>(n);
}

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<bool(std::string&)> run;
};

// ---------------------------------------------------------------------------

bool crit1_thresholds(std::string& detail) {
  const int t1 = threshold_for_fpr(48, 1e-6, 1);
  const int t1000 = threshold_for_fpr(48, 1e-6, 1000);
  std::ostringstream os;
  os << "tau(N=1)=" << t1 << " (want 41), tau(N=1000)=" << t1000 << " (want 44)";
  detail = os.str();
  return t1 == 41 && t1000 == 44;
}

bool crit2_closed_form(std::string& detail) {
  double worst_rel = 0.0;
  for (int k = 1; k <= 64; ++k) {
    for (int tau = 0; tau <= k; ++tau) {
      const double sum_route = fpr_of_threshold(k, tau);
      const double beta_route =
          tau == 0 ? 1.0 : regularized_incomplete_beta(tau, k - tau + 1.0, 0.5);
      const double rel = std::fabs(beta_route - sum_route) / sum_route;
      worst_rel = std::max(worst_rel, rel);
      if (rel > 1e-12) {
        detail = "beta/sum disagree at k=" + std::to_string(k) + " tau=" + std::to_string(tau);
        return false;
      }
    }
  }
  // exact match against brute-force enumeration for k <= 16
  for (int k = 1; k <= 16; ++k) {
    std::vector<uint64_t> tail(k + 2, 0);
    for (uint64_t msg = 0; msg < (1ull << k); ++msg) ++tail[k - std::popcount(msg)];
    for (int tau = k - 1; tau >= 0; --tau) tail[tau] += tail[tau + 1];
    for (int tau = 0; tau <= k; ++tau) {
      const double want =
          static_cast<double>(static_cast<long double>(tail[tau]) / std::exp2l(k));
      if (fpr_of_threshold(k, tau) != want) {
        detail = "enumeration mismatch at k=" + std::to_string(k) + " tau=" + std::to_string(tau);
        return false;
      }
    }
  }
  std::ostringstream os;
  os << "all (k<=64, tau) pairs: max rel gap " << worst_rel << " <= 1e-12; k<=16 enumeration exact";
  detail = os.str();
  return true;
}

bool crit3_empirical_fpr(std::string& detail) {
  const ExperimentReport rep =
      validate_fpr_empirical(16, {12}, 1000000, FprSource::synthetic, 314159);
  double emp = -1;
  for (const auto& [k, v] : rep.rows[0].values) {
    if (k == "fpr_empirical") emp = v;
  }
  const double theory = 2517.0 / 65536.0;
  const double sigma = std::sqrt(theory * (1.0 - theory) / 1e6);
  std::ostringstream os;
  os << "empirical " << emp << " vs 2517/65536=" << theory << ", |diff| " << std::fabs(emp - theory)
     << " <= 3*sigma=" << 3 * sigma;
  detail = os.str();
  return std::fabs(emp - theory) <= 3.0 * sigma;
}

bool crit4_whitening(std::string& detail) {
  const int k = 48, n = 10000;
  Rng rng(271828);
  std::vector<double> mix(static_cast<size_t>(k) * k);
  for (auto& v : mix) v = 0.7 * rng.next_gauss();
  for (int i = 0; i < k; ++i) mix[static_cast<size_t>(i) * k + i] += 1.5;

  std::vector<double> samples(static_cast<size_t>(n) * k);
  std::vector<double> z(k);
  for (int i = 0; i < n; ++i) {
    for (auto& v : z) v = rng.next_gauss();
    for (int r = 0; r < k; ++r) {
      double acc = 0.5 * r;  // arbitrary mean offset
      for (int c = 0; c < k; ++c) acc += mix[static_cast<size_t>(r) * k + c] * z[c];
      samples[static_cast<size_t>(i) * k + r] = acc;
    }
  }
  const WhiteningTransform t = fit_whitening(samples, n, k);

  std::vector<double> row(k), mean(k, 0.0);
  std::vector<double> whitened(samples.size());
  std::vector<uint8_t> bits(samples.size());
  for (int i = 0; i < n; ++i) {
    std::copy_n(&samples[static_cast<size_t>(i) * k], k, row.begin());
    const auto w = apply_whitening(t, row);
    for (int j = 0; j < k; ++j) {
      whitened[static_cast<size_t>(i) * k + j] = w[j];
      bits[static_cast<size_t>(i) * k + j] = w[j] > 0.0;
      mean[j] += w[j] / n;
    }
  }
  double max_corr = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      double cov = 0.0, va = 0.0, vb = 0.0;
      for (int i = 0; i < n; ++i) {
        const double da = whitened[static_cast<size_t>(i) * k + a] - mean[a];
        const double db = whitened[static_cast<size_t>(i) * k + b] - mean[b];
        cov += da * db;
        va += da * da;
        vb += db * db;
      }
      max_corr = std::max(max_corr, std::fabs(cov / std::sqrt(va * vb)));
    }
  }
  const IidReport rep = iid_diagnostics(bits, n, k);
  std::ostringstream os;
  os << "max |offdiag corr| " << max_corr << " <= 0.05, max hard-bit bias " << rep.max_bias
     << " <= 0.02";
  detail = os.str();
  return max_corr <= 0.05 && rep.max_bias <= 0.02;
}

bool crit5_roundtrips(std::string& detail) {
  Rng mr(5550001);
  std::vector<BitMessage> messages;
  for (int i = 0; i < 10; ++i) messages.push_back(BitMessage::random(48, mr));

  const double dct_acc = corpus_accuracy(
      messages, [&](const ImageBuffer& x, const BitMessage& m) { return embed_dctdwt(x, dct_key(), m); },
      [&](const ImageBuffer& x) { return extract_dctdwt(x, dct_key()); }, TransformSpec::identity(),
      1);
  double ss_psnr = 0.0;
  const double ss_acc = corpus_accuracy(
      messages,
      [&](const ImageBuffer& x, const BitMessage& m) { return embed_ss_additive(x, ss_key(), m); },
      [&](const ImageBuffer& x) { return extract_ss(x, ss_key()).second; },
      TransformSpec::identity(), 2, &ss_psnr);

  std::ostringstream os;
  os << "dctdwt acc " << dct_acc << " (==1.0), ss acc " << ss_acc << " (>=0.99), ss psnr "
     << ss_psnr << " dB in [28,32]; 64 images x 10 messages";
  detail = os.str();
  return dct_acc == 1.0 && ss_acc >= 0.99 && ss_psnr >= 28.0 && ss_psnr <= 32.0;
}

bool crit6_robustness(std::string& detail) {
  Rng mr(6660001);
  std::vector<BitMessage> messages;
  for (int i = 0; i < 3; ++i) messages.push_back(BitMessage::random(48, mr));

  auto ss_embed = [&](const ImageBuffer& x, const BitMessage& m) {
    return embed_ss_additive(x, ss_key(), m);
  };
  auto ss_extract = [&](const ImageBuffer& x) { return extract_ss(x, ss_key()).second; };

  const double bright = corpus_accuracy(messages, ss_embed, ss_extract,
                                        TransformSpec::brightness(2.0), 3);
  const double resize = corpus_accuracy(messages, ss_embed, ss_extract,
                                        TransformSpec::resize(0.7), 4);
  const double jpeg80 = corpus_accuracy(messages, ss_embed, ss_extract, TransformSpec::jpeg(80), 5);
  const double ss_crop = corpus_accuracy(messages, ss_embed, ss_extract,
                                         TransformSpec::crop(0.5), 6);  // reported, not bounded

  const double dct_crop = corpus_accuracy(
      messages, [&](const ImageBuffer& x, const BitMessage& m) { return embed_dctdwt(x, dct_key(), m); },
      [&](const ImageBuffer& x) { return extract_dctdwt(x, dct_key()); }, TransformSpec::crop(0.1),
      7);

  std::ostringstream os;
  os << "ss: brightness2.0 " << bright << " (>=0.95), resize0.7 " << resize
     << " (>=0.85), jpeg80 " << jpeg80 << " (>=0.85), crop0.5 " << ss_crop
     << " (reported); dctdwt crop0.1 " << dct_crop << " (<=0.60)";
  detail = os.str();
  return bright >= 0.95 && resize >= 0.85 && jpeg80 >= 0.85 && dct_crop <= 0.60;
}

bool crit7_identification(std::string& detail) {
  IdentificationConfig cfg;
  cfg.n_users = 1000;
  cfg.n_decoys = 0;
  cfg.images_per_user = 10;  // 10^4 trials
  cfg.channel = ChannelModel::bsc(0.92);
  cfg.target_fpr = 1e-6;
  cfg.k = 48;
  cfg.seed = 7770001;
  cfg.jobs = hw_jobs();
  const ExperimentReport rep = run_identification_experiment(cfg);
  const double oracle = binomial_tail_ge(48, 44, 0.92);
  const double acc = rep.at("accuracy");
  const double fa = rep.at("false_accusations");
  std::ostringstream os;
  os << "tau " << rep.at("tau") << " (want 44), accuracy " << acc << " vs analytic " << oracle
     << " (|diff| " << std::fabs(acc - oracle) << " <= 0.015), false accusations " << fa
     << " (==0) over 1e4 trials";
  detail = os.str();
  return rep.at("tau") == 44 && std::fabs(acc - oracle) <= 0.015 && fa == 0.0;
}

bool crit8_collusion(std::string& detail) {
  Rng mr(8880001);
  const BitMessage ki = BitMessage::random(48, mr);
  const BitMessage kj = BitMessage::random(48, mr);
  const ExperimentReport rep = run_collusion_experiment(ki, kj, 0.9, 192000, 8880002);
  const double disagree = rep.at("disagree_one_freq");
  const double agree = rep.at("agree_keep_freq");
  const double outscore = rep.at("both_outscore_innocent_rate");
  std::ostringstream os;
  os << rep.sample_count << " bits (>=48000): disagree-position freq " << disagree
     << " in 0.5+-0.02, agree-position freq " << agree << " >= 0.88, both-outscore rate "
     << outscore << " >= 0.99";
  detail = os.str();
  return rep.sample_count >= 48000 && std::fabs(disagree - 0.5) <= 0.02 && agree >= 0.9 - 0.02 &&
         outscore >= 0.99;
}

bool crit9_removal(std::string& detail) {
  Rng mr(9990001);
  const BitMessage m = BitMessage::random(48, mr);
  const auto& corpus = seed_corpus();
  const int64_t n = static_cast<int64_t>(corpus.size());
  std::vector<double> acc26(n), acc60(n);
  std::vector<std::thread> pool;
  std::atomic<int64_t> next{0};
  for (int t = 0; t < hw_jobs(); ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int64_t i = next.fetch_add(1);
        if (i >= n) return;
        const ImageBuffer w = embed_ss_additive(corpus[i], ss_key(), m);
        const AttackResult r26 = adversarial_remove(w, ss_key(), 26.0, 99000 + i);
        const AttackResult r60 = adversarial_remove(w, ss_key(), 60.0, 99000 + i);
        acc26[i] = accuracy(m, extract_ss(r26.image, ss_key()).second);
        acc60[i] = accuracy(m, extract_ss(r60.image, ss_key()).second);
      }
    });
  }
  for (auto& th : pool) th.join();
  double a26 = 0.0, a60 = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    a26 += acc26[i] / static_cast<double>(n);
    a60 += acc60[i] / static_cast<double>(n);
  }
  std::ostringstream os;
  os << "accuracy after removal: floor 26 dB -> " << a26 << " (<=0.6), floor 60 dB -> " << a60
     << " (>=0.95); 64 seed images";
  detail = os.str();
  return a26 <= 0.6 && a60 >= 0.95;
}

bool crit10_tradeoff(std::string& detail) {
  Rng mr(1010001);
  std::vector<BitMessage> messages;
  for (int i = 0; i < 3; ++i) messages.push_back(BitMessage::random(48, mr));
  const auto combined = TransformSpec::combined(
      {TransformSpec::crop(0.5), TransformSpec::brightness(1.5), TransformSpec::jpeg(80)});
  const std::vector<double> lambdas{0.8, 0.4, 0.2, 0.1, 0.05, 0.025};

  const int n_img = 24;
  std::vector<double> psnrs, accs;
  for (const double lam : lambdas) {
    const int64_t n = static_cast<int64_t>(messages.size()) * n_img;
    std::vector<double> ps(n), ac(n);
    std::vector<std::thread> pool;
    std::atomic<int64_t> next{0};
    for (int t = 0; t < hw_jobs(); ++t) {
      pool.emplace_back([&] {
        for (;;) {
          const int64_t i = next.fetch_add(1);
          if (i >= n) return;
          const auto& m = messages[i / n_img];
          const auto& x = seed_corpus()[i % n_img];
          const ImageBuffer w = embed_ss_iterative(x, ss_key(), m, lam);
          ps[i] = std::min(psnr(x, w), 99.0);
          const ImageBuffer attacked = apply_transform(w, combined, mix_seed(123, i));
          ac[i] = accuracy(m, extract_ss(attacked, ss_key()).second);
        }
      });
    }
    for (auto& th : pool) th.join();
    double p = 0.0, a = 0.0;
    for (int64_t i = 0; i < n; ++i) {
      p += ps[i] / static_cast<double>(n);
      a += ac[i] / static_cast<double>(n);
    }
    psnrs.push_back(p);
    accs.push_back(a);
  }

  bool psnr_strictly_decreasing = true, acc_non_decreasing = true;
  for (size_t i = 1; i < lambdas.size(); ++i) {
    if (!(psnrs[i] < psnrs[i - 1])) psnr_strictly_decreasing = false;
    if (accs[i] < accs[i - 1]) acc_non_decreasing = false;
  }
  std::ostringstream os;
  os << "psnr over lambda {0.8..0.025}: [";
  for (size_t i = 0; i < psnrs.size(); ++i) os << (i ? ", " : "") << psnrs[i];
  os << "] strictly decreasing: " << (psnr_strictly_decreasing ? "yes" : "NO")
     << "; post-combined acc: [";
  for (size_t i = 0; i < accs.size(); ++i) os << (i ? ", " : "") << accs[i];
  os << "] non-decreasing: " << (acc_non_decreasing ? "yes" : "NO");
  detail = os.str();
  return psnr_strictly_decreasing && acc_non_decreasing;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "threshold anchors", 1.0, crit1_thresholds},
      {2, "FPR closed form vs exact summation and enumeration", 60.0, crit2_closed_form},
      {3, "empirical FPR, synthetic fair-coin source", 60.0, crit3_empirical_fpr},
      {4, "whitening on a constructed correlated Gaussian", 60.0, crit4_whitening},
      {5, "codec round-trips on the seed corpus", 600.0, crit5_roundtrips},
      {6, "robustness ordering", 600.0, crit6_robustness},
      {7, "identification simulation, N=1000", 60.0, crit7_identification},
      {8, "collusion marking assumption", 60.0, crit8_collusion},
      {9, "white-box removal", 300.0, crit9_removal},
      {10, "quality/robustness trade-off sweep", 600.0, crit10_tradeoff},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) {
      ok = false;
      detail += " [over runtime budget]";
    }
    std::printf("[%2d] %s  %s — %s  (%.1fs/%.0fs)\n", c.id, ok ? "PASS" : "FAIL", c.name.c_str(),
                detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
    failures += !ok;
  }
  if (failures) std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  else std::printf("all %zu criteria passed\n", criteria.size());
  return failures == 0 ? 0 : 1;
}
