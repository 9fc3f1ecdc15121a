#include "wmtk/tracing.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wmtk/rng.hpp"

namespace wmtk {

namespace {

class StopWatch {
 public:
  StopWatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Chunked index-parallel loop; every index owns its output slot, so results
// are identical for any worker count.
void parallel_for(int64_t n, int jobs, const std::function<void(int64_t)>& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n < 2) {
    for (int64_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) {
    pool.emplace_back([&]() {
      for (;;) {
        const int64_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

BitMessage flip_through_bsc(const BitMessage& m, double p, Rng& rng) {
  BitMessage out = m;
  for (auto& b : out.bits) {
    if (!rng.next_bernoulli(p)) b ^= 1;
  }
  return out;
}

ImageBuffer embed_with(const CodecKey& key, const ImageBuffer& x, const BitMessage& m,
                       const RobustnessConfig* rcfg = nullptr) {
  if (key.kind == CodecKind::dctdwt) return embed_dctdwt(x, key, m);
  if (rcfg && rcfg->iterative) return embed_ss_iterative(x, key, m, rcfg->lambda_i);
  return embed_ss_additive(x, key, m);
}

BitMessage extract_with(const CodecKey& key, const ImageBuffer& x) {
  if (key.kind == CodecKind::dctdwt) return extract_dctdwt(x, key);
  return extract_ss(x, key).second;
}

double bit_accuracy(const BitMessage& truth, const BitMessage& got) {
  return static_cast<double>(match_bits(truth, got)) / truth.k();
}

}  // namespace

ChannelModel ChannelModel::image_channel(TransformSpec t) {
  ChannelModel c;
  c.mode = Mode::image;
  c.transform = std::move(t);
  return c;
}

ChannelModel ChannelModel::bsc(double p) {
  if (p < 0.5 || p > 1.0) throw std::invalid_argument("ChannelModel::bsc: p must lie in [0.5,1]");
  ChannelModel c;
  c.mode = Mode::bsc;
  c.bit_accuracy = p;
  return c;
}

std::string ChannelModel::name() const {
  if (mode == Mode::bsc) {
    std::ostringstream os;
    os << "bsc_p" << bit_accuracy;
    return os.str();
  }
  return transform.name();
}

std::optional<double> ExperimentReport::get(const std::string& key) const {
  for (const auto& [k2, v] : scalars) {
    if (k2 == key) return v;
  }
  return std::nullopt;
}

double ExperimentReport::at(const std::string& key) const {
  if (auto v = get(key)) return *v;
  throw std::out_of_range("ExperimentReport: no scalar '" + key + "'");
}

std::string report_to_json(const ExperimentReport& rep) {
  nlohmann::json j;
  j["task"] = rep.task;
  j["seed"] = rep.seed;
  j["k"] = rep.k;
  j["sample_count"] = rep.sample_count;
  j["wall_clock_s"] = rep.wall_clock_s;
  nlohmann::json scalars = nlohmann::json::object();
  for (const auto& [k2, v] : rep.scalars) scalars[k2] = v;
  j["scalars"] = scalars;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : rep.rows) {
    nlohmann::json r;
    r["label"] = row.label;
    for (const auto& [k2, v] : row.values) r[k2] = v;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

namespace {

std::vector<std::string> column_order(const ExperimentReport& rep) {
  std::vector<std::string> cols;
  for (const auto& row : rep.rows) {
    for (const auto& [k, v] : row.values) {
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    }
  }
  return cols;
}

std::string format_value(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

std::string report_to_table(const ExperimentReport& rep) {
  const auto cols = column_order(rep);
  size_t label_w = 4;
  for (const auto& row : rep.rows) label_w = std::max(label_w, row.label.size());
  std::vector<size_t> widths(cols.size());
  for (size_t c = 0; c < cols.size(); ++c) widths[c] = std::max<size_t>(cols[c].size(), 10);

  std::ostringstream os;
  os << rep.task << "  (n=" << rep.sample_count << ", seed=" << rep.seed << ")\n";
  for (const auto& [k, v] : rep.scalars) os << "  " << k << " = " << format_value(v) << "\n";
  if (rep.rows.empty()) return os.str();

  os << std::left << std::setw(static_cast<int>(label_w) + 2) << "";
  for (size_t c = 0; c < cols.size(); ++c)
    os << std::right << std::setw(static_cast<int>(widths[c]) + 2) << cols[c];
  os << "\n";
  for (const auto& row : rep.rows) {
    os << std::left << std::setw(static_cast<int>(label_w) + 2) << row.label;
    for (size_t c = 0; c < cols.size(); ++c) {
      std::string cell = "-";
      for (const auto& [k, v] : row.values) {
        if (k == cols[c]) {
          cell = format_value(v);
          break;
        }
      }
      os << std::right << std::setw(static_cast<int>(widths[c]) + 2) << cell;
    }
    os << "\n";
  }
  return os.str();
}

std::string report_to_csv(const ExperimentReport& rep) {
  const auto cols = column_order(rep);
  std::ostringstream os;
  os << rep.label_column;
  for (const auto& c : cols) os << "," << c;
  os << "\n";
  for (const auto& row : rep.rows) {
    os << row.label;
    for (const auto& c : cols) {
      os << ",";
      for (const auto& [k, v] : row.values) {
        if (k == c) {
          os << std::setprecision(12) << v;
          break;
        }
      }
    }
    os << "\n";
  }
  return os.str();
}

std::pair<double, double> wilson_interval(int64_t count, int64_t n) {
  if (n <= 0) throw std::invalid_argument("wilson_interval: n must be > 0");
  constexpr double z = 1.959963984540054;  // 95%
  const double phat = static_cast<double>(count) / n;
  const double z2n = z * z / n;
  const double center = (phat + z2n / 2.0) / (1.0 + z2n);
  const double half =
      z * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n)) / (1.0 + z2n);
  double lo = std::max(0.0, center - half);
  double hi = std::min(1.0, center + half);
  if (count == 0) lo = 0.0;
  if (count == n) hi = 1.0;
  return {lo, hi};
}

// ---------------------------------------------------------------------------

ExperimentReport run_detection_experiment(const CodecKey& key,
                                          const std::vector<ImageBuffer>& corpus,
                                          const DetectionConfig& cfg) {
  StopWatch watch;
  const int k = key.k;
  Rng setup(mix_seed(cfg.seed, 0xDE7E));
  const BitMessage m = BitMessage::random(k, setup);

  std::vector<int> taus;
  for (double f : cfg.target_fprs) taus.push_back(threshold_for_fpr(k, f, 1));

  int64_t n = 0;
  std::vector<int> scores;
  double acc_sum = 0.0;

  if (cfg.channel.mode == ChannelModel::Mode::bsc) {
    n = cfg.n_trials;
    scores.resize(n);
    std::vector<double> accs(n);
    parallel_for(n, cfg.jobs, [&](int64_t i) {
      Rng rng(mix_seed(cfg.seed, 0x100 + i));
      const BitMessage got = flip_through_bsc(m, cfg.channel.bit_accuracy, rng);
      scores[i] = match_bits(m, got);
      accs[i] = bit_accuracy(m, got);
    });
    for (double a : accs) acc_sum += a;
  } else {
    if (corpus.empty()) throw std::invalid_argument("run_detection_experiment: empty corpus");
    n = static_cast<int64_t>(corpus.size());
    scores.resize(n);
    std::vector<double> accs(n);
    parallel_for(n, cfg.jobs, [&](int64_t i) {
      const ImageBuffer watermarked = embed_with(key, corpus[i], m);
      const ImageBuffer attacked =
          apply_transform(watermarked, cfg.channel.transform, mix_seed(cfg.seed, 0x200 + i));
      const BitMessage got = extract_with(key, attacked);
      scores[i] = match_bits(m, got);
      accs[i] = bit_accuracy(m, got);
    });
    for (double a : accs) acc_sum += a;
  }

  ExperimentReport rep;
  rep.task = "detection/" + cfg.channel.name();
  rep.seed = cfg.seed;
  rep.k = k;
  rep.sample_count = n;
  rep.label_column = "transform";
  rep.set("bit_accuracy", acc_sum / static_cast<double>(n));
  for (size_t t = 0; t < taus.size(); ++t) {
    int64_t flagged = 0;
    for (int s : scores) flagged += (s >= taus[t]);
    const double tpr = static_cast<double>(flagged) / static_cast<double>(n);
    const auto [lo, hi] = wilson_interval(flagged, n);
    MetricRow row;
    row.label = cfg.channel.name();
    row.set("tau", taus[t]);
    row.set("fpr_theoretical", fpr_of_threshold(k, taus[t]));
    row.set("tpr", tpr);
    row.set("target_fpr", cfg.target_fprs[t]);
    row.set("tpr_wilson_lo", lo);
    row.set("tpr_wilson_hi", hi);
    rep.rows.push_back(std::move(row));
  }
  rep.wall_clock_s = watch.seconds();
  return rep;
}

ExperimentReport run_identification_experiment(const IdentificationConfig& cfg,
                                               const CodecKey* key,
                                               const std::vector<ImageBuffer>* corpus) {
  StopWatch watch;
  if (cfg.n_users < 1) throw std::invalid_argument("identification: n_users must be >= 1");
  const int k = key ? key->k : cfg.k;
  const int n_total = cfg.n_users + cfg.n_decoys;
  const int tau = threshold_for_fpr(k, cfg.target_fpr, n_total);

  Rng setup(mix_seed(cfg.seed, 0x1DE2));
  std::vector<BitMessage> signatures;
  signatures.reserve(n_total);
  for (int i = 0; i < n_total; ++i) signatures.push_back(BitMessage::random(k, setup));

  // packed copies make the argmax over large N cheap
  const bool packed_ok = k <= 64;
  std::vector<uint64_t> packed;
  if (packed_ok) {
    packed.reserve(n_total);
    for (const auto& s : signatures) packed.push_back(s.packed());
  }

  const int64_t n_trials = static_cast<int64_t>(cfg.n_users) * cfg.images_per_user;
  std::vector<uint8_t> outcome(n_trials);  // 0 = miss, 1 = correct, 2 = false accusation
  enum : uint8_t { kMiss = 0, kCorrect = 1, kFalseAccuse = 2 };

  auto classify = [&](int user, const BitMessage& extracted) -> uint8_t {
    IdentificationVerdict v;
    if (packed_ok) {
      const uint64_t ep = extracted.packed();
      int best = -1, best_score = -1;
      for (int i = 0; i < n_total; ++i) {
        const int s = k - std::popcount(ep ^ packed[i]);
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      v.best_score = best_score;
      v.flagged = best_score >= tau;
      if (v.flagged) v.best_index = best;
    } else {
      v = identify(extracted, signatures, tau);
    }
    if (!v.flagged) return kMiss;
    return *v.best_index == user ? kCorrect : kFalseAccuse;
  };

  if (cfg.channel.mode == ChannelModel::Mode::bsc) {
    parallel_for(n_trials, cfg.jobs, [&](int64_t t) {
      const int user = static_cast<int>(t % cfg.n_users);
      Rng rng(mix_seed(cfg.seed, 0x300 + t));
      const BitMessage extracted =
          flip_through_bsc(signatures[user], cfg.channel.bit_accuracy, rng);
      outcome[t] = classify(user, extracted);
    });
  } else {
    if (!key || !corpus || corpus->empty()) {
      throw std::invalid_argument("identification: image mode needs a codec key and corpus");
    }
    parallel_for(n_trials, cfg.jobs, [&](int64_t t) {
      const int user = static_cast<int>(t % cfg.n_users);
      Rng rng(mix_seed(cfg.seed, 0x400 + t));
      const ImageBuffer& src = (*corpus)[rng.next_below(corpus->size())];
      const ImageBuffer watermarked = embed_with(*key, src, signatures[user]);
      const ImageBuffer attacked =
          apply_transform(watermarked, cfg.channel.transform, mix_seed(cfg.seed, 0x500 + t));
      outcome[t] = classify(user, extract_with(*key, attacked));
    });
  }

  int64_t correct = 0, miss = 0, accuse = 0;
  for (uint8_t o : outcome) {
    if (o == kCorrect) ++correct;
    else if (o == kMiss) ++miss;
    else ++accuse;
  }

  ExperimentReport rep;
  rep.task = "identification/" + cfg.channel.name();
  rep.seed = cfg.seed;
  rep.k = k;
  rep.sample_count = n_trials;
  rep.set("n_users", cfg.n_users);
  rep.set("n_decoys", cfg.n_decoys);
  rep.set("tau", tau);
  rep.set("target_fpr", cfg.target_fpr);
  rep.set("accuracy", static_cast<double>(correct) / static_cast<double>(n_trials));
  rep.set("miss_rate", static_cast<double>(miss) / static_cast<double>(n_trials));
  rep.set("false_accusations", static_cast<double>(accuse));
  const auto [lo, hi] = wilson_interval(correct, n_trials);
  rep.set("accuracy_wilson_lo", lo);
  rep.set("accuracy_wilson_hi", hi);
  if (cfg.channel.mode == ChannelModel::Mode::bsc) {
    rep.set("analytic_accuracy", binomial_tail_ge(k, tau, cfg.channel.bit_accuracy));
  }
  rep.wall_clock_s = watch.seconds();
  return rep;
}

ExperimentReport run_collusion_experiment(const BitMessage& key_i, const BitMessage& key_j,
                                          double p, int64_t n_bits_total, uint64_t seed,
                                          int images_per_trial) {
  StopWatch watch;
  const int k = key_i.k();
  if (key_j.k() != k) throw std::invalid_argument("collusion: signature lengths differ");
  if (n_bits_total < k) throw std::invalid_argument("collusion: need at least k bits");
  if (p < 0.5 || p > 1.0) throw std::invalid_argument("collusion: p must lie in [0.5,1]");
  if (images_per_trial < 1) throw std::invalid_argument("collusion: images_per_trial must be >= 1");

  const int64_t bits_per_trial = static_cast<int64_t>(k) * images_per_trial;
  const int64_t trials = (n_bits_total + bits_per_trial - 1) / bits_per_trial;
  int64_t agree_positions = 0, agree_kept = 0;
  int64_t disagree_positions = 0, disagree_ones = 0;
  int64_t both_outscore = 0;
  int64_t images = 0;
  double sum_si = 0.0, sum_sj = 0.0, sum_innocent = 0.0;

  for (int64_t t = 0; t < trials; ++t) {
    Rng rng(mix_seed(seed, 0x600 + t));
    const BitMessage innocent = BitMessage::random(k, rng);
    int64_t si = 0, sj = 0, sn = 0;  // accumulated over the trial's images
    for (int img = 0; img < images_per_trial; ++img) {
      BitMessage merged;
      merged.bits.resize(k);
      for (int b = 0; b < k; ++b) {
        if (key_i.bits[b] == key_j.bits[b]) {
          ++agree_positions;
          const bool keep = rng.next_bernoulli(p);
          merged.bits[b] = keep ? key_i.bits[b] : (key_i.bits[b] ^ 1);
          agree_kept += keep;
        } else {
          ++disagree_positions;
          merged.bits[b] = static_cast<uint8_t>(rng.next_bit());
          disagree_ones += merged.bits[b];
        }
      }
      si += match_bits(merged, key_i);
      sj += match_bits(merged, key_j);
      sn += match_bits(merged, innocent);
      ++images;
    }
    sum_si += si;
    sum_sj += sj;
    sum_innocent += sn;
    both_outscore += (si > sn && sj > sn);
  }

  ExperimentReport rep;
  rep.task = "collusion";
  rep.seed = seed;
  rep.k = k;
  rep.sample_count = images * k;
  rep.set("p", p);
  rep.set("trials", static_cast<double>(trials));
  rep.set("images_per_trial", images_per_trial);
  rep.set("agree_positions", static_cast<double>(agree_positions));
  rep.set("disagree_positions", static_cast<double>(disagree_positions));
  if (agree_positions > 0) {
    rep.set("agree_keep_freq", static_cast<double>(agree_kept) / agree_positions);
  }
  if (disagree_positions > 0) {
    rep.set("disagree_one_freq", static_cast<double>(disagree_ones) / disagree_positions);
  }
  // per-image means, so the numbers stay on the 0..k scale
  rep.set("mean_score_colluder_i", sum_si / static_cast<double>(images));
  rep.set("mean_score_colluder_j", sum_sj / static_cast<double>(images));
  rep.set("mean_score_innocent", sum_innocent / static_cast<double>(images));
  rep.set("both_outscore_innocent_rate", static_cast<double>(both_outscore) / trials);
  rep.wall_clock_s = watch.seconds();
  return rep;
}

ExperimentReport validate_fpr_empirical(int k, const std::vector<int>& taus, int64_t n_trials,
                                        FprSource source, uint64_t seed, const CodecKey* key,
                                        const std::vector<ImageBuffer>* corpus) {
  StopWatch watch;
  if (n_trials < 10000 && source == FprSource::synthetic) {
    throw std::invalid_argument("validate_fpr_empirical: need at least 1e4 trials");
  }
  Rng setup(mix_seed(seed, 0xF9));
  const BitMessage signature = BitMessage::random(k, setup);

  std::vector<int64_t> flag_counts(taus.size(), 0);
  int64_t n = 0;

  if (source == FprSource::synthetic) {
    n = n_trials;
    if (k <= 64) {
      const uint64_t sp = signature.packed();
      const uint64_t mask = k == 64 ? ~0ull : ((1ull << k) - 1);
      Rng rng(mix_seed(seed, 0xFA));
      for (int64_t t = 0; t < n; ++t) {
        const uint64_t msg = rng.next_u64() & mask;
        const int m = k - std::popcount((msg ^ sp) & mask);
        for (size_t i = 0; i < taus.size(); ++i) flag_counts[i] += (m >= taus[i]);
      }
    } else {
      Rng rng(mix_seed(seed, 0xFA));
      for (int64_t t = 0; t < n; ++t) {
        const BitMessage msg = BitMessage::random(k, rng);
        const int m = match_bits(msg, signature);
        for (size_t i = 0; i < taus.size(); ++i) flag_counts[i] += (m >= taus[i]);
      }
    }
  } else {
    if (!key || !corpus || corpus->empty()) {
      throw std::invalid_argument("validate_fpr_empirical: extractor mode needs key and corpus");
    }
    n = static_cast<int64_t>(corpus->size());
    for (const auto& img : *corpus) {
      const BitMessage msg = extract_ss(img, *key).second;
      const int m = match_bits(msg, signature);
      for (size_t i = 0; i < taus.size(); ++i) flag_counts[i] += (m >= taus[i]);
    }
  }

  ExperimentReport rep;
  rep.task = source == FprSource::synthetic ? "validate_fpr/synthetic" : "validate_fpr/extractor";
  rep.seed = seed;
  rep.k = k;
  rep.sample_count = n;
  for (size_t i = 0; i < taus.size(); ++i) {
    const double theory = fpr_of_threshold(k, taus[i]);
    const double emp = static_cast<double>(flag_counts[i]) / static_cast<double>(n);
    const auto [lo, hi] = wilson_interval(flag_counts[i], n);
    MetricRow row;
    row.label = "tau_" + std::to_string(taus[i]);
    row.set("tau", taus[i]);
    row.set("fpr_theoretical", theory);
    row.set("fpr_empirical", emp);
    row.set("ratio", theory > 0 ? emp / theory : 0.0);
    row.set("wilson_lo", lo);
    row.set("wilson_hi", hi);
    rep.rows.push_back(std::move(row));
  }
  rep.wall_clock_s = watch.seconds();
  return rep;
}

ExperimentReport robustness_table(const CodecKey& key, const std::vector<ImageBuffer>& corpus,
                                  const std::vector<TransformSpec>& transforms,
                                  const RobustnessConfig& cfg) {
  StopWatch watch;
  if (corpus.empty() || transforms.empty()) {
    throw std::invalid_argument("robustness_table: corpus and transforms must be non-empty");
  }
  Rng setup(mix_seed(cfg.seed, 0x7AB1));
  std::vector<BitMessage> messages;
  for (int i = 0; i < cfg.n_keys; ++i) messages.push_back(BitMessage::random(key.k, setup));

  const int64_t n_pairs = static_cast<int64_t>(cfg.n_keys) * corpus.size();
  std::vector<std::vector<double>> acc(transforms.size(), std::vector<double>(n_pairs));
  std::vector<double> psnrs(n_pairs), ssims(n_pairs);

  parallel_for(n_pairs, cfg.jobs, [&](int64_t idx) {
    const int mi = static_cast<int>(idx / corpus.size());
    const int ii = static_cast<int>(idx % corpus.size());
    const ImageBuffer& x = corpus[ii];
    const ImageBuffer watermarked = embed_with(key, x, messages[mi], &cfg);
    psnrs[idx] = psnr(x, watermarked);
    ssims[idx] = ssim(x, watermarked);
    for (size_t ti = 0; ti < transforms.size(); ++ti) {
      const ImageBuffer attacked =
          apply_transform(watermarked, transforms[ti], mix_seed(cfg.seed, 0x700 + idx));
      acc[ti][idx] = bit_accuracy(messages[mi], extract_with(key, attacked));
    }
  });

  ExperimentReport rep;
  rep.task = std::string("robustness/") +
             (key.kind == CodecKind::dctdwt ? "dctdwt" : "spreadspectrum");
  rep.label_column = "transform";
  rep.seed = cfg.seed;
  rep.k = key.k;
  rep.sample_count = n_pairs;
  double psum = 0.0, ssum = 0.0;
  int64_t finite_p = 0;
  for (int64_t i = 0; i < n_pairs; ++i) {
    if (std::isfinite(psnrs[i])) {
      psum += psnrs[i];
      ++finite_p;
    }
    ssum += ssims[i];
  }
  rep.set("psnr_mean", finite_p ? psum / static_cast<double>(finite_p)
                                : std::numeric_limits<double>::infinity());
  rep.set("ssim_mean", ssum / static_cast<double>(n_pairs));
  rep.set("n_messages", cfg.n_keys);
  for (size_t ti = 0; ti < transforms.size(); ++ti) {
    double a = 0.0;
    for (double v : acc[ti]) a += v;
    MetricRow row;
    row.label = transforms[ti].name();
    row.set("bit_accuracy", a / static_cast<double>(n_pairs));
    rep.rows.push_back(std::move(row));
  }
  rep.wall_clock_s = watch.seconds();
  return rep;
}

}  // namespace wmtk
