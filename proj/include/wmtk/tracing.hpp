#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wmtk/bitstats.hpp"
#include "wmtk/codec.hpp"
#include "wmtk/transforms.hpp"

namespace wmtk {

/// The channel an embedded signature travels through before extraction:
/// either a real image edit, or a binary symmetric channel that abstracts
/// extraction as independent per-bit flips with accuracy p.
struct ChannelModel {
  enum class Mode { image, bsc };
  Mode mode = Mode::image;
  TransformSpec transform;     // image mode
  double bit_accuracy = 1.0;   // bsc mode, p in [0.5, 1]

  static ChannelModel image_channel(TransformSpec t);
  static ChannelModel bsc(double p);

  std::string name() const;
};

struct MetricRow {
  std::string label;
  std::vector<std::pair<std::string, double>> values;  // ordered for stable output

  void set(const std::string& key, double v) { values.emplace_back(key, v); }
};

struct ExperimentReport {
  std::string task;
  uint64_t seed = 0;
  int k = 0;
  int64_t sample_count = 0;
  double wall_clock_s = 0.0;
  std::string label_column = "label";  // header for the row-label CSV column
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<MetricRow> rows;

  void set(const std::string& key, double v) { scalars.emplace_back(key, v); }
  std::optional<double> get(const std::string& key) const;
  double at(const std::string& key) const;
};

std::string report_to_json(const ExperimentReport& rep);
std::string report_to_table(const ExperimentReport& rep);
/// Row-per-line CSV; columns are the union of row keys in first-appearance
/// order, after a leading label column.
std::string report_to_csv(const ExperimentReport& rep);

/// 95% Wilson score interval for count successes out of n.
std::pair<double, double> wilson_interval(int64_t count, int64_t n);

struct DetectionConfig {
  std::vector<double> target_fprs{1e-6};
  ChannelModel channel;
  uint64_t seed = 0;
  int n_trials = 10000;  // bsc mode only; image mode runs the corpus
  int jobs = 1;
};

/// Embed one fixed random signature, push through the channel, extract, and
/// report the TPR at the threshold matching each target FPR (the FPR itself
/// is the closed-form tail, not an empirical count).
ExperimentReport run_detection_experiment(const CodecKey& key,
                                          const std::vector<ImageBuffer>& corpus,
                                          const DetectionConfig& cfg);

struct IdentificationConfig {
  int n_users = 100;
  int n_decoys = 0;
  int images_per_user = 100;  // trials per user in bsc mode
  ChannelModel channel;
  double target_fpr = 1e-6;
  int k = 48;
  uint64_t seed = 0;
  int jobs = 1;
};

/// N-user identification: draw user signatures plus decoys, simulate
/// extraction per trial, attribute with the argmax rule at the global-FPR
/// threshold. Reports accuracy, miss rate and false accusations.
/// Image mode needs a codec key and corpus; bsc mode runs standalone.
ExperimentReport run_identification_experiment(const IdentificationConfig& cfg,
                                               const CodecKey* key = nullptr,
                                               const std::vector<ImageBuffer>* corpus = nullptr);

/// Marking-assumption collusion model for two colluders: positions where the
/// signatures agree keep the shared bit with accuracy p, disagreeing
/// positions come out as fair coins. One trial is a colluding pair observed
/// over images_per_trial merged messages; accusation scores accumulate over
/// the trial and are compared against a fresh innocent signature.
ExperimentReport run_collusion_experiment(const BitMessage& key_i, const BitMessage& key_j,
                                          double p, int64_t n_bits_total, uint64_t seed,
                                          int images_per_trial = 4);

enum class FprSource { synthetic, extractor };

/// Empirical flag rate of vanilla messages against a fixed random signature,
/// compared to the closed-form FPR at each threshold.
ExperimentReport validate_fpr_empirical(int k, const std::vector<int>& taus, int64_t n_trials,
                                        FprSource source, uint64_t seed,
                                        const CodecKey* key = nullptr,
                                        const std::vector<ImageBuffer>* corpus = nullptr);

struct RobustnessConfig {
  int n_keys = 10;  // random signatures, embedded over the whole corpus
  uint64_t seed = 0;
  int jobs = 1;
  bool iterative = false;  // spread spectrum: use the loss-driven embedder
  double lambda_i = 0.2;
};

/// Mean bit accuracy per transform, averaged over signatures and corpus.
ExperimentReport robustness_table(const CodecKey& key, const std::vector<ImageBuffer>& corpus,
                                  const std::vector<TransformSpec>& transforms,
                                  const RobustnessConfig& cfg);

}  // namespace wmtk
