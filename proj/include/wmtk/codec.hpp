#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "wmtk/bitstats.hpp"
#include "wmtk/image.hpp"
#include "wmtk/whitening.hpp"

namespace wmtk {

enum class CodecKind { dctdwt, spreadspectrum };

struct KeygenParams {
  double alpha = 0.03;          // spread-spectrum embedding strength
  double delta = 36.0 / 255.0;  // QIM step (dctdwt)
  int canonical_size = 256;     // carrier frame side
};

/// Secret material for one user. Carriers are regenerated from the seed and
/// never serialized; the optional whitening transform is fitted separately
/// and travels with the key.
struct CodecKey {
  CodecKind kind = CodecKind::spreadspectrum;
  int k = 0;
  uint64_t seed = 0;
  double alpha = 0.03;
  double delta = 36.0 / 255.0;
  int canonical_size = 256;
  std::optional<WhiteningTransform> whitening;
  std::vector<std::vector<double>> carriers;  // k planes of canonical_size^2
};

/// Pre-threshold extractor outputs (whitened when the key carries a
/// whitening transform).
struct SoftMessage {
  std::vector<double> values;
};

/// Deterministic key from (kind, k, seed, params). Spread-spectrum carriers
/// are seeded Gaussian fields, 9x9 Gaussian (sigma 2) low-passed, de-meaned,
/// Gram-Schmidt orthogonalized and scaled to unit RMS.
CodecKey keygen(CodecKind kind, int k, uint64_t seed, const KeygenParams& params = {});

/// The signature this key embeds by default; derived from the key seed the
/// same way carriers are, so `embed` and `detect` agree without shipping the
/// message in the key file.
BitMessage key_default_message(const CodecKey& key);

// --- DCT-DWT quantization codec -------------------------------------------

int dctdwt_capacity(int height, int width);

ImageBuffer embed_dctdwt(const ImageBuffer& x, const CodecKey& key, const BitMessage& m);
BitMessage extract_dctdwt(const ImageBuffer& x, const CodecKey& key);

// --- whitened spread-spectrum codec ----------------------------------------

/// Raw (pre-whitening) correlations of the high-passed canonical luminance
/// with each carrier. Affine in the input pixels.
std::vector<double> ss_soft_raw(const ImageBuffer& x, const CodecKey& key);

/// Adjoint of ss_soft_raw: maps a k-vector of output sensitivities to an
/// H x W x 3 pixel gradient. Exact transpose of the forward linear map.
ImageBuffer ss_soft_adjoint(const CodecKey& key, const std::vector<double>& v, int height,
                            int width);

std::pair<SoftMessage, BitMessage> extract_ss(const ImageBuffer& x, const CodecKey& key);

ImageBuffer embed_ss_additive(const ImageBuffer& x, const CodecKey& key, const BitMessage& m);

/// Gradient descent on pixels against BCE(sigmoid(soft), m) plus
/// lambda_i times the squared distortion; JND-modulated steps; returns the
/// best iterate by loss (the unmodified input counts as an iterate).
ImageBuffer embed_ss_iterative(const ImageBuffer& x, const CodecKey& key, const BitMessage& m,
                               double lambda_i, int steps = 10, double learning_rate = 0.1);

double bce_message_loss(const SoftMessage& soft, const BitMessage& m);

/// Fit the key's whitening transform from raw extractor outputs over a
/// corpus of non-watermarked images.
WhiteningTransform fit_ss_whitening(const CodecKey& key,
                                    const std::vector<ImageBuffer>& vanilla_corpus,
                                    double eigen_floor = -1.0);

// --- white-box attacks ------------------------------------------------------

struct AttackResult {
  ImageBuffer image;
  bool moved = false;  // false when the distortion budget admits no step
};

/// Push the extractor output toward a random signature, under a PSNR floor
/// relative to the watermarked input.
AttackResult adversarial_remove(const ImageBuffer& x_w, const CodecKey& key, double psnr_floor,
                                uint64_t seed);

/// Push the extractor output toward victim_m on a vanilla image, under a
/// PSNR floor relative to the input.
AttackResult adversarial_forge(const ImageBuffer& x, const CodecKey& key,
                               const BitMessage& victim_m, double psnr_floor);

}  // namespace wmtk
