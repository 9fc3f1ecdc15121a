#pragma once

#include <cstdint>
#include <vector>

#include "wmtk/image.hpp"

namespace wmtk {

/// Deterministic photography-like test image: layered smooth value noise,
/// a color ramp, soft blobs and a textured patch. Same (h, w, seed) always
/// produces the same pixels.
ImageBuffer synthetic_image(int h, int w, uint64_t seed);

/// n images derived from one corpus seed.
std::vector<ImageBuffer> synthetic_corpus(int n, int h, int w, uint64_t seed);

}  // namespace wmtk
