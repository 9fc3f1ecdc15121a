#pragma once

#include <string>

#include "wmtk/image.hpp"

namespace wmtk {

/// Load a PNG or binary PPM (P6) file; 8-bit channels map to [0,1] by v/255.
ImageBuffer load_image(const std::string& path);

/// Write by extension: ".png" or ".ppm". Values map back by round(v*255).
void save_image(const ImageBuffer& img, const std::string& path);

ImageBuffer load_png(const std::string& path);
void save_png(const ImageBuffer& img, const std::string& path);
ImageBuffer load_ppm(const std::string& path);
void save_ppm(const ImageBuffer& img, const std::string& path);

}  // namespace wmtk
