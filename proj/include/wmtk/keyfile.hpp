#pragma once

#include <string>

#include "wmtk/codec.hpp"

namespace wmtk {

/// Versioned JSON key file. Carriers are regenerated from the seed on load,
/// never stored; the whitening transform is stored as decimal arrays.
std::string key_to_json(const CodecKey& key);
CodecKey key_from_json(const std::string& text);

void save_key(const CodecKey& key, const std::string& path);
CodecKey load_key(const std::string& path);

}  // namespace wmtk
