#include "wmtk/keyfile.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace wmtk {

namespace {
constexpr int kKeyFileVersion = 1;

std::string kind_name(CodecKind k) {
  return k == CodecKind::dctdwt ? "dctdwt" : "spreadspectrum";
}

CodecKind kind_from_name(const std::string& s) {
  if (s == "dctdwt") return CodecKind::dctdwt;
  if (s == "spreadspectrum") return CodecKind::spreadspectrum;
  throw std::runtime_error("key file: unknown codec_kind '" + s + "'");
}
}  // namespace

std::string key_to_json(const CodecKey& key) {
  nlohmann::json j;
  j["version"] = kKeyFileVersion;
  j["codec_kind"] = kind_name(key.kind);
  j["k"] = key.k;
  j["seed"] = key.seed;
  j["alpha"] = key.alpha;
  j["delta"] = key.delta;
  j["canonical_size"] = key.canonical_size;
  if (key.whitening) {
    j["whitening"] = {{"weight", key.whitening->weight},
                      {"bias", key.whitening->bias},
                      {"eigen_floor", key.whitening->eigen_floor}};
  }
  return j.dump(2) + "\n";
}

CodecKey key_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  if (j.at("version").get<int>() != kKeyFileVersion) {
    throw std::runtime_error("key file: unsupported version");
  }
  KeygenParams params;
  params.alpha = j.at("alpha").get<double>();
  params.delta = j.at("delta").get<double>();
  params.canonical_size = j.at("canonical_size").get<int>();
  CodecKey key = keygen(kind_from_name(j.at("codec_kind").get<std::string>()),
                        j.at("k").get<int>(), j.at("seed").get<uint64_t>(), params);
  if (j.contains("whitening")) {
    WhiteningTransform t;
    t.k = key.k;
    t.weight = j["whitening"].at("weight").get<std::vector<double>>();
    t.bias = j["whitening"].at("bias").get<std::vector<double>>();
    t.eigen_floor = j["whitening"].value("eigen_floor", 0.0);
    if (t.weight.size() != static_cast<size_t>(key.k) * key.k ||
        t.bias.size() != static_cast<size_t>(key.k)) {
      throw std::runtime_error("key file: whitening dimensions inconsistent with k");
    }
    key.whitening = std::move(t);
  }
  return key;
}

void save_key(const CodecKey& key, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_key: cannot open " + path);
  out << key_to_json(key);
}

CodecKey load_key(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_key: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return key_from_json(ss.str());
}

}  // namespace wmtk
