#pragma once

#include <cstdint>
#include <ctime>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "senselab/sha256.hpp"

namespace senselab {

// Audit record written next to every CLI artifact. The artifacts
// themselves are deterministic for fixed seeds; the manifest carries the
// wall-clock timestamp and the artifact checksums.
struct RunManifest {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<std::string> inputs;
  std::vector<std::pair<std::string, std::string>> outputs;  // path, sha256
  std::string timestamp_utc;
};

inline std::string utc_timestamp_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

inline void add_output_checksum(RunManifest& manifest,
                                const std::string& path) {
  manifest.outputs.emplace_back(path, sha256_file_hex(path));
}

inline std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["seed"] = m.seed;
  j["config_digest"] = m.config_digest;
  j["inputs"] = m.inputs;
  j["timestamp_utc"] = m.timestamp_utc;
  auto outputs = nlohmann::json::array();
  for (const auto& [path, digest] : m.outputs) {
    outputs.push_back({{"path", path}, {"sha256", digest}});
  }
  j["outputs"] = outputs;
  return j.dump(2) + "\n";
}

inline void write_manifest(const RunManifest& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest: " + path);
  out << manifest_to_json(m);
}

}  // namespace senselab
