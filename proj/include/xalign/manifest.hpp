#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace xalign {

inline constexpr const char* kToolkitVersion = "0.1.0";

struct ArtifactRecord {
  std::string path;  // relative to the run directory
  std::string sha256;
};

// Index of everything a run produced. Artifact hashes are content hashes, so
// two runs of one config can be compared directly; timestamps and timings are
// kept apart from them.
struct RunManifest {
  std::string config_hash;
  std::string toolkit_version = kToolkitVersion;
  nlohmann::json seeds = nlohmann::json::object();
  std::map<std::string, ArtifactRecord> artifacts;
  std::map<std::string, std::string> timestamps;
  std::map<std::string, double> timings;

  // Hashes the file and records it under key.
  void record(const std::filesystem::path& run_dir, const std::string& key, const std::filesystem::path& file);
  // Keys whose file is gone or whose content changed.
  std::vector<std::string> stale(const std::filesystem::path& run_dir) const;
  void stamp(const std::string& stage, double seconds);

  nlohmann::ordered_json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& run_dir) const;
  static RunManifest load(const std::filesystem::path& run_dir);
};

}  // namespace xalign
