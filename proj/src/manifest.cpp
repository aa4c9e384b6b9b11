#include "xalign/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include "xalign/error.hpp"
#include "xalign/hash.hpp"

namespace xalign {

void RunManifest::record(const std::filesystem::path& run_dir, const std::string& key,
                         const std::filesystem::path& file) {
  artifacts[key] = {std::filesystem::relative(file, run_dir).generic_string(), sha256_file(file)};
}

std::vector<std::string> RunManifest::stale(const std::filesystem::path& run_dir) const {
  std::vector<std::string> out;
  for (const auto& [key, a] : artifacts) {
    const auto p = run_dir / a.path;
    if (!std::filesystem::exists(p) || sha256_file(p) != a.sha256) out.push_back(key);
  }
  return out;
}

void RunManifest::stamp(const std::string& stage, double seconds) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  timestamps[stage] = buf;
  timings[stage] = seconds;
}

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["toolkit_version"] = toolkit_version;
  j["seeds"] = seeds;
  nlohmann::ordered_json arts = nlohmann::ordered_json::object();
  for (const auto& [key, a] : artifacts) arts[key] = {{"path", a.path}, {"sha256", a.sha256}};
  j["artifacts"] = arts;
  j["timestamps"] = timestamps;
  j["timings_seconds"] = timings;
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    m.seeds = j.value("seeds", nlohmann::json::object());
    for (const auto& [key, a] : j.at("artifacts").items())
      m.artifacts[key] = {a.at("path").get<std::string>(), a.at("sha256").get<std::string>()};
    m.timestamps = j.value("timestamps", std::map<std::string, std::string>{});
    m.timings = j.value("timings_seconds", std::map<std::string, double>{});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

void RunManifest::save(const std::filesystem::path& run_dir) const {
  std::filesystem::create_directories(run_dir);
  const auto tmp = run_dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write manifest in " + run_dir.string());
    out << to_json().dump(2) << '\n';
  }
  std::filesystem::rename(tmp, run_dir / "manifest.json");
}

RunManifest RunManifest::load(const std::filesystem::path& run_dir) {
  std::ifstream in(run_dir / "manifest.json");
  if (!in) throw DataError("no manifest in " + run_dir.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace xalign
