#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace xalign {

// One adapted weight matrix: delta = (alpha / rank) * B * A.
struct LoraFactor {
  std::string target;
  std::size_t out_dim = 0;
  std::size_t in_dim = 0;
  std::vector<double> a;  // rank x in_dim, row-major
  std::vector<double> b;  // out_dim x rank, row-major

  friend bool operator==(const LoraFactor&, const LoraFactor&) = default;
};

struct AdapterWeights {
  std::string architecture;        // backend architecture string it was trained against
  std::string config_fingerprint;  // fingerprint of the producing TuningConfig
  std::size_t rank = 0;
  double alpha = 0.0;
  std::vector<LoraFactor> factors;

  double scale() const { return rank == 0 ? 0.0 : alpha / static_cast<double>(rank); }
  const LoraFactor* find(const std::string& target) const;
  // Same shapes, all entries zero. Used as a gradient buffer.
  AdapterWeights zeros_like() const;

  friend bool operator==(const AdapterWeights&, const AdapterWeights&) = default;
};

// Versioned little-endian blob: "XALNADPT", u32 version, then fields.
void save_adapter(const std::filesystem::path& path, const AdapterWeights& adapter);
AdapterWeights load_adapter(const std::filesystem::path& path);

}  // namespace xalign
