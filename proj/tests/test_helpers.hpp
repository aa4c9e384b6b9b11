#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "xalign/backend.hpp"
#include "xalign/toy_transformer.hpp"

namespace xalign::testing {

inline ToyConfig small_toy_config(std::uint64_t seed = 7) {
  ToyConfig c;
  c.n_layers = 2;
  c.width = 16;
  c.n_heads = 2;
  c.ffn_width = 32;
  c.seed = seed;
  return c;
}

inline ModelHandle toy_handle(ToyConfig config = {}) {
  return ModelHandle("toy", std::make_shared<ToyTransformer>(config));
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("xalign-" + tag + "-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace xalign::testing
