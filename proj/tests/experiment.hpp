#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "xalign/config.hpp"
#include "xalign/corpus.hpp"
#include "xalign/synthetic.hpp"

namespace xalign::testing {

struct DataSizes {
  std::size_t train = 60;
  std::size_t test = 20;
  std::size_t fewshot = 16;
};

// Writes train/test/fewshot directories of synthetic data under root.
inline void write_synthetic_dirs(const std::filesystem::path& root, TaskKind task,
                                 const std::vector<std::string>& langs, DataSizes sizes = {}) {
  std::vector<LanguageCode> codes;
  for (const auto& l : langs) codes.emplace_back(l);
  const struct {
    const char* dir;
    std::size_t n;
    std::uint64_t seed;
    const char* prefix;
  } splits[] = {{"train", sizes.train, 11, "tr"}, {"test", sizes.test, 12, "te"}, {"fewshot", sizes.fewshot, 13, "fs"}};
  for (const auto& s : splits) {
    const auto data = generate_synthetic_dataset(task, codes, s.n, s.seed, s.prefix);
    std::filesystem::create_directories(root / s.dir);
    for (const auto& [lang, rows] : data) write_task_dataset(root / s.dir / (lang.str() + ".jsonl"), rows);
  }
}

// A four-language emotion experiment on a two-layer toy model.
inline nlohmann::json small_experiment() {
  return nlohmann::json::parse(R"({
    "model": {"toy": {"n_layers": 2, "width": 16, "n_heads": 2, "ffn_width": 32, "seed": 5}},
    "languages": ["en", "zh", "de", "sw"],
    "source_languages": ["zh", "de"],
    "target_language": "en",
    "task": "emotion",
    "data": {"train_dir": "data/train", "test_dir": "data/test", "fewshot_dir": "data/fewshot",
             "train_size": 30, "test_size": 8},
    "few_shot": {"k": 2},
    "tuning": {"epochs": 1, "batch_size": 8},
    "lens": {"languages": ["zh", "sw"], "n_instances": 4},
    "geometry": {"layers": [1, 2], "n_instances": 8},
    "workers": 2
  })");
}

inline std::filesystem::path write_config(const std::filesystem::path& dir, const nlohmann::json& j) {
  const auto path = dir / "config.json";
  std::ofstream(path) << j.dump(2);
  return path;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace xalign::testing
