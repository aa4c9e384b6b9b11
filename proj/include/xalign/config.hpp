#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xalign/geometry.hpp"
#include "xalign/language.hpp"
#include "xalign/prompting.hpp"
#include "xalign/task.hpp"
#include "xalign/toy_transformer.hpp"
#include "xalign/tuning.hpp"

namespace xalign {

struct ModelConfig {
  std::string id = "toy";
  std::string backend = "toy";  // toy | random
  ToyConfig toy;
  std::optional<std::filesystem::path> weights;  // toy blob; overrides the toy section
};

struct DataConfig {
  std::filesystem::path train_dir;  // {lang}.jsonl per language
  std::filesystem::path test_dir;
  std::optional<std::filesystem::path> fewshot_dir;  // defaults to train_dir
  std::size_t train_size = 10000;                    // pairs per direction
  std::optional<std::size_t> test_size = 500;        // null keeps every test instance
  bool same_train_instances = true;                  // one id sample shared by every direction
};

struct Seeds {
  std::uint64_t data = 1;
  std::uint64_t training = 2;
  std::uint64_t few_shot = 3;
};

struct LensConfig {
  std::vector<LanguageCode> languages;
  std::optional<std::size_t> n_instances;
  OutputType target_output = OutputType::kSameLanguage;
  OutputType latent_output = OutputType::kEnglish;
};

struct GeometryConfig {
  std::vector<LanguageCode> languages;
  std::vector<std::size_t> layers;
  LatentKind latent = LatentKind::kLogits;
  std::optional<std::size_t> n_instances;
};

struct ExperimentConfig {
  nlohmann::json raw;  // the parsed file, basis of the hash
  std::string hash;
  std::filesystem::path base_dir;  // relative paths resolve against the config file's directory

  ModelConfig model;
  LanguageSet universe = LanguageSet::default_registry();
  std::vector<LanguageCode> source_languages;
  LanguageCode target_language{"en"};
  TaskKind task = TaskKind::kEmotion;
  OutputType output_type = OutputType::kEnglish;
  DataConfig data;
  std::size_t few_shot_k = 4;
  std::string template_id;  // defaults to the task template
  std::string translation_template = kDefaultTranslationTemplate;
  bool length_normalized = false;
  Seeds seeds;
  TuningConfig tuning;
  LensConfig lens;
  GeometryConfig geometry;
  std::filesystem::path output_root;
  std::optional<std::filesystem::path> surfaces_path;
  std::optional<std::filesystem::path> templates_path;
  std::size_t workers = 0;  // 0 picks the hardware concurrency

  std::filesystem::path run_dir() const { return output_root / hash.substr(0, 16); }
};

// Hash of the canonical (sorted-key) serialization, so key order does not matter.
std::string config_hash(const nlohmann::json& j);

// Throws ConfigError for anything malformed or inconsistent.
ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace xalign
