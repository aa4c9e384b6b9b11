#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xalign/corpus.hpp"

namespace xalign {

class Backend;

enum class OutputType { kEnglish, kSameLanguage, kTaskAgnostic };

std::string_view to_string(OutputType type);
OutputType parse_output_type(std::string_view name);

struct AnswerSet {
  TaskKind task = TaskKind::kEmotion;
  OutputType output_type = OutputType::kEnglish;
  LanguageCode lang;
  // (canonical label id, surface) in canonical label order; this order breaks ties.
  std::vector<std::pair<std::string, std::string>> surfaces;

  const std::string& surface_for(std::string_view label) const;
  std::vector<std::string> surface_strings() const;
};

// task -> output_type -> lang -> label id -> surface. The english and
// task_agnostic types are keyed by "*" only, so they cannot vary by language.
class SurfaceRegistry {
 public:
  explicit SurfaceRegistry(nlohmann::json table);
  static const SurfaceRegistry& builtin();
  static SurfaceRegistry load(const std::filesystem::path& path);

  AnswerSet lookup(TaskKind task, const LanguageCode& lang, OutputType type) const;
  const nlohmann::json& table() const noexcept { return table_; }

 private:
  nlohmann::json table_;
};

// Throws ConfigError naming (task, lang, output_type) when the registry has no entry.
AnswerSet answer_surfaces(TaskKind task, const LanguageCode& lang, OutputType type,
                          const SurfaceRegistry& registry = SurfaceRegistry::builtin());

// Translation templates use {src}, {tgt}, {question}. Task templates use
// {labels} in the instruction and {question} in the body; the body ends where
// the answer begins.
struct PromptTemplate {
  std::string id;
  std::string instruction;
  std::string body;
};

class TemplateRegistry {
 public:
  explicit TemplateRegistry(std::map<std::string, PromptTemplate> templates);
  static const TemplateRegistry& builtin();
  static TemplateRegistry load(const std::filesystem::path& path);

  const PromptTemplate& get(const std::string& id) const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

inline constexpr const char* kDefaultTranslationTemplate = "translate_default";
std::string default_task_template(TaskKind task);

// Prompt and completion split at the answer boundary. The completion never
// starts with whitespace; the prompt owns any separator.
struct SupervisedExample {
  std::string prompt;
  std::string completion;
};

struct RenderCounters {
  std::size_t rendered = 0;
  std::size_t degenerate = 0;  // source text identical to target text
};

SupervisedExample render_translation_example(const ParallelPair& pair,
                                             const TemplateRegistry& templates = TemplateRegistry::builtin(),
                                             RenderCounters* counters = nullptr,
                                             const std::string& template_id = kDefaultTranslationTemplate);

struct FewShotExample {
  TaskInstance instance;
  std::string answer;  // surface string from the spec's answer set
};

struct PromptSpec {
  TaskInstance instance;
  std::vector<FewShotExample> few_shot;
  AnswerSet answer_set;
  std::string template_id;

  // Throws DataError when exemplars differ in task or reuse the query id.
  void validate() const;
};

// k seeded exemplars from pool minus exclusions, interleaved across labels so
// every label count is within one of the others (as far as the pool allows).
std::vector<TaskInstance> select_few_shot(const std::vector<TaskInstance>& pool, std::size_t k,
                                          const std::set<std::string>& exclusions, std::uint64_t seed);

PromptSpec make_prompt_spec(TaskInstance instance, const std::vector<TaskInstance>& exemplars,
                            AnswerSet answer_set, std::string template_id);

std::string render_task_prompt(const PromptSpec& spec,
                               const TemplateRegistry& templates = TemplateRegistry::builtin());

// True when some surface's token sequence is a prefix of another's under the backend tokenizer.
bool has_prefix_overlap(const AnswerSet& answers, const Backend& backend);

}  // namespace xalign
