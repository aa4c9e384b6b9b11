#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "xalign/language.hpp"
#include "xalign/task.hpp"

namespace xalign {

struct TaskInstance {
  std::string id;  // shared by every translation of the same underlying item
  TaskKind task = TaskKind::kEmotion;
  LanguageCode lang;
  std::string text_a;
  std::optional<std::string> text_b;
  std::string gold;  // canonical label id
};

// A (source question, target question) translation unit. Never carries a label.
struct ParallelPair {
  LanguageCode source_lang;
  LanguageCode target_lang;
  std::string source_text;
  std::string target_text;
  std::string instance_id;

  friend bool operator==(const ParallelPair&, const ParallelPair&) = default;
};

struct ProvenanceEntry {
  LanguageCode source_lang;
  LanguageCode target_lang;
  std::size_t count = 0;
};

struct TrainingCorpus {
  std::vector<ParallelPair> pairs;
  std::vector<ProvenanceEntry> provenance;
  std::uint64_t shuffle_seed = 0;
};

// The question text of an instance: text_a, or "text_a\ntext_b" for two-text tasks.
std::string render_question(const TaskInstance& instance);

// Reads one TaskInstance per JSONL line. Every line must declare the given task
// and language. Errors: ParseError (with line number), LabelError, DataError
// for duplicate ids.
std::vector<TaskInstance> load_task_dataset(const std::filesystem::path& path, TaskKind task,
                                            const LanguageCode& lang);
std::vector<TaskInstance> parse_task_dataset(std::istream& in, const std::string& source_name,
                                             TaskKind task, const LanguageCode& lang);
void write_task_dataset(const std::filesystem::path& path, const std::vector<TaskInstance>& instances);

// Pairs instances of two languages by id, dropping gold labels. Throws
// AlignmentError listing orphan ids on either side.
std::vector<ParallelPair> build_translation_pairs(const std::vector<TaskInstance>& source,
                                                  const std::vector<TaskInstance>& target);

// Concatenates per-direction corpora and applies a seeded permutation.
TrainingCorpus mix_corpora(const std::vector<std::vector<ParallelPair>>& corpora, std::uint64_t seed);

// Seeded sample without replacement; selected items keep their input order.
std::vector<TaskInstance> sample_subsets(const std::vector<TaskInstance>& instances, std::size_t n,
                                         std::uint64_t seed);

std::vector<ParallelPair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::filesystem::path& path, const std::vector<ParallelPair>& pairs);

std::set<std::string> instance_ids(const std::vector<TaskInstance>& instances);
std::set<std::string> instance_ids(const std::vector<ParallelPair>& pairs);

}  // namespace xalign
