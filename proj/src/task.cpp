#include "xalign/task.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "xalign/error.hpp"

namespace xalign {

namespace {
constexpr std::array<std::string_view, 2> kEmotionLabels{"positive", "negative"};
constexpr std::array<std::string_view, 3> kNliLabels{"entailment", "neutral", "contradiction"};
constexpr std::array<std::string_view, 2> kParaphraseLabels{"paraphrase", "not_paraphrase"};
}  // namespace

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::kEmotion: return "emotion";
    case TaskKind::kNli: return "nli";
    case TaskKind::kParaphrase: return "paraphrase";
  }
  return "unknown";
}

TaskKind parse_task_kind(std::string_view name) {
  if (name == "emotion") return TaskKind::kEmotion;
  if (name == "nli") return TaskKind::kNli;
  if (name == "paraphrase") return TaskKind::kParaphrase;
  throw ConfigError("unknown task '" + std::string(name) + "'");
}

std::span<const std::string_view> canonical_labels(TaskKind task) {
  switch (task) {
    case TaskKind::kEmotion: return kEmotionLabels;
    case TaskKind::kNli: return kNliLabels;
    case TaskKind::kParaphrase: return kParaphraseLabels;
  }
  return {};
}

std::size_t label_arity(TaskKind task) { return canonical_labels(task).size(); }

bool is_canonical_label(TaskKind task, std::string_view label) {
  const auto labels = canonical_labels(task);
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

bool has_second_text(TaskKind task) { return task != TaskKind::kEmotion; }

}  // namespace xalign
