#pragma once

#include <span>
#include <string>
#include <string_view>

namespace xalign {

enum class TaskKind { kEmotion, kNli, kParaphrase };

std::string_view to_string(TaskKind task);
// Throws ConfigError for anything other than emotion|nli|paraphrase.
TaskKind parse_task_kind(std::string_view name);

// Language-neutral label ids, in the fixed order used for tie-breaking.
std::span<const std::string_view> canonical_labels(TaskKind task);
std::size_t label_arity(TaskKind task);
bool is_canonical_label(TaskKind task, std::string_view label);
// Tasks whose instances carry a second text (premise/hypothesis, sentence pair).
bool has_second_text(TaskKind task);

}  // namespace xalign
