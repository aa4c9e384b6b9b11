#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "xalign/backend.hpp"
#include "xalign/config.hpp"
#include "xalign/manifest.hpp"

namespace xalign {

struct CommandOptions {
  std::optional<std::filesystem::path> adapter;  // evaluate the tuned model instead of the base
  bool allow_overlap = false;                    // lens: trace languages whose answer sets share first tokens
  std::ostream* log = nullptr;
};

struct CommandResult {
  std::filesystem::path run_dir;
  std::vector<std::filesystem::path> outputs;
};

// Builds the base model the config describes (no adapter).
ModelHandle make_model(const ExperimentConfig& config);

// Pair corpora per direction, the mixed training corpus, per-language test
// sets and few-shot exemplars, under <run>/data.
CommandResult cmd_build_data(const ExperimentConfig& config, const CommandOptions& options = {});
// Adapter and tuning report under <run>/adapter.
CommandResult cmd_tune(const ExperimentConfig& config, const CommandOptions& options = {});
// Accuracy CSV and predictions under <run>/eval/<base|tuned>.
CommandResult cmd_eval(const ExperimentConfig& config, const CommandOptions& options = {});
// Aggregated layer traces under <run>/lens/<base|tuned>/<lang>.json.
CommandResult cmd_lens(const ExperimentConfig& config, const CommandOptions& options = {});
// Joint-PCA scatters and correlation tables per layer under <run>/geometry.
CommandResult cmd_geometry(const ExperimentConfig& config, const CommandOptions& options = {});
// Markdown summary of a complete run at <run>/report.md.
CommandResult cmd_report(const ExperimentConfig& config, const CommandOptions& options = {});

}  // namespace xalign
