#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "xalign/config.hpp"
#include "xalign/error.hpp"
#include "xalign/pipeline.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kRuntimeError = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual alignment experiments on a toy language model"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::string adapter_path;
  bool allow_overlap = false;

  using Command = xalign::CommandResult (*)(const xalign::ExperimentConfig&, const xalign::CommandOptions&);
  const std::pair<const char*, Command> commands[] = {
      {"build-data", xalign::cmd_build_data}, {"tune", xalign::cmd_tune},
      {"eval", xalign::cmd_eval},             {"lens", xalign::cmd_lens},
      {"geometry", xalign::cmd_geometry},     {"report", xalign::cmd_report},
  };
  const char* descriptions[] = {
      "sample translation pairs, test sets and few-shot exemplars",
      "fine-tune a low-rank adapter on the translation corpus",
      "score every test instance and write per-language accuracy",
      "trace tracked answer mass through the layers",
      "joint PCA scatters and pairwise correlation tables",
      "summarize a finished run as markdown",
  };
  std::optional<Command> chosen;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, descriptions[i]);
    sub->add_option("--config", config_path, "experiment config (JSON)")->required();
    sub->add_option("--adapter", adapter_path, "adapter blob; evaluates the tuned model");
    sub->add_flag("--allow-overlap", allow_overlap, "lens: keep languages whose answer tokens overlap");
    sub->callback([&chosen, cmd = commands[i].second] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  try {
    const auto config = xalign::load_config(config_path);
    xalign::CommandOptions options;
    if (!adapter_path.empty()) options.adapter = adapter_path;
    options.allow_overlap = allow_overlap;
    options.log = &std::cerr;
    const auto result = (*chosen)(config, options);
    for (const auto& path : result.outputs) std::cout << path.string() << "\n";
    return kOk;
  } catch (const xalign::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const xalign::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
