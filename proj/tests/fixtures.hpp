#pragma once

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "xalign/eval.hpp"

namespace xalign::testing {

inline std::string fixture_path(const std::string& name) { return std::string(XALIGN_FIXTURE_DIR) + "/" + name; }

inline std::vector<std::vector<std::string>> read_csv(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

// (model, task, row) -> per-language predictions rebuilt from the published
// percentage and the test-set size.
using TableKey = std::tuple<std::string, std::string, std::string>;

inline std::map<TableKey, std::vector<Prediction>> published_predictions() {
  std::map<TableKey, std::vector<Prediction>> out;
  for (const auto& r : read_csv("published_accuracy.csv")) {
    const auto task = parse_task_kind(r[1]);
    const auto labels = canonical_labels(task);
    const auto n = std::stoul(r[5]);
    const auto correct = static_cast<std::size_t>(std::llround(std::stod(r[4]) / 100.0 * static_cast<double>(n)));
    auto& preds = out[{r[0], r[1], r[2]}];
    for (std::size_t i = 0; i < n; ++i) {
      const std::string gold(labels[i % labels.size()]);
      const std::string wrong(labels[(i + 1) % labels.size()]);
      preds.push_back({r[3] + "-" + std::to_string(i), LanguageCode(r[3]), i < correct ? gold : wrong, gold, {}});
    }
  }
  return out;
}

inline std::map<TableKey, double> published_averages() {
  std::map<TableKey, double> out;
  for (const auto& r : read_csv("published_average.csv")) out[{r[0], r[1], r[2]}] = std::stod(r[3]);
  return out;
}

}  // namespace xalign::testing
