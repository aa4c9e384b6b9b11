#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "xalign/backend.hpp"
#include "xalign/language.hpp"
#include "xalign/prompting.hpp"
#include "xalign/task.hpp"

namespace xalign {

struct Prediction {
  std::string instance_id;
  LanguageCode lang;
  std::string predicted;
  std::string gold;
  // (label, log-probability) in answer-set order.
  std::vector<std::pair<std::string, double>> scores;
};

struct ScoringOptions {
  // Divide each candidate's summed log-probability by its token count.
  bool length_normalized = false;
};

// Index of the largest score; the earliest index wins ties.
std::size_t argmax_first(const std::vector<double>& scores);

// Constrained decoding: scores every surface after the rendered prompt and
// returns the best label. Backend failures are rethrown with the instance id.
Prediction predict_label(const ModelHandle& handle, const PromptSpec& spec,
                         const TemplateRegistry& templates = TemplateRegistry::builtin(),
                         const ScoringOptions& options = {});

double accuracy_per_language(const std::vector<Prediction>& predictions, const LanguageCode& lang);

// Unweighted mean over every language of the universe, in [0,1] or percent
// (the unit of the inputs is kept).
double average_accuracy(const std::map<LanguageCode, double>& per_language, const LanguageSet& universe);

double random_baseline(TaskKind task);

struct EvalResult {
  std::vector<LanguageCode> languages;  // universe order
  std::map<LanguageCode, double> per_language;
  std::map<LanguageCode, std::size_t> n_per_language;
  double average = 0.0;
};

EvalResult summarize(const std::vector<Prediction>& predictions, const LanguageSet& universe);

// CSV: lang,n,correct,accuracy_pct with accuracies in percent to 2 decimals,
// followed by an "average" row.
void write_eval_csv(const std::filesystem::path& path, const EvalResult& result);
std::string eval_csv(const EvalResult& result);
// Reads per-language rows back (accuracy in [0,1]); the average row is recomputed.
EvalResult read_eval_csv(const std::filesystem::path& path, const LanguageSet& universe);

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

std::string format_percent(double fraction);

}  // namespace xalign
