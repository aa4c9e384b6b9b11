#include "xalign/eval.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xalign/error.hpp"

namespace xalign {

std::size_t argmax_first(const std::vector<double>& scores) {
  if (scores.empty()) throw DataError("argmax of an empty score list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i)
    if (scores[i] > scores[best]) best = i;
  return best;
}

Prediction predict_label(const ModelHandle& handle, const PromptSpec& spec, const TemplateRegistry& templates,
                         const ScoringOptions& options) {
  if (spec.answer_set.surfaces.empty()) throw DataError("empty answer set for instance '" + spec.instance.id + "'");
  Prediction out{spec.instance.id, spec.instance.lang, {}, spec.instance.gold, {}};
  std::vector<double> values;
  try {
    const auto prompt = render_task_prompt(spec, templates);
    for (const auto& [label, surface] : spec.answer_set.surfaces) {
      double s = score_completion(handle, prompt, surface);
      if (options.length_normalized)
        s /= static_cast<double>(handle.backend().tokenize(surface).ids.size());
      values.push_back(s);
      out.scores.emplace_back(label, s);
    }
  } catch (const BackendError& e) {
    throw BackendError("instance '" + spec.instance.id + "': " + e.what());
  }
  out.predicted = spec.answer_set.surfaces[argmax_first(values)].first;
  return out;
}

double accuracy_per_language(const std::vector<Prediction>& predictions, const LanguageCode& lang) {
  std::size_t n = 0, correct = 0;
  for (const auto& p : predictions) {
    if (p.lang != lang) continue;
    ++n;
    correct += p.predicted == p.gold;
  }
  if (n == 0) throw DataError("no predictions for language '" + lang.str() + "'");
  return static_cast<double>(correct) / static_cast<double>(n);
}

double average_accuracy(const std::map<LanguageCode, double>& per_language, const LanguageSet& universe) {
  double sum = 0.0;
  for (const auto& lang : universe.members()) {
    const auto it = per_language.find(lang);
    if (it == per_language.end()) throw DataError("missing accuracy for language '" + lang.str() + "'");
    sum += it->second;
  }
  return sum / static_cast<double>(universe.size());
}

double random_baseline(TaskKind task) { return 1.0 / static_cast<double>(label_arity(task)); }

EvalResult summarize(const std::vector<Prediction>& predictions, const LanguageSet& universe) {
  EvalResult r;
  r.languages = universe.members();
  for (const auto& lang : universe.members()) {
    r.per_language[lang] = accuracy_per_language(predictions, lang);
    r.n_per_language[lang] = 0;
  }
  for (const auto& p : predictions)
    if (universe.contains(p.lang)) ++r.n_per_language[p.lang];
  r.average = average_accuracy(r.per_language, universe);
  return r;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

std::string eval_csv(const EvalResult& result) {
  std::ostringstream out;
  out << "lang,n,correct,accuracy_pct\n";
  std::size_t total = 0;
  for (const auto& lang : result.languages) {
    const auto n = result.n_per_language.at(lang);
    const double acc = result.per_language.at(lang);
    total += n;
    out << lang.str() << ',' << n << ',' << std::llround(acc * static_cast<double>(n)) << ',' << format_percent(acc)
        << '\n';
  }
  out << "average," << total << ",," << format_percent(result.average) << '\n';
  return out.str();
}

void write_eval_csv(const std::filesystem::path& path, const EvalResult& result) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << eval_csv(result);
}

EvalResult read_eval_csv(const std::filesystem::path& path, const LanguageSet& universe) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  EvalResult r;
  r.languages = universe.members();
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 4) throw ParseError(path.string(), line_no, "expected 4 columns");
    if (cells[0] == "average") continue;
    try {
      const LanguageCode lang(cells[0]);
      r.n_per_language[lang] = std::stoul(cells[1]);
      r.per_language[lang] = std::stod(cells[3]) / 100.0;
    } catch (const std::logic_error&) {
      throw ParseError(path.string(), line_no, "bad number");
    } catch (const ConfigError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  r.average = average_accuracy(r.per_language, universe);
  return r;
}

void write_predictions(const std::filesystem::path& path, const std::vector<Prediction>& predictions) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& p : predictions) {
    nlohmann::ordered_json scores = nlohmann::ordered_json::object();
    for (const auto& [label, s] : p.scores) scores[label] = s;
    nlohmann::ordered_json j{{"instance_id", p.instance_id}, {"lang", p.lang.str()}, {"predicted", p.predicted},
                             {"gold", p.gold}, {"scores", scores}};
    out << j.dump() << '\n';
  }
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Prediction> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::ordered_json::parse(line);
      Prediction p{j.at("instance_id").get<std::string>(), LanguageCode(j.at("lang").get<std::string>()),
                   j.at("predicted").get<std::string>(), j.at("gold").get<std::string>(), {}};
      for (const auto& [label, s] : j.at("scores").items()) p.scores.emplace_back(label, s.get<double>());
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return out;
}

}  // namespace xalign
