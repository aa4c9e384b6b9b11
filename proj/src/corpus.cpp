#include "xalign/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "xalign/error.hpp"
#include "xalign/random.hpp"

namespace xalign {

using nlohmann::json;

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

const std::string& require_string(const json& row, const char* key, const std::string& source,
                                  std::size_t line) {
  auto it = row.find(key);
  if (it == row.end() || !it->is_string())
    throw ParseError(source, line, std::string("missing or non-string field '") + key + "'");
  return it->get_ref<const std::string&>();
}

}  // namespace

std::string render_question(const TaskInstance& instance) {
  if (!instance.text_b) return instance.text_a;
  return instance.text_a + "\n" + *instance.text_b;
}

std::vector<TaskInstance> parse_task_dataset(std::istream& in, const std::string& source_name,
                                             TaskKind task, const LanguageCode& lang) {
  std::vector<TaskInstance> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source_name, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!row.is_object()) throw ParseError(source_name, line_no, "expected a JSON object");

    TaskInstance inst;
    inst.id = require_string(row, "id", source_name, line_no);
    const auto& task_name = require_string(row, "task", source_name, line_no);
    if (task_name != to_string(task))
      throw ParseError(source_name, line_no,
                       "task '" + task_name + "' does not match expected '" + std::string(to_string(task)) + "'");
    inst.task = task;
    const auto& lang_name = require_string(row, "lang", source_name, line_no);
    if (lang_name != lang.str())
      throw ParseError(source_name, line_no,
                       "lang '" + lang_name + "' does not match expected '" + lang.str() + "'");
    inst.lang = lang;
    inst.text_a = require_string(row, "text_a", source_name, line_no);
    if (auto it = row.find("text_b"); it != row.end() && !it->is_null()) {
      if (!it->is_string()) throw ParseError(source_name, line_no, "text_b must be a string or null");
      inst.text_b = it->get<std::string>();
    }
    if (has_second_text(task) != inst.text_b.has_value())
      throw ParseError(source_name, line_no,
                       has_second_text(task) ? "text_b is required for this task" : "text_b must be null for emotion");
    inst.gold = require_string(row, "gold", source_name, line_no);
    if (!is_canonical_label(task, inst.gold))
      throw LabelError(source_name + ":" + std::to_string(line_no) + ": unknown label '" + inst.gold +
                       "' for task " + std::string(to_string(task)));
    if (!seen.insert(inst.id).second)
      throw DataError(source_name + ":" + std::to_string(line_no) + ": duplicate id '" + inst.id + "'");
    out.push_back(std::move(inst));
  }
  return out;
}

std::vector<TaskInstance> load_task_dataset(const std::filesystem::path& path, TaskKind task,
                                            const LanguageCode& lang) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path.string() + "'");
  return parse_task_dataset(in, path.string(), task, lang);
}

void write_task_dataset(const std::filesystem::path& path, const std::vector<TaskInstance>& instances) {
  auto out = open_for_write(path);
  for (const auto& inst : instances) {
    json row = {{"id", inst.id},
                {"task", to_string(inst.task)},
                {"lang", inst.lang.str()},
                {"text_a", inst.text_a},
                {"text_b", inst.text_b ? json(*inst.text_b) : json(nullptr)},
                {"gold", inst.gold}};
    out << row.dump() << '\n';
  }
}

std::vector<ParallelPair> build_translation_pairs(const std::vector<TaskInstance>& source,
                                                  const std::vector<TaskInstance>& target) {
  if (source.empty() && target.empty()) return {};
  const auto& any = source.empty() ? target.front() : source.front();
  for (const auto* side : {&source, &target})
    for (const auto& inst : *side) {
      if (inst.task != any.task) throw DataError("translation pairs mix tasks");
      if (inst.lang != side->front().lang) throw DataError("translation side mixes languages");
    }
  if (!source.empty() && !target.empty() && source.front().lang == target.front().lang)
    throw DataError("source and target language are both '" + source.front().lang.str() + "'");

  std::unordered_map<std::string, const TaskInstance*> by_id;
  for (const auto& inst : target) by_id.emplace(inst.id, &inst);

  std::vector<std::string> orphans;
  std::unordered_set<std::string> matched;
  std::vector<ParallelPair> pairs;
  pairs.reserve(source.size());
  for (const auto& src : source) {
    auto it = by_id.find(src.id);
    if (it == by_id.end()) {
      orphans.push_back(src.id);
      continue;
    }
    matched.insert(src.id);
    ParallelPair pair{src.lang, it->second->lang, render_question(src), render_question(*it->second), src.id};
    if (pair.source_text.empty() || pair.target_text.empty())
      throw DataError("empty question text for instance '" + src.id + "'");
    pairs.push_back(std::move(pair));
  }
  for (const auto& tgt : target)
    if (!matched.contains(tgt.id)) orphans.push_back(tgt.id);
  if (!orphans.empty())
    throw AlignmentError("unaligned instance ids (" + std::to_string(orphans.size()) + "): " + join_ids(orphans));
  return pairs;
}

TrainingCorpus mix_corpora(const std::vector<std::vector<ParallelPair>>& corpora, std::uint64_t seed) {
  if (corpora.empty()) throw DataError("mix_corpora: no corpora given");
  TrainingCorpus out;
  out.shuffle_seed = seed;
  std::vector<const ParallelPair*> all;
  for (const auto& corpus : corpora) {
    if (corpus.empty()) continue;
    const auto& first = corpus.front();
    for (const auto& pair : corpus)
      if (pair.source_lang != first.source_lang || pair.target_lang != first.target_lang)
        throw DataError("mix_corpora: corpus mixes translation directions");
    out.provenance.push_back({first.source_lang, first.target_lang, corpus.size()});
    for (const auto& pair : corpus) all.push_back(&pair);
  }
  if (all.empty()) throw DataError("mix_corpora: all corpora are empty");
  const auto order = seeded_permutation(all.size(), seed);
  out.pairs.reserve(all.size());
  for (auto idx : order) out.pairs.push_back(*all[idx]);
  return out;
}

std::vector<TaskInstance> sample_subsets(const std::vector<TaskInstance>& instances, std::size_t n,
                                         std::uint64_t seed) {
  if (n > instances.size())
    throw DataError("cannot sample " + std::to_string(n) + " of " + std::to_string(instances.size()) +
                    " instances");
  auto order = seeded_permutation(instances.size(), seed);
  order.resize(n);
  std::sort(order.begin(), order.end());
  std::vector<TaskInstance> out;
  out.reserve(n);
  for (auto idx : order) out.push_back(instances[idx]);
  return out;
}

std::vector<ParallelPair> read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pair file '" + path.string() + "'");
  std::vector<ParallelPair> pairs;
  std::string line;
  std::size_t line_no = 0;
  const auto source = path.string();
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(source, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!row.is_object()) throw ParseError(source, line_no, "expected a JSON object");
    ParallelPair pair;
    pair.instance_id = require_string(row, "instance_id", source, line_no);
    pair.source_lang = LanguageCode(require_string(row, "src_lang", source, line_no));
    pair.target_lang = LanguageCode(require_string(row, "tgt_lang", source, line_no));
    pair.source_text = require_string(row, "src", source, line_no);
    pair.target_text = require_string(row, "tgt", source, line_no);
    if (pair.source_lang == pair.target_lang)
      throw ParseError(source, line_no, "source and target language are identical");
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

void write_pairs(const std::filesystem::path& path, const std::vector<ParallelPair>& pairs) {
  auto out = open_for_write(path);
  for (const auto& p : pairs) {
    json row = {{"instance_id", p.instance_id},
                {"src_lang", p.source_lang.str()},
                {"tgt_lang", p.target_lang.str()},
                {"src", p.source_text},
                {"tgt", p.target_text}};
    out << row.dump() << '\n';
  }
}

std::set<std::string> instance_ids(const std::vector<TaskInstance>& instances) {
  std::set<std::string> ids;
  for (const auto& inst : instances) ids.insert(inst.id);
  return ids;
}

std::set<std::string> instance_ids(const std::vector<ParallelPair>& pairs) {
  std::set<std::string> ids;
  for (const auto& p : pairs) ids.insert(p.instance_id);
  return ids;
}

}  // namespace xalign
