#include "xalign/prompting.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "xalign/backend.hpp"
#include "xalign/error.hpp"
#include "xalign/random.hpp"

namespace xalign {

namespace detail {
extern const char* const kBuiltinSurfaces;
extern const char* const kBuiltinTemplates;
}  // namespace detail

using nlohmann::json;

namespace {

std::string replace_all(std::string text, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = text.find(key, pos)) != std::string::npos) {
    text.replace(pos, key.size(), value);
    pos += value.size();
  }
  return text;
}

std::string join_labels(const std::vector<std::string>& surfaces) {
  std::string out;
  for (std::size_t i = 0; i < surfaces.size(); ++i) {
    if (i > 0) out += (i + 1 == surfaces.size()) ? " or " : ", ";
    out += surfaces[i];
  }
  return out;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

bool starts_with_space(std::string_view s) {
  return !s.empty() && std::isspace(static_cast<unsigned char>(s.front()));
}

}  // namespace

std::string_view to_string(OutputType type) {
  switch (type) {
    case OutputType::kEnglish: return "english";
    case OutputType::kSameLanguage: return "same_language";
    case OutputType::kTaskAgnostic: return "task_agnostic";
  }
  return "unknown";
}

OutputType parse_output_type(std::string_view name) {
  if (name == "english") return OutputType::kEnglish;
  if (name == "same_language") return OutputType::kSameLanguage;
  if (name == "task_agnostic") return OutputType::kTaskAgnostic;
  throw ConfigError("unknown output type '" + std::string(name) + "'");
}

const std::string& AnswerSet::surface_for(std::string_view label) const {
  for (const auto& [id, surface] : surfaces)
    if (id == label) return surface;
  throw LabelError("label '" + std::string(label) + "' is not in the answer set");
}

std::vector<std::string> AnswerSet::surface_strings() const {
  std::vector<std::string> out;
  for (const auto& s : surfaces) out.push_back(s.second);
  return out;
}

SurfaceRegistry::SurfaceRegistry(json table) : table_(std::move(table)) {
  if (!table_.is_object()) throw ConfigError("surface registry must be a JSON object");
  for (const auto& [task, types] : table_.items()) {
    parse_task_kind(task);
    for (const auto& [type, langs] : types.items()) {
      const auto output_type = parse_output_type(type);
      if (output_type != OutputType::kSameLanguage)
        for (const auto& [lang, labels] : langs.items())
          if (lang != "*")
            throw ConfigError("surface registry: " + task + "/" + type + " must be keyed by \"*\" only");
    }
  }
}

const SurfaceRegistry& SurfaceRegistry::builtin() {
  static const SurfaceRegistry registry(json::parse(detail::kBuiltinSurfaces));
  return registry;
}

SurfaceRegistry SurfaceRegistry::load(const std::filesystem::path& path) {
  return SurfaceRegistry(read_json_file(path));
}

AnswerSet SurfaceRegistry::lookup(TaskKind task, const LanguageCode& lang, OutputType type) const {
  const auto triple = "(" + std::string(to_string(task)) + ", " + lang.str() + ", " +
                      std::string(to_string(type)) + ")";
  const json* entry = nullptr;
  if (auto t = table_.find(to_string(task)); t != table_.end())
    if (auto o = t->find(to_string(type)); o != t->end()) {
      const std::string key = type == OutputType::kSameLanguage ? lang.str() : "*";
      if (auto l = o->find(key); l != o->end()) entry = &*l;
    }
  if (entry == nullptr || !entry->is_object())
    throw ConfigError("no answer surfaces registered for " + triple);

  AnswerSet set{task, type, lang, {}};
  std::set<std::string> distinct;
  for (auto label : canonical_labels(task)) {
    auto it = entry->find(label);
    if (it == entry->end() || !it->is_string() || it->get_ref<const std::string&>().empty())
      throw ConfigError("answer surfaces for " + triple + " lack label '" + std::string(label) + "'");
    const auto& surface = it->get_ref<const std::string&>();
    if (starts_with_space(surface))
      throw ConfigError("answer surface '" + surface + "' for " + triple + " starts with whitespace");
    if (!distinct.insert(surface).second)
      throw ConfigError("answer surfaces for " + triple + " are not distinct");
    set.surfaces.emplace_back(std::string(label), surface);
  }
  if (entry->size() != set.surfaces.size())
    throw ConfigError("answer surfaces for " + triple + " contain non-canonical labels");
  return set;
}

AnswerSet answer_surfaces(TaskKind task, const LanguageCode& lang, OutputType type,
                          const SurfaceRegistry& registry) {
  return registry.lookup(task, lang, type);
}

TemplateRegistry::TemplateRegistry(std::map<std::string, PromptTemplate> templates)
    : templates_(std::move(templates)) {}

namespace {
TemplateRegistry templates_from_json(const json& table) {
  if (!table.is_object()) throw ConfigError("template registry must be a JSON object");
  std::map<std::string, PromptTemplate> out;
  for (const auto& [id, t] : table.items()) {
    if (!t.is_object() || !t.contains("body") || !t["body"].is_string())
      throw ConfigError("template '" + id + "' needs a string 'body'");
    out[id] = PromptTemplate{id, t.value("instruction", std::string()), t["body"].get<std::string>()};
  }
  return TemplateRegistry(std::move(out));
}
}  // namespace

const TemplateRegistry& TemplateRegistry::builtin() {
  static const TemplateRegistry registry = templates_from_json(json::parse(detail::kBuiltinTemplates));
  return registry;
}

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& path) {
  return templates_from_json(read_json_file(path));
}

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw ConfigError("unknown template id '" + id + "'");
  return it->second;
}

std::string default_task_template(TaskKind task) { return std::string(to_string(task)) + "_default"; }

SupervisedExample render_translation_example(const ParallelPair& pair, const TemplateRegistry& templates,
                                             RenderCounters* counters, const std::string& template_id) {
  const auto& tmpl = templates.get(template_id);
  std::string prompt = replace_all(tmpl.body, "{src}", language_name(pair.source_lang));
  prompt = replace_all(std::move(prompt), "{tgt}", language_name(pair.target_lang));
  prompt = replace_all(std::move(prompt), "{question}", pair.source_text);
  if (!tmpl.instruction.empty()) prompt = tmpl.instruction + "\n\n" + prompt;

  // Leading whitespace of the target moves into the prompt so the completion
  // boundary stays unambiguous.
  std::string completion = pair.target_text;
  std::size_t lead = 0;
  while (lead < completion.size() && std::isspace(static_cast<unsigned char>(completion[lead]))) ++lead;
  prompt += completion.substr(0, lead);
  completion.erase(0, lead);
  if (completion.empty()) throw DataError("pair '" + pair.instance_id + "' has an empty target text");

  if (counters != nullptr) {
    ++counters->rendered;
    if (pair.source_text == pair.target_text) ++counters->degenerate;
  }
  return {std::move(prompt), std::move(completion)};
}

void PromptSpec::validate() const {
  if (answer_set.surfaces.empty()) throw DataError("prompt spec has an empty answer set");
  if (answer_set.task != instance.task) throw DataError("answer set task differs from instance task");
  for (const auto& ex : few_shot) {
    if (ex.instance.task != instance.task) throw DataError("few-shot exemplar '" + ex.instance.id + "' has another task");
    if (ex.instance.id == instance.id)
      throw DataError("few-shot exemplar reuses the query id '" + instance.id + "'");
  }
}

std::vector<TaskInstance> select_few_shot(const std::vector<TaskInstance>& pool, std::size_t k,
                                          const std::set<std::string>& exclusions, std::uint64_t seed) {
  if (k == 0) return {};
  std::vector<const TaskInstance*> eligible;
  for (const auto& inst : pool)
    if (!exclusions.contains(inst.id)) eligible.push_back(&inst);
  if (eligible.size() < k)
    throw DataError("few-shot pool has " + std::to_string(eligible.size()) + " eligible instances, need " +
                    std::to_string(k));

  Rng rng(seed);
  rng.shuffle(eligible);

  // Bucket by canonical label order, then round-robin.
  const auto labels = canonical_labels(eligible.front()->task);
  std::vector<std::vector<const TaskInstance*>> buckets(labels.size());
  for (const auto* inst : eligible) {
    auto it = std::find(labels.begin(), labels.end(), inst->gold);
    if (it == labels.end()) throw LabelError("few-shot pool instance '" + inst->id + "' has unknown label");
    buckets[static_cast<std::size_t>(it - labels.begin())].push_back(inst);
  }
  std::vector<TaskInstance> picked;
  std::vector<std::size_t> cursor(buckets.size(), 0);
  while (picked.size() < k) {
    for (std::size_t b = 0; b < buckets.size() && picked.size() < k; ++b)
      if (cursor[b] < buckets[b].size()) picked.push_back(*buckets[b][cursor[b]++]);
  }
  rng.shuffle(picked);
  return picked;
}

PromptSpec make_prompt_spec(TaskInstance instance, const std::vector<TaskInstance>& exemplars,
                            AnswerSet answer_set, std::string template_id) {
  PromptSpec spec{std::move(instance), {}, std::move(answer_set), std::move(template_id)};
  for (const auto& ex : exemplars) spec.few_shot.push_back({ex, spec.answer_set.surface_for(ex.gold)});
  spec.validate();
  return spec;
}

std::string render_task_prompt(const PromptSpec& spec, const TemplateRegistry& templates) {
  spec.validate();
  const auto& tmpl = templates.get(spec.template_id);
  std::string out;
  if (!tmpl.instruction.empty())
    out += replace_all(tmpl.instruction, "{labels}", join_labels(spec.answer_set.surface_strings())) + "\n\n";
  for (const auto& ex : spec.few_shot)
    out += replace_all(tmpl.body, "{question}", render_question(ex.instance)) + ex.answer + "\n\n";
  out += replace_all(tmpl.body, "{question}", render_question(spec.instance));
  return out;
}

bool has_prefix_overlap(const AnswerSet& answers, const Backend& backend) {
  std::vector<std::vector<TokenId>> tokenized;
  for (const auto& [label, surface] : answers.surfaces) tokenized.push_back(backend.tokenize(surface).ids);
  for (std::size_t i = 0; i < tokenized.size(); ++i)
    for (std::size_t j = 0; j < tokenized.size(); ++j) {
      if (i == j) continue;
      const auto& a = tokenized[i];
      const auto& b = tokenized[j];
      if (!a.empty() && a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin())) return true;
    }
  return false;
}

}  // namespace xalign
