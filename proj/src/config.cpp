#include "xalign/config.hpp"

#include <fstream>
#include <set>

#include "xalign/error.hpp"
#include "xalign/hash.hpp"

namespace xalign {

namespace {

using json = nlohmann::json;

void check_keys(const json& j, const std::set<std::string>& known, const std::string& section) {
  if (!j.is_object()) throw ConfigError(section + " must be an object");
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError(section + ": unknown key '" + key + "'");
}

LanguageCode known_language(const std::string& code) {
  LanguageCode lang(code);
  if (!LanguageSet::default_registry().contains(lang)) throw ConfigError("unknown language code '" + code + "'");
  return lang;
}

std::vector<LanguageCode> language_list(const json& j, const std::string& key) {
  if (!j.is_array()) throw ConfigError("'" + key + "' must be a list of language codes");
  std::vector<LanguageCode> out;
  std::set<LanguageCode> seen;
  for (const auto& item : j) {
    const auto lang = known_language(item.get<std::string>());
    if (!seen.insert(lang).second) throw ConfigError("'" + key + "' lists '" + lang.str() + "' twice");
    out.push_back(lang);
  }
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return (path.is_absolute() ? path : base / path).lexically_normal();
}

std::optional<std::size_t> optional_count(const json& j, const char* key, std::optional<std::size_t> fallback) {
  if (!j.contains(key)) return fallback;
  if (j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::size_t>();
}

ToyConfig toy_from_json(const json& j) {
  check_keys(j, {"n_layers", "width", "n_heads", "ffn_width", "max_context", "seed", "init_scale"}, "model.toy");
  ToyConfig c;
  c.n_layers = j.value("n_layers", c.n_layers);
  c.width = j.value("width", c.width);
  c.n_heads = j.value("n_heads", c.n_heads);
  c.ffn_width = j.value("ffn_width", c.ffn_width);
  c.max_context = j.value("max_context", c.max_context);
  c.seed = j.value("seed", c.seed);
  c.init_scale = j.value("init_scale", c.init_scale);
  return c;
}

}  // namespace

std::string config_hash(const json& j) { return sha256_hex(j.dump()); }

ExperimentConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  ExperimentConfig c;
  try {
    check_keys(j,
               {"model", "languages", "english", "source_languages", "target_language", "task", "output_type", "data",
                "few_shot", "translation_template", "scoring", "seeds", "tuning", "lens", "geometry", "output_root",
                "registries", "workers"},
               "config");
    c.raw = j;
    c.hash = config_hash(j);
    c.base_dir = base_dir;

    if (j.contains("model")) {
      const auto& m = j.at("model");
      check_keys(m, {"id", "backend", "toy", "weights"}, "model");
      c.model.id = m.value("id", c.model.id);
      c.model.backend = m.value("backend", c.model.backend);
      if (c.model.backend != "toy" && c.model.backend != "random")
        throw ConfigError("model.backend must be 'toy' or 'random'");
      if (m.contains("toy")) c.model.toy = toy_from_json(m.at("toy"));
      if (m.contains("weights")) c.model.weights = resolve(base_dir, m.at("weights").get<std::string>());
    }

    const auto english = known_language(j.value("english", std::string("en")));
    if (j.contains("languages")) c.universe = LanguageSet(language_list(j.at("languages"), "languages"), english);
    else if (english != c.universe.english()) throw ConfigError("'english' differs from the default registry");

    if (!j.contains("source_languages")) throw ConfigError("'source_languages' is required");
    c.source_languages = language_list(j.at("source_languages"), "source_languages");
    if (c.source_languages.empty()) throw ConfigError("'source_languages' must not be empty");
    c.target_language = known_language(j.value("target_language", english.str()));
    c.universe.require(c.target_language);
    for (const auto& s : c.source_languages) {
      if (s == c.target_language)
        throw ConfigError("target language '" + s.str() + "' must not be one of the source languages");
      c.universe.require(s);
    }

    if (!j.contains("task")) throw ConfigError("'task' is required");
    c.task = parse_task_kind(j.at("task").get<std::string>());
    c.output_type = parse_output_type(j.value("output_type", std::string("english")));

    if (!j.contains("data")) throw ConfigError("'data' is required");
    const auto& d = j.at("data");
    check_keys(d, {"train_dir", "test_dir", "fewshot_dir", "train_size", "test_size", "same_train_instances"}, "data");
    if (!d.contains("train_dir") || !d.contains("test_dir")) throw ConfigError("data.train_dir and data.test_dir are required");
    c.data.train_dir = resolve(base_dir, d.at("train_dir").get<std::string>());
    c.data.test_dir = resolve(base_dir, d.at("test_dir").get<std::string>());
    if (d.contains("fewshot_dir")) c.data.fewshot_dir = resolve(base_dir, d.at("fewshot_dir").get<std::string>());
    c.data.train_size = d.value("train_size", c.data.train_size);
    c.data.test_size = optional_count(d, "test_size", c.data.test_size);
    c.data.same_train_instances = d.value("same_train_instances", c.data.same_train_instances);
    if (c.data.train_size == 0) throw ConfigError("data.train_size must be positive");
    if (c.data.test_size && *c.data.test_size == 0) throw ConfigError("data.test_size must be positive");
    for (const auto& dir : {c.data.train_dir, c.data.test_dir, c.data.fewshot_dir.value_or(c.data.train_dir)})
      if (!std::filesystem::is_directory(dir)) throw ConfigError("data directory does not exist: " + dir.string());

    c.template_id = default_task_template(c.task);
    if (j.contains("few_shot")) {
      const auto& f = j.at("few_shot");
      check_keys(f, {"k", "template"}, "few_shot");
      c.few_shot_k = f.value("k", c.few_shot_k);
      c.template_id = f.value("template", c.template_id);
    }
    c.translation_template = j.value("translation_template", c.translation_template);
    if (j.contains("scoring")) {
      check_keys(j.at("scoring"), {"length_normalized"}, "scoring");
      c.length_normalized = j.at("scoring").value("length_normalized", false);
    }

    if (j.contains("seeds")) {
      const auto& s = j.at("seeds");
      check_keys(s, {"data", "training", "few_shot"}, "seeds");
      c.seeds.data = s.value("data", c.seeds.data);
      c.seeds.training = s.value("training", c.seeds.training);
      c.seeds.few_shot = s.value("few_shot", c.seeds.few_shot);
    }

    const json tuning = j.value("tuning", json::object());
    if (tuning.is_object() && tuning.contains("seed")) throw ConfigError("tuning.seed is set through seeds.training");
    c.tuning = tuning_config_from_json(tuning, TuningConfig::for_task(c.task));
    c.tuning.seed = c.seeds.training;
    c.tuning.validate();

    for (const auto& lang : c.universe.members())
      if (lang != c.universe.english()) c.lens.languages.push_back(lang);
    if (j.contains("lens")) {
      const auto& l = j.at("lens");
      check_keys(l, {"languages", "n_instances", "target_output", "latent_output"}, "lens");
      if (l.contains("languages")) c.lens.languages = language_list(l.at("languages"), "lens.languages");
      c.lens.n_instances = optional_count(l, "n_instances", std::nullopt);
      c.lens.target_output = parse_output_type(l.value("target_output", std::string("same_language")));
      c.lens.latent_output = parse_output_type(l.value("latent_output", std::string("english")));
    }
    for (const auto& lang : c.lens.languages) c.universe.require(lang);

    c.geometry.languages = c.universe.members();
    if (j.contains("geometry")) {
      const auto& g = j.at("geometry");
      check_keys(g, {"languages", "layers", "latent", "n_instances"}, "geometry");
      if (g.contains("languages")) c.geometry.languages = language_list(g.at("languages"), "geometry.languages");
      if (g.contains("layers")) c.geometry.layers = g.at("layers").get<std::vector<std::size_t>>();
      c.geometry.latent = parse_latent_kind(g.value("latent", std::string("logits")));
      c.geometry.n_instances = optional_count(g, "n_instances", std::nullopt);
    }
    for (const auto& lang : c.geometry.languages) c.universe.require(lang);

    c.output_root = resolve(base_dir, j.value("output_root", std::string("runs")));
    if (j.contains("registries")) {
      const auto& r = j.at("registries");
      check_keys(r, {"surfaces", "templates"}, "registries");
      if (r.contains("surfaces")) c.surfaces_path = resolve(base_dir, r.at("surfaces").get<std::string>());
      if (r.contains("templates")) c.templates_path = resolve(base_dir, r.at("templates").get<std::string>());
    }
    for (const auto& p : {c.surfaces_path, c.templates_path, c.model.weights})
      if (p && !std::filesystem::exists(*p)) throw ConfigError("referenced file does not exist: " + p->string());
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(j, std::filesystem::absolute(path).parent_path());
}

}  // namespace xalign
