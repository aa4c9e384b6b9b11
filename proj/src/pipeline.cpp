#include "xalign/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "xalign/corpus.hpp"
#include "xalign/error.hpp"
#include "xalign/eval.hpp"
#include "xalign/geometry.hpp"
#include "xalign/lens.hpp"
#include "xalign/parallel.hpp"
#include "xalign/random.hpp"
#include "xalign/random_backend.hpp"
#include "xalign/toy_transformer.hpp"
#include "xalign/tuning.hpp"

namespace xalign {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct Run {
  const ExperimentConfig& config;
  const CommandOptions& options;
  fs::path dir;
  RunManifest manifest;
  SurfaceRegistry surfaces;
  TemplateRegistry templates;

  Run(const ExperimentConfig& c, const CommandOptions& o)
      : config(c),
        options(o),
        dir(c.run_dir()),
        surfaces(c.surfaces_path ? SurfaceRegistry::load(*c.surfaces_path) : SurfaceRegistry::builtin()),
        templates(c.templates_path ? TemplateRegistry::load(*c.templates_path) : TemplateRegistry::builtin()) {
    if (fs::exists(dir / "manifest.json")) {
      manifest = RunManifest::load(dir);
      if (manifest.config_hash != c.hash) throw DataError("run directory " + dir.string() + " belongs to another config");
    }
    manifest.config_hash = c.hash;
    manifest.seeds = {{"data", c.seeds.data}, {"training", c.seeds.training}, {"few_shot", c.seeds.few_shot}};
    fs::create_directories(dir);
    const auto config_copy = dir / "config.json";
    write_text(config_copy, c.raw.dump(2) + "\n");
    manifest.record(dir, "config", config_copy);
  }

  std::ostream& log() const { return options.log ? *options.log : std::clog; }

  static void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
  }

  void finish(const std::string& stage, const Stopwatch& watch) {
    manifest.stamp(stage, watch.seconds());
    manifest.save(dir);
  }

  std::string variant() const { return options.adapter ? "tuned" : "base"; }

  ModelHandle model() const {
    auto base = make_model(config);
    if (!options.adapter) return base;
    if (!fs::exists(*options.adapter)) throw ConfigError("adapter file does not exist: " + options.adapter->string());
    return apply_adapter(base, load_adapter(*options.adapter));
  }

  fs::path test_file(const LanguageCode& lang) const { return dir / "data" / "test" / (lang.str() + ".jsonl"); }
  fs::path fewshot_file(const LanguageCode& lang) const { return dir / "data" / "fewshot" / (lang.str() + ".jsonl"); }

  std::vector<TaskInstance> test_set(const LanguageCode& lang) const {
    const auto path = test_file(lang);
    if (!fs::exists(path)) throw DataError("missing test set " + path.string() + " (run build-data first)");
    auto rows = load_task_dataset(path, config.task, lang);
    if (rows.empty()) throw DataError("test set for '" + lang.str() + "' has no instances");
    return rows;
  }

  std::vector<TaskInstance> exemplars(const LanguageCode& lang) const {
    if (config.few_shot_k == 0) return {};
    const auto path = fewshot_file(lang);
    if (!fs::exists(path)) throw DataError("missing few-shot file " + path.string() + " (run build-data first)");
    return load_task_dataset(path, config.task, lang);
  }

  std::size_t workers() const { return resolve_workers(config.workers); }
};

fs::path data_file(const fs::path& dir, const LanguageCode& lang) { return dir / (lang.str() + ".jsonl"); }

std::vector<TaskInstance> load_split(const fs::path& dir, const ExperimentConfig& config, const LanguageCode& lang) {
  const auto path = data_file(dir, lang);
  if (!fs::exists(path)) throw DataError("missing dataset " + path.string());
  return load_task_dataset(path, config.task, lang);
}

std::vector<TaskInstance> select_ids(const std::vector<TaskInstance>& rows, const std::set<std::string>& ids,
                                     const LanguageCode& lang) {
  std::vector<TaskInstance> out;
  for (const auto& r : rows)
    if (ids.contains(r.id)) out.push_back(r);
  if (out.size() != ids.size()) {
    std::set<std::string> have;
    for (const auto& r : out) have.insert(r.id);
    std::string msg = "language '" + lang.str() + "' is missing instance ids:";
    std::size_t shown = 0;
    for (const auto& id : ids)
      if (!have.contains(id) && shown++ < 10) msg += " " + id;
    throw AlignmentError(msg);
  }
  return out;
}

std::size_t label_surface_hits(const std::vector<ParallelPair>& pairs, const std::map<std::string, std::string>& gold,
                               const ExperimentConfig& config, const SurfaceRegistry& surfaces) {
  std::size_t hits = 0;
  std::map<LanguageCode, AnswerSet> cache;
  auto answers = [&](const LanguageCode& lang) -> const AnswerSet& {
    auto it = cache.find(lang);
    if (it == cache.end()) it = cache.emplace(lang, surfaces.lookup(config.task, lang, config.output_type)).first;
    return it->second;
  };
  for (const auto& p : pairs) {
    const auto& label = gold.at(p.instance_id);
    for (const auto* side : {&p.source_lang, &p.target_lang}) {
      const auto& surface = answers(*side).surface_for(label);
      if (p.source_text.find(surface) != std::string::npos || p.target_text.find(surface) != std::string::npos)
        ++hits;
    }
  }
  return hits;
}

std::string prompt_for(const Run& run, const TaskInstance& instance, const std::vector<TaskInstance>& shots,
                       const AnswerSet& answers) {
  return render_task_prompt(make_prompt_spec(instance, shots, answers, run.config.template_id), run.templates);
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::vector<TaskInstance> first_n(std::vector<TaskInstance> rows, std::optional<std::size_t> n) {
  if (n && *n < rows.size()) rows.resize(*n);
  return rows;
}

}  // namespace

ModelHandle make_model(const ExperimentConfig& config) {
  const auto& m = config.model;
  if (m.backend == "random")
    return ModelHandle(m.id, std::make_shared<RandomLogitBackend>(m.toy.seed, m.toy.n_layers, m.toy.width));
  if (m.weights) return ModelHandle(m.id, std::make_shared<ToyTransformer>(ToyTransformer::load(*m.weights)));
  return ModelHandle(m.id, std::make_shared<ToyTransformer>(m.toy));
}

CommandResult cmd_build_data(const ExperimentConfig& config, const CommandOptions& options) {
  Stopwatch watch;
  Run run(config, options);
  CommandResult result{run.dir, {}};
  const auto data_dir = run.dir / "data";
  const auto& target = config.target_language;
  const auto& english = config.universe.english();

  // Translation pairs.
  const auto target_rows = load_split(config.data.train_dir, config, target);
  std::set<std::string> shared_ids;
  if (config.data.same_train_instances) {
    if (config.data.train_size > target_rows.size())
      throw DataError("train_size " + std::to_string(config.data.train_size) + " exceeds the " +
                      std::to_string(target_rows.size()) + " '" + target.str() + "' training instances");
    shared_ids = instance_ids(sample_subsets(target_rows, config.data.train_size, derive_seed(config.seeds.data, 0)));
  }
  std::vector<std::vector<ParallelPair>> directions;
  std::map<std::string, std::string> gold;
  for (const auto& r : target_rows) gold[r.id] = r.gold;
  ojson counts = ojson::object();
  for (std::size_t i = 0; i < config.source_languages.size(); ++i) {
    const auto& src = config.source_languages[i];
    const auto source_rows = load_split(config.data.train_dir, config, src);
    std::set<std::string> ids = shared_ids;
    if (!config.data.same_train_instances) {
      if (config.data.train_size > source_rows.size())
        throw DataError("train_size exceeds the '" + src.str() + "' training instances");
      ids = instance_ids(sample_subsets(source_rows, config.data.train_size, derive_seed(config.seeds.data, 1 + i)));
    }
    auto pairs = build_translation_pairs(select_ids(source_rows, ids, src), select_ids(target_rows, ids, target));
    const auto path = data_dir / "pairs" / (src.str() + "-" + target.str() + ".jsonl");
    fs::create_directories(path.parent_path());
    write_pairs(path, pairs);
    run.manifest.record(run.dir, "data.pairs." + src.str() + "-" + target.str(), path);
    result.outputs.push_back(path);
    counts[src.str() + "-" + target.str()] = pairs.size();
    directions.push_back(std::move(pairs));
  }
  const auto corpus = mix_corpora(directions, derive_seed(config.seeds.data, 100));
  const auto corpus_path = data_dir / "corpus.jsonl";
  write_pairs(corpus_path, corpus.pairs);
  run.manifest.record(run.dir, "data.corpus", corpus_path);
  result.outputs.push_back(corpus_path);
  ojson provenance = ojson::array();
  for (const auto& p : corpus.provenance)
    provenance.push_back({{"src_lang", p.source_lang.str()}, {"tgt_lang", p.target_lang.str()}, {"count", p.count}});
  const auto train_ids = instance_ids(corpus.pairs);

  // Test sets share one id sample across languages.
  const auto english_test = load_split(config.data.test_dir, config, english);
  if (config.data.test_size && *config.data.test_size > english_test.size())
    throw DataError("test_size " + std::to_string(*config.data.test_size) + " exceeds the " +
                    std::to_string(english_test.size()) + " test instances");
  const auto test_ids = config.data.test_size
                            ? instance_ids(sample_subsets(english_test, *config.data.test_size,
                                                          derive_seed(config.seeds.data, 200)))
                            : instance_ids(english_test);
  std::vector<std::string> overlap;
  std::set_intersection(train_ids.begin(), train_ids.end(), test_ids.begin(), test_ids.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty())
    throw DataError(std::to_string(overlap.size()) + " test instance ids also appear in the training corpus, e.g. '" +
                    overlap.front() + "'");
  ojson test_counts = ojson::object();
  for (const auto& lang : config.universe.members()) {
    const auto rows = select_ids(load_split(config.data.test_dir, config, lang), test_ids, lang);
    write_task_dataset(run.test_file(lang), rows);
    run.manifest.record(run.dir, "data.test." + lang.str(), run.test_file(lang));
    result.outputs.push_back(run.test_file(lang));
    test_counts[lang.str()] = rows.size();
  }

  // Few-shot exemplars: one id selection from the English pool, mirrored in every language.
  std::set<std::string> exclusions = train_ids;
  exclusions.insert(test_ids.begin(), test_ids.end());
  ojson fewshot_ids = ojson::array();
  if (config.few_shot_k > 0) {
    const auto pool_dir = config.data.fewshot_dir.value_or(config.data.train_dir);
    const auto chosen = select_few_shot(load_split(pool_dir, config, english), config.few_shot_k, exclusions,
                                        config.seeds.few_shot);
    std::vector<std::string> order;
    for (const auto& c : chosen) order.push_back(c.id);
    for (const auto& lang : config.universe.members()) {
      const auto rows = load_split(pool_dir, config, lang);
      std::vector<TaskInstance> picked;
      for (const auto& id : order) {
        const auto it = std::find_if(rows.begin(), rows.end(), [&](const TaskInstance& r) { return r.id == id; });
        if (it == rows.end()) throw AlignmentError("few-shot id '" + id + "' missing for language '" + lang.str() + "'");
        picked.push_back(*it);
      }
      write_task_dataset(run.fewshot_file(lang), picked);
      run.manifest.record(run.dir, "data.fewshot." + lang.str(), run.fewshot_file(lang));
      result.outputs.push_back(run.fewshot_file(lang));
    }
    for (const auto& id : order) fewshot_ids.push_back(id);
  }

  RenderCounters counters;
  for (const auto& p : corpus.pairs) render_translation_example(p, run.templates, &counters, config.translation_template);

  ojson summary;
  summary["pairs_per_direction"] = counts;
  summary["corpus_pairs"] = corpus.pairs.size();
  summary["shuffle_seed"] = corpus.shuffle_seed;
  summary["provenance"] = provenance;
  summary["degenerate_pairs"] = counters.degenerate;
  summary["label_surface_hits"] = label_surface_hits(corpus.pairs, gold, config, run.surfaces);
  summary["test_instances"] = test_counts;
  summary["few_shot_ids"] = fewshot_ids;
  const auto summary_path = data_dir / "summary.json";
  Run::write_text(summary_path, summary.dump(2) + "\n");
  run.manifest.record(run.dir, "data.summary", summary_path);
  result.outputs.push_back(summary_path);

  run.log() << "build-data: " << corpus.pairs.size() << " pairs, " << test_ids.size() << " test instances x "
            << config.universe.size() << " languages -> " << run.dir.string() << "\n";
  run.finish("build-data", watch);
  return result;
}

CommandResult cmd_tune(const ExperimentConfig& config, const CommandOptions& options) {
  Stopwatch watch;
  Run run(config, options);
  const auto corpus_path = run.dir / "data" / "corpus.jsonl";
  if (!fs::exists(corpus_path)) throw DataError("missing corpus " + corpus_path.string() + " (run build-data first)");
  TrainingCorpus corpus;
  corpus.pairs = read_pairs(corpus_path);
  if (corpus.pairs.empty()) throw DataError("training corpus is empty");

  const auto base = make_model(config);
  auto progress = [&](std::size_t epoch, std::size_t step, double loss) {
    run.log() << "tune: epoch " << epoch << " step " << step << " loss " << loss << "\n";
  };
  const auto [adapter, report] = fine_tune(base, corpus, config.tuning, run.templates, progress,
                                           config.translation_template);

  const auto adapter_path = run.dir / "adapter" / "adapter.bin";
  fs::create_directories(adapter_path.parent_path());
  save_adapter(adapter_path, adapter);
  const auto report_path = run.dir / "adapter" / "tuning_report.json";
  Run::write_text(report_path, to_json(report).dump(2) + "\n");
  run.manifest.record(run.dir, "adapter", adapter_path);
  run.manifest.record(run.dir, "tuning_report", report_path);
  run.log() << "tune: loss " << report.initial_train_loss << " -> " << report.final_train_loss << " ("
            << report.steps << " steps, " << report.truncated << " truncated)\n";
  run.finish("tune", watch);
  return {run.dir, {adapter_path, report_path}};
}

CommandResult cmd_eval(const ExperimentConfig& config, const CommandOptions& options) {
  Stopwatch watch;
  Run run(config, options);
  const auto handle = run.model();
  const ScoringOptions scoring{config.length_normalized};

  std::vector<Prediction> predictions;
  for (const auto& lang : config.universe.members()) {
    const auto tests = run.test_set(lang);
    const auto shots = run.exemplars(lang);
    const auto answers = run.surfaces.lookup(config.task, lang, config.output_type);
    auto preds = parallel_map(tests.size(), run.workers(), [&](std::size_t i) {
      return predict_label(handle, make_prompt_spec(tests[i], shots, answers, config.template_id), run.templates,
                           scoring);
    });
    predictions.insert(predictions.end(), preds.begin(), preds.end());
  }
  const auto summary = summarize(predictions, config.universe);

  const auto out_dir = run.dir / "eval" / run.variant();
  fs::create_directories(out_dir);
  write_eval_csv(out_dir / "accuracy.csv", summary);
  write_predictions(out_dir / "predictions.jsonl", predictions);
  run.manifest.record(run.dir, "eval." + run.variant() + ".accuracy", out_dir / "accuracy.csv");
  run.manifest.record(run.dir, "eval." + run.variant() + ".predictions", out_dir / "predictions.jsonl");
  run.log() << "eval (" << run.variant() << "): average accuracy " << format_percent(summary.average) << "%\n";
  run.finish("eval." + run.variant(), watch);
  return {run.dir, {out_dir / "accuracy.csv", out_dir / "predictions.jsonl"}};
}

CommandResult cmd_lens(const ExperimentConfig& config, const CommandOptions& options) {
  Stopwatch watch;
  Run run(config, options);
  if (config.lens.languages.empty()) throw ConfigError("lens.languages is empty");
  const auto handle = run.model();

  // Refuse overlapping languages before any tracing starts.
  std::map<LanguageCode, std::pair<AnswerSet, AnswerSet>> sets;
  for (const auto& lang : config.lens.languages) {
    auto target = run.surfaces.lookup(config.task, lang, config.lens.target_output);
    auto latent = run.surfaces.lookup(config.task, lang, config.lens.latent_output);
    const auto probe = build_tracked_sets(handle.backend(), target, latent, target.surfaces.front().first);
    if (probe.prefix_overlap && !options.allow_overlap)
      throw ConfigError("answer surfaces of language '" + lang.str() +
                        "' share first tokens with the latent set; pass --allow-overlap to trace it anyway");
    sets.emplace(lang, std::make_pair(std::move(target), std::move(latent)));
  }

  CommandResult result{run.dir, {}};
  const auto out_dir = run.dir / "lens" / run.variant();
  for (const auto& lang : config.lens.languages) {
    const auto& [target, latent] = sets.at(lang);
    const auto tests = first_n(run.test_set(lang), config.lens.n_instances);
    const auto shots = run.exemplars(lang);
    bool overlap = false;
    auto traces = parallel_map(tests.size(), run.workers(), [&](std::size_t i) {
      const auto tracked = build_tracked_sets(handle.backend(), target, latent, tests[i].gold);
      return std::make_pair(layer_probabilities(handle, prompt_for(run, tests[i], shots, target), tracked),
                            tracked.prefix_overlap);
    });
    std::vector<LayerTrace> plain;
    for (auto& [t, o] : traces) {
      overlap = overlap || o;
      plain.push_back(std::move(t));
    }
    const auto agg = aggregate_traces(plain);
    const auto problems = trace_violations(agg, 1e-9);
    if (!problems.empty()) throw NumericError("trace for '" + lang.str() + "' violates invariants: " + problems.front());
    const auto path = out_dir / (lang.str() + ".json");
    Run::write_text(path, trace_to_json(agg, overlap).dump(2) + "\n");
    run.manifest.record(run.dir, "lens." + run.variant() + "." + lang.str(), path);
    result.outputs.push_back(path);
  }
  run.log() << "lens (" << run.variant() << "): " << result.outputs.size() << " trace files\n";
  run.finish("lens." + run.variant(), watch);
  return result;
}

CommandResult cmd_geometry(const ExperimentConfig& config, const CommandOptions& options) {
  Stopwatch watch;
  Run run(config, options);
  const auto& g = config.geometry;
  if (g.languages.size() < 2) throw ConfigError("geometry needs at least two languages");
  if (g.layers.empty()) throw ConfigError("geometry.layers is empty");

  std::map<LanguageCode, std::vector<LatentPrompt>> prompts;
  for (const auto& lang : g.languages) {
    auto tests = run.test_set(lang);
    std::sort(tests.begin(), tests.end(), [](const TaskInstance& a, const TaskInstance& b) { return a.id < b.id; });
    tests = first_n(std::move(tests), g.n_instances);
    const auto shots = run.exemplars(lang);
    const auto answers = run.surfaces.lookup(config.task, lang, config.output_type);
    auto& out = prompts[lang];
    for (const auto& t : tests) out.push_back({t.id, prompt_for(run, t, shots, answers)});
  }

  auto collect = [&](const ModelHandle& handle) {
    // Fan out by language; each language's rows stay in id order.
    std::vector<LanguageCode> langs;
    for (const auto& [lang, p] : prompts) langs.push_back(lang);
    auto per_lang = parallel_map(langs.size(), run.workers(), [&](std::size_t i) {
      std::map<LanguageCode, std::vector<LatentPrompt>> one{{langs[i], prompts.at(langs[i])}};
      return collect_latents(handle, one, g.layers, g.latent);
    });
    std::map<std::size_t, std::vector<LatentMatrix>> merged;
    for (auto& m : per_lang)
      for (auto& [layer, mats] : m)
        for (auto& mat : mats) merged[layer].push_back(std::move(mat));
    for (auto& [layer, mats] : merged) {
      for (const auto& mat : mats)
        if (mat.instance_ids != mats.front().instance_ids)
          throw AlignmentError("latent rows of '" + mat.lang.str() + "' are not aligned");
      std::stable_sort(mats.begin(), mats.end(), [&](const LatentMatrix& a, const LatentMatrix& b) {
        const auto& order = g.languages;
        return std::find(order.begin(), order.end(), a.lang) < std::find(order.begin(), order.end(), b.lang);
      });
    }
    return merged;
  };

  const auto base_handle = make_model(config);
  std::vector<std::pair<std::string, std::map<std::size_t, std::vector<LatentMatrix>>>> variants;
  variants.emplace_back("base", collect(base_handle));
  if (options.adapter) variants.emplace_back("tuned", collect(run.model()));

  CommandResult result{run.dir, {}};
  for (auto layer : g.layers) {
    std::map<std::string, std::vector<std::pair<std::string, double>>> corr;
    for (const auto& [name, latents] : variants) {
      const auto& mats = latents.at(layer);
      const auto path = run.dir / "geometry" / name / ("scatter_L" + std::to_string(layer) + ".csv");
      fs::create_directories(path.parent_path());
      write_scatter_csv(path, mats, pca_fit(stack_rows(mats), 2));
      run.manifest.record(run.dir, "geometry." + name + ".scatter_L" + std::to_string(layer), path);
      result.outputs.push_back(path);
      corr[name] = pairwise_pearson(mats);
    }
    CorrelationTable table{layer, {}};
    for (std::size_t i = 0; i < corr.at("base").size(); ++i) {
      CorrelationRow row{corr.at("base")[i].first, corr.at("base")[i].second, std::nullopt};
      if (corr.contains("tuned")) row.trained = corr.at("tuned")[i].second;
      table.rows.push_back(row);
    }
    const auto path = run.dir / "geometry" / ("correlation_L" + std::to_string(layer) + ".csv");
    write_correlation_csv(path, table);
    run.manifest.record(run.dir, "geometry.correlation_L" + std::to_string(layer), path);
    result.outputs.push_back(path);
  }
  run.log() << "geometry: " << g.layers.size() << " layers, " << variants.size() << " model variants\n";
  run.finish("geometry", watch);
  return result;
}

CommandResult cmd_report(const ExperimentConfig& config, const CommandOptions& options) {
  Stopwatch watch;
  const auto dir = config.run_dir();
  if (!fs::exists(dir / "manifest.json")) throw DataError("no manifest in " + dir.string() + " (nothing has run yet)");
  Run run(config, options);
  auto& m = run.manifest;

  std::vector<std::string> gaps;
  for (const auto& key : m.stale(run.dir)) gaps.push_back(key + " (missing or modified)");
  auto has_prefix = [&](const std::string& prefix) {
    return std::any_of(m.artifacts.begin(), m.artifacts.end(),
                       [&](const auto& kv) { return kv.first.rfind(prefix, 0) == 0; });
  };
  if (!m.artifacts.contains("data.corpus")) gaps.push_back("data (run build-data)");
  if (!m.artifacts.contains("eval.base.accuracy")) gaps.push_back("base accuracy (run eval)");
  if (!has_prefix("lens.")) gaps.push_back("lens traces (run lens)");
  if (!has_prefix("geometry.correlation_L")) gaps.push_back("correlation tables (run geometry)");
  if (!gaps.empty()) {
    std::string msg = "report needs missing artifacts:";
    for (const auto& g : gaps) msg += "\n  - " + g;
    throw DataError(msg);
  }

  std::ostringstream md;
  md << "# Run " << m.config_hash.substr(0, 16) << "\n\n";
  md << "- model: " << config.model.id << "\n- task: " << to_string(config.task)
     << "\n- output type: " << to_string(config.output_type) << "\n- training directions: ";
  for (std::size_t i = 0; i < config.source_languages.size(); ++i)
    md << (i ? "/" : "") << config.source_languages[i].str();
  md << " => " << config.target_language.str() << "\n- chance accuracy: " << format_percent(random_baseline(config.task))
     << "%\n\n";

  std::vector<std::pair<std::string, EvalResult>> results;
  for (const auto* variant : {"base", "tuned"}) {
    const auto key = std::string("eval.") + variant + ".accuracy";
    if (m.artifacts.contains(key))
      results.emplace_back(variant, read_eval_csv(run.dir / m.artifacts.at(key).path, config.universe));
  }
  md << "## Accuracy per language (%)\n\n| model |";
  for (const auto& lang : config.universe.members()) md << ' ' << lang.str() << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < config.universe.size(); ++i) md << "---|";
  md << "\n";
  for (const auto& [name, r] : results) {
    md << "| " << name << " |";
    for (const auto& lang : config.universe.members()) md << ' ' << format_percent(r.per_language.at(lang)) << " |";
    md << "\n";
  }
  md << "\n## Average accuracy (%)\n\n| model | average |\n|---|---|\n";
  for (const auto& [name, r] : results) md << "| " << name << " | " << format_percent(r.average) << " |\n";

  md << "\n## Logit lens\n\nPer-layer means over test prompts; layer 0 is the embedding output.\n\n"
     << "| model | lang | file | peak latent_correct (layer) | final target_correct | prefix overlap |\n"
     << "|---|---|---|---|---|---|\n";
  for (const auto& [key, a] : m.artifacts) {
    if (key.rfind("lens.", 0) != 0) continue;
    std::ifstream in(run.dir / a.path);
    const auto j = json::parse(in);
    const auto trace = trace_from_json(j);
    const auto peak = std::max_element(trace.latent_correct.begin(), trace.latent_correct.end());
    const auto first_dot = key.find('.', 5);
    md << "| " << key.substr(5, first_dot - 5) << " | " << key.substr(first_dot + 1) << " | " << a.path << " | "
       << fixed4(*peak) << " (" << (peak - trace.latent_correct.begin()) << ") | "
       << fixed4(trace.target_correct.back()) << " | " << (j.at("prefix_overlap").get<bool>() ? "yes" : "no")
       << " |\n";
  }

  md << "\n## Pearson correlation of 1-D joint PCA projections\n";
  for (const auto& [key, a] : m.artifacts) {
    if (key.rfind("geometry.correlation_L", 0) != 0) continue;
    const auto layer = std::stoul(key.substr(std::string("geometry.correlation_L").size()));
    const auto table = read_correlation_csv(run.dir / a.path, layer);
    md << "\n### Layer " << layer << "\n\n| pair | base | trained |\n|---|---|---|\n";
    for (const auto& r : table.rows) {
      md << "| " << r.pair << " | " << fixed4(r.base) << " | " << (r.trained ? fixed4(*r.trained) : "") << " |\n";
    }
  }

  const auto path = run.dir / "report.md";
  Run::write_text(path, md.str());
  m.record(run.dir, "report", path);
  run.log() << "report: " << path.string() << "\n";
  run.finish("report", watch);
  return {run.dir, {path}};
}

}  // namespace xalign
