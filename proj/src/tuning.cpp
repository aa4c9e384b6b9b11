#include "xalign/tuning.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <numbers>
#include <sstream>

#include "xalign/error.hpp"
#include "xalign/random.hpp"

namespace xalign {

using nlohmann::json;

TuningConfig TuningConfig::for_task(TaskKind task) {
  TuningConfig c;
  c.epochs = task == TaskKind::kParaphrase ? 1 : 3;
  return c;
}

void TuningConfig::validate() const {
  if (adapter_rank == 0) throw ConfigError("tuning: adapter_rank must be positive");
  if (!(adapter_alpha > 0.0)) throw ConfigError("tuning: adapter_alpha must be positive");
  if (batch_size == 0) throw ConfigError("tuning: batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("tuning: learning_rate must be positive");
  if (!(val_fraction > 0.0 && val_fraction < 0.5)) throw ConfigError("tuning: val_fraction must be in (0, 0.5)");
  if (lr_schedule != "cosine" && lr_schedule != "constant")
    throw ConfigError("tuning: unknown lr_schedule '" + lr_schedule + "'");
  if (max_seq_len == 0) throw ConfigError("tuning: max_seq_len must be positive");
  if (weight_decay < 0.0) throw ConfigError("tuning: weight_decay must be non-negative");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0 && adam_beta2 >= 0.0 && adam_beta2 < 1.0 && adam_epsilon > 0.0))
    throw ConfigError("tuning: invalid optimizer moments");
}

std::string TuningConfig::fingerprint() const {
  std::ostringstream out;
  out.precision(17);
  out << "rank=" << adapter_rank << ";alpha=" << adapter_alpha << ";epochs=" << epochs << ";batch=" << batch_size
      << ";lr=" << learning_rate << ";val=" << val_fraction << ";sched=" << lr_schedule
      << ";max_len=" << max_seq_len << ";seed=" << seed << ";warmup=" << warmup_steps << ";wd=" << weight_decay
      << ";betas=" << adam_beta1 << "," << adam_beta2 << ";eps=" << adam_epsilon;
  return out.str();
}

json to_json(const TuningConfig& c) {
  return {{"adapter_rank", c.adapter_rank}, {"adapter_alpha", c.adapter_alpha}, {"epochs", c.epochs},
          {"batch_size", c.batch_size},     {"learning_rate", c.learning_rate}, {"val_fraction", c.val_fraction},
          {"lr_schedule", c.lr_schedule},   {"max_seq_len", c.max_seq_len},     {"seed", c.seed},
          {"warmup_steps", c.warmup_steps}, {"weight_decay", c.weight_decay},   {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},     {"adam_epsilon", c.adam_epsilon}};
}

TuningConfig tuning_config_from_json(const json& j, TuningConfig c) {
  if (!j.is_object()) throw ConfigError("tuning section must be an object");
  static const std::set<std::string> known{"adapter_rank", "adapter_alpha", "epochs",       "batch_size",
                                           "learning_rate", "val_fraction", "lr_schedule", "max_seq_len",
                                           "seed",          "warmup_steps", "weight_decay", "adam_beta1",
                                           "adam_beta2",    "adam_epsilon"};
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("tuning section: unknown key '" + key + "'");
  try {
    c.adapter_rank = j.value("adapter_rank", c.adapter_rank);
    c.adapter_alpha = j.value("adapter_alpha", c.adapter_alpha);
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.val_fraction = j.value("val_fraction", c.val_fraction);
    c.lr_schedule = j.value("lr_schedule", c.lr_schedule);
    c.max_seq_len = j.value("max_seq_len", c.max_seq_len);
    c.seed = j.value("seed", c.seed);
    c.warmup_steps = j.value("warmup_steps", c.warmup_steps);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_epsilon = j.value("adam_epsilon", c.adam_epsilon);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("tuning section: ") + e.what());
  }
  return c;
}

json to_json(const TuningReport& r, bool include_wall_time) {
  json j = {{"initial_train_loss", r.initial_train_loss},
            {"initial_val_loss", r.initial_val_loss},
            {"epoch_train_loss", r.epoch_train_loss},
            {"epoch_val_loss", r.epoch_val_loss},
            {"final_train_loss", r.final_train_loss},
            {"final_val_loss", r.final_val_loss},
            {"final_loss", r.final_train_loss},
            {"n_train", r.n_train},
            {"n_val", r.n_val},
            {"steps", r.steps},
            {"truncated", r.truncated},
            {"degenerate_pairs", r.degenerate_pairs}};
  if (include_wall_time) j["wall_time_seconds"] = r.wall_time_seconds;
  return j;
}

AdapterWeights init_adapter(const Backend& backend, const TuningConfig& config) {
  const auto targets = backend.adapter_targets();
  if (targets.empty()) throw TuningError("backend '" + backend.architecture() + "' exposes no adapter targets");
  AdapterWeights adapter;
  adapter.architecture = backend.architecture();
  adapter.config_fingerprint = config.fingerprint();
  adapter.rank = config.adapter_rank;
  adapter.alpha = config.adapter_alpha;
  Rng rng(derive_seed(config.seed, 2));
  for (const auto& t : targets) {
    LoraFactor f{t.name, t.out_dim, t.in_dim, {}, {}};
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.in_dim));
    f.a.resize(config.adapter_rank * t.in_dim);
    for (double& x : f.a) x = (2.0 * rng.uniform() - 1.0) * bound;
    f.b.assign(t.out_dim * config.adapter_rank, 0.0);
    adapter.factors.push_back(std::move(f));
  }
  return adapter;
}

std::size_t validation_size(std::size_t n, double fraction) {
  if (n == 0) return 0;
  const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  return std::min(n_val, n - 1);
}

TrainExample make_train_example(const Backend& backend, const SupervisedExample& example) {
  auto ids = backend.tokenize(example.prompt).ids;
  const auto completion = backend.tokenize(example.completion).ids;
  if (ids.empty() || completion.empty()) throw TuningError("training example with empty prompt or completion");
  const std::size_t prompt_len = ids.size();
  ids.insert(ids.end(), completion.begin(), completion.end());
  TrainExample ex;
  ex.targets.assign(ids.size(), 0);
  ex.loss_mask.assign(ids.size(), 0);
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    ex.targets[i] = ids[i + 1];
    ex.loss_mask[i] = i + 1 >= prompt_len ? 1 : 0;
  }
  ex.ids = std::move(ids);
  return ex;
}

namespace {

double scheduled_lr(const TuningConfig& c, std::size_t step, std::size_t total_steps) {
  if (c.warmup_steps > 0 && step < c.warmup_steps)
    return c.learning_rate * static_cast<double>(step + 1) / static_cast<double>(c.warmup_steps);
  if (c.lr_schedule == "constant" || total_steps <= c.warmup_steps) return c.learning_rate;
  const double progress =
      static_cast<double>(step - c.warmup_steps) / static_cast<double>(total_steps - c.warmup_steps);
  return c.learning_rate * 0.5 * (1.0 + std::cos(std::numbers::pi * progress));
}

double mean_loss(const Backend& backend, const std::vector<TrainExample>& examples, const AdapterWeights& adapter) {
  if (examples.empty()) return 0.0;
  return backend.train_step(examples, adapter, nullptr);
}

void check_finite(double loss, const std::string& where) {
  if (!std::isfinite(loss)) throw NumericError("non-finite loss " + std::to_string(loss) + " at " + where);
}

// Decoupled weight decay Adam state for all factor entries.
class AdamW {
 public:
  AdamW(const AdapterWeights& shape, const TuningConfig& c) : c_(c), m_(shape.zeros_like()), v_(shape.zeros_like()) {}

  void step(AdapterWeights& params, const AdapterWeights& grad, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(c_.adam_beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(c_.adam_beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.factors.size(); ++i) {
      update(params.factors[i].a, grad.factors[i].a, m_.factors[i].a, v_.factors[i].a, lr, bc1, bc2);
      update(params.factors[i].b, grad.factors[i].b, m_.factors[i].b, v_.factors[i].b, lr, bc1, bc2);
    }
  }

 private:
  void update(std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m, std::vector<double>& v,
              double lr, double bc1, double bc2) const {
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = c_.adam_beta1 * m[k] + (1.0 - c_.adam_beta1) * g[k];
      v[k] = c_.adam_beta2 * v[k] + (1.0 - c_.adam_beta2) * g[k] * g[k];
      const double m_hat = m[k] / bc1;
      const double v_hat = v[k] / bc2;
      p[k] -= lr * (m_hat / (std::sqrt(v_hat) + c_.adam_epsilon) + c_.weight_decay * p[k]);
    }
  }

  const TuningConfig& c_;
  AdapterWeights m_;
  AdapterWeights v_;
  std::size_t t_ = 0;
};

}  // namespace

std::pair<AdapterWeights, TuningReport> fine_tune(const ModelHandle& handle, const TrainingCorpus& corpus,
                                                  const TuningConfig& config, const TemplateRegistry& templates,
                                                  const TuningProgress& progress, const std::string& template_id) {
  config.validate();
  if (corpus.pairs.empty()) throw TuningError("fine_tune: empty training corpus");
  const auto started = std::chrono::steady_clock::now();
  const Backend& backend = handle.backend();
  AdapterWeights adapter = init_adapter(backend, config);

  TuningReport report;
  RenderCounters counters;
  const std::size_t limit = std::min(config.max_seq_len, backend.max_context());
  std::vector<TrainExample> examples;
  examples.reserve(corpus.pairs.size());
  for (const auto& pair : corpus.pairs) {
    auto te = make_train_example(backend, render_translation_example(pair, templates, &counters, template_id));
    if (te.ids.size() > limit) {
      ParallelPair cut = pair;
      while (te.ids.size() > limit) {
        if (cut.source_text.empty())
          throw TuningError("pair '" + pair.instance_id + "' exceeds max_seq_len even without source text");
        const std::size_t excess = te.ids.size() - limit;
        std::size_t keep = cut.source_text.size() > excess ? cut.source_text.size() - excess : 0;
        while (keep > 0 && (static_cast<unsigned char>(cut.source_text[keep]) & 0xC0) == 0x80) --keep;
        cut.source_text.resize(keep);
        te = make_train_example(backend, render_translation_example(cut, templates, nullptr, template_id));
      }
      ++report.truncated;
    }
    examples.push_back(std::move(te));
  }
  report.degenerate_pairs = counters.degenerate;

  // Seeded train/validation split.
  const std::size_t n = examples.size();
  const std::size_t n_val = validation_size(n, config.val_fraction);
  const auto split = seeded_permutation(n, derive_seed(config.seed, 1));
  std::vector<TrainExample> train, val;
  for (std::size_t i = 0; i < n; ++i) (i < n_val ? val : train).push_back(std::move(examples[split[i]]));
  report.n_train = train.size();
  report.n_val = val.size();

  report.initial_train_loss = mean_loss(backend, train, adapter);
  report.initial_val_loss = mean_loss(backend, val, adapter);
  check_finite(report.initial_train_loss, "initialization");

  const std::size_t batches_per_epoch = (train.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = batches_per_epoch * config.epochs;
  AdamW optimizer(adapter, config);
  AdapterWeights grad;
  std::vector<TrainExample> batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = seeded_permutation(train.size(), derive_seed(config.seed, 100 + epoch));
    double epoch_loss = 0.0;
    for (std::size_t b = 0; b < batches_per_epoch; ++b) {
      batch.clear();
      for (std::size_t i = b * config.batch_size; i < std::min(train.size(), (b + 1) * config.batch_size); ++i)
        batch.push_back(train[order[i]]);
      const double loss = backend.train_step(batch, adapter, &grad);
      check_finite(loss, "epoch " + std::to_string(epoch) + " step " + std::to_string(report.steps));
      optimizer.step(adapter, grad, scheduled_lr(config, report.steps, total_steps));
      ++report.steps;
      epoch_loss += loss;
      if (progress) progress(epoch, report.steps, loss);
    }
    report.epoch_train_loss.push_back(epoch_loss / static_cast<double>(batches_per_epoch));
    report.epoch_val_loss.push_back(mean_loss(backend, val, adapter));
    check_finite(report.epoch_val_loss.back(), "validation after epoch " + std::to_string(epoch));
  }
  if (config.epochs == 0) {
    report.final_train_loss = report.initial_train_loss;
    report.final_val_loss = report.initial_val_loss;
  } else {
    report.final_train_loss = mean_loss(backend, train, adapter);
    report.final_val_loss = report.epoch_val_loss.back();
    check_finite(report.final_train_loss, "final evaluation");
  }
  report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(adapter), report};
}

ModelHandle apply_adapter(const ModelHandle& handle, const AdapterWeights& adapter) {
  const Backend& backend = handle.backend();
  if (adapter.architecture != backend.architecture())
    throw TuningError("adapter built for '" + adapter.architecture + "' cannot attach to '" +
                      backend.architecture() + "'");
  const auto targets = backend.adapter_targets();
  for (const auto& f : adapter.factors) {
    auto it = std::find_if(targets.begin(), targets.end(), [&](const auto& t) { return t.name == f.target; });
    if (it == targets.end() || it->out_dim != f.out_dim || it->in_dim != f.in_dim ||
        f.a.size() != adapter.rank * f.in_dim || f.b.size() != f.out_dim * adapter.rank)
      throw TuningError("adapter factor '" + f.target + "' does not match the backend architecture");
  }
  return handle.with_adapter(std::make_shared<const AdapterWeights>(adapter));
}

ModelHandle detach_adapter(const ModelHandle& handle) { return handle.detached(); }

}  // namespace xalign
