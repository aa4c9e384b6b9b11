#include "xalign/backend.hpp"

#include <algorithm>
#include <cmath>

#include "xalign/error.hpp"

namespace xalign {

double Backend::train_step(std::span<const TrainExample>, const AdapterWeights&, AdapterWeights*) const {
  throw BackendError("backend '" + architecture() + "' does not support training");
}

ModelHandle::ModelHandle(std::string model_id, std::shared_ptr<const Backend> backend,
                         std::shared_ptr<const AdapterWeights> adapter)
    : model_id_(std::move(model_id)), backend_(std::move(backend)), adapter_(std::move(adapter)) {
  if (!backend_) throw BackendError("model handle needs a backend");
  if (backend_->n_layers() < 1) throw BackendError("backend reports zero layers");
}

ModelHandle ModelHandle::with_adapter(std::shared_ptr<const AdapterWeights> adapter) const {
  return ModelHandle(model_id_, backend_, std::move(adapter));
}

ModelHandle ModelHandle::detached() const { return ModelHandle(model_id_, backend_, nullptr); }

namespace {
void check_context(const Backend& backend, std::size_t n_tokens) {
  if (n_tokens > backend.max_context())
    throw ContextOverflowError("sequence of " + std::to_string(n_tokens) + " tokens exceeds context limit " +
                               std::to_string(backend.max_context()));
}
}  // namespace

double score_completion(const ModelHandle& handle, std::string_view prompt, std::string_view completion) {
  if (completion.empty()) throw BackendError("score_completion: empty completion");
  const auto& backend = handle.backend();
  auto ids = backend.tokenize(prompt).ids;
  const auto completion_ids = backend.tokenize(completion).ids;
  if (ids.empty()) throw BackendError("score_completion: empty prompt");
  const std::size_t first = ids.size();
  ids.insert(ids.end(), completion_ids.begin(), completion_ids.end());
  check_context(backend, ids.size());
  const auto lps = backend.token_log_probs(ids, first, handle.adapter());
  double total = 0.0;
  for (double lp : lps) total += lp;
  return total;
}

ForwardTrace forward_trace(const ModelHandle& handle, std::string_view prompt) {
  if (prompt.empty()) throw BackendError("forward_trace: empty prompt");
  const auto ids = handle.backend().tokenize(prompt).ids;
  check_context(handle.backend(), ids.size());
  return handle.backend().forward(ids, true, handle.adapter());
}

std::vector<double> unembed(const ModelHandle& handle, std::span<const double> hidden) {
  if (hidden.size() != handle.backend().width())
    throw BackendError("unembed: hidden width " + std::to_string(hidden.size()) + " != model width " +
                       std::to_string(handle.backend().width()));
  return handle.backend().unembed(hidden);
}

std::vector<double> log_softmax(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double x : logits) sum += std::exp(x - peak);
  const double lse = peak + std::log(sum);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  auto out = log_softmax(logits);
  for (double& x : out) x = std::exp(x);
  return out;
}

}  // namespace xalign
