#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xalign/adapter.hpp"

namespace xalign {

using TokenId = std::int32_t;

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::size_t> offsets;  // byte offset of each token in the source text
};

// Hidden states at one traced position. hidden[0] is the embedding output,
// hidden[l] the residual stream after block l.
struct ForwardTrace {
  std::size_t position = 0;
  std::vector<std::vector<double>> hidden;
  std::vector<double> final_logits;
};

// targets[i] is the token position i should predict; only positions with
// loss_mask[i] != 0 contribute to the loss.
struct TrainExample {
  std::vector<TokenId> ids;
  std::vector<TokenId> targets;
  std::vector<std::uint8_t> loss_mask;
};

struct AdapterTarget {
  std::string name;
  std::size_t out_dim = 0;
  std::size_t in_dim = 0;
};

// Model runtime plug-in. All inference methods are const and safe to call
// concurrently; an adapter is passed per call and never stored.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string architecture() const = 0;
  virtual std::size_t n_layers() const = 0;
  virtual std::size_t width() const = 0;
  virtual std::size_t vocab_size() const = 0;
  virtual std::size_t max_context() const = 0;

  virtual TokenSequence tokenize(std::string_view text) const = 0;
  virtual std::string detokenize(std::span<const TokenId> ids) const = 0;

  // Trace at the last position of ids. Without capture_layers only final_logits is filled.
  virtual ForwardTrace forward(std::span<const TokenId> ids, bool capture_layers,
                               const AdapterWeights* adapter) const = 0;

  // log p(ids[i] | ids[..i)) for every i in [first, ids.size()); first >= 1.
  virtual std::vector<double> token_log_probs(std::span<const TokenId> ids, std::size_t first,
                                              const AdapterWeights* adapter) const = 0;

  // Final normalization followed by the unembedding projection.
  virtual std::vector<double> unembed(std::span<const double> hidden) const = 0;

  // Matrices a low-rank adapter may attach to. Empty when the backend is not trainable.
  virtual std::vector<AdapterTarget> adapter_targets() const { return {}; }

  // Mean masked negative log-likelihood over the batch. When grad is non-null it
  // receives d(loss)/d(factors) in the adapter's layout.
  virtual double train_step(std::span<const TrainExample> batch, const AdapterWeights& adapter,
                            AdapterWeights* grad) const;
};

class ModelHandle {
 public:
  ModelHandle(std::string model_id, std::shared_ptr<const Backend> backend,
              std::shared_ptr<const AdapterWeights> adapter = nullptr);

  const std::string& model_id() const noexcept { return model_id_; }
  std::size_t n_layers() const { return backend_->n_layers(); }
  std::size_t vocab_size() const { return backend_->vocab_size(); }
  const Backend& backend() const noexcept { return *backend_; }
  const std::shared_ptr<const Backend>& backend_ptr() const noexcept { return backend_; }
  const AdapterWeights* adapter() const noexcept { return adapter_.get(); }
  bool tuned() const noexcept { return adapter_ != nullptr; }

  ModelHandle with_adapter(std::shared_ptr<const AdapterWeights> adapter) const;
  ModelHandle detached() const;

 private:
  std::string model_id_;
  std::shared_ptr<const Backend> backend_;
  std::shared_ptr<const AdapterWeights> adapter_;
};

// Sum of teacher-forced log-probabilities (nats) of the completion tokens.
// Prompt and completion are tokenized separately and concatenated.
double score_completion(const ModelHandle& handle, std::string_view prompt, std::string_view completion);

// Layer trace at the last prompt token, the position that emits the first answer token.
ForwardTrace forward_trace(const ModelHandle& handle, std::string_view prompt);

std::vector<double> unembed(const ModelHandle& handle, std::span<const double> hidden);

std::vector<double> log_softmax(std::span<const double> logits);
std::vector<double> softmax(std::span<const double> logits);

}  // namespace xalign
