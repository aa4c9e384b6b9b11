#include "xalign/random_backend.hpp"

#include <cmath>

#include "xalign/error.hpp"
#include "xalign/random.hpp"

namespace xalign {

RandomLogitBackend::RandomLogitBackend(std::uint64_t seed, std::size_t n_layers, std::size_t width)
    : seed_(seed), n_layers_(n_layers), width_(width) {
  if (n_layers_ < 1 || width_ == 0) throw BackendError("invalid random backend shape");
  Rng rng(derive_seed(seed_, 0xBAC));
  projection_.resize(256 * width_);
  const double scale = 2.0 / std::sqrt(static_cast<double>(width_));
  for (double& w : projection_) w = rng.normal() * scale;
}

std::string RandomLogitBackend::architecture() const {
  return "random-logit/L" + std::to_string(n_layers_) + "-D" + std::to_string(width_) + "-V256";
}

TokenSequence RandomLogitBackend::tokenize(std::string_view text) const {
  TokenSequence seq;
  for (std::size_t i = 0; i < text.size(); ++i) {
    seq.ids.push_back(static_cast<TokenId>(static_cast<unsigned char>(text[i])));
    seq.offsets.push_back(i);
  }
  return seq;
}

std::string RandomLogitBackend::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  for (auto id : ids) out += static_cast<char>(static_cast<unsigned char>(id));
  return out;
}

std::vector<double> RandomLogitBackend::hidden_at(std::uint64_t prefix_hash, std::size_t layer) const {
  Rng rng(derive_seed(prefix_hash, layer));
  std::vector<double> h(width_);
  for (double& x : h) x = rng.normal();
  return h;
}

std::vector<double> RandomLogitBackend::unembed(std::span<const double> hidden) const {
  if (hidden.size() != width_) throw BackendError("unembed: hidden width mismatch");
  std::vector<double> logits(256, 0.0);
  for (std::size_t v = 0; v < 256; ++v)
    for (std::size_t i = 0; i < width_; ++i) logits[v] += projection_[v * width_ + i] * hidden[i];
  return logits;
}

namespace {
std::uint64_t extend_hash(std::uint64_t h, TokenId id) {
  return derive_seed(h, static_cast<std::uint64_t>(id) + 1);
}
}  // namespace

ForwardTrace RandomLogitBackend::forward(std::span<const TokenId> ids, bool capture_layers,
                                         const AdapterWeights* adapter) const {
  if (adapter != nullptr) throw BackendError("random-logit backend does not take adapters");
  if (ids.empty()) throw BackendError("empty token sequence");
  std::uint64_t h = seed_;
  for (auto id : ids) h = extend_hash(h, id);
  ForwardTrace trace;
  trace.position = ids.size() - 1;
  for (std::size_t l = 0; l <= n_layers_; ++l) {
    if (!capture_layers && l < n_layers_) continue;
    trace.hidden.push_back(hidden_at(h, l));
  }
  trace.final_logits = unembed(trace.hidden.back());
  if (!capture_layers) trace.hidden.clear();
  return trace;
}

std::vector<double> RandomLogitBackend::token_log_probs(std::span<const TokenId> ids, std::size_t first,
                                                        const AdapterWeights* adapter) const {
  if (adapter != nullptr) throw BackendError("random-logit backend does not take adapters");
  if (first < 1 || first > ids.size()) throw BackendError("token_log_probs: invalid start position");
  std::uint64_t h = seed_;
  std::vector<double> out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i >= first) out.push_back(log_softmax(unembed(hidden_at(h, n_layers_)))[static_cast<std::size_t>(ids[i])]);
    h = extend_hash(h, ids[i]);
  }
  return out;
}

}  // namespace xalign
