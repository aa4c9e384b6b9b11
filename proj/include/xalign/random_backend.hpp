#pragma once

#include <cstdint>

#include "xalign/backend.hpp"

namespace xalign {

// Untrained stand-in whose hidden state at every position is a pseudo-random
// function of (seed, layer, token prefix). Candidate scores are therefore
// unrelated to the gold label, so accuracy sits at chance level. Byte tokenizer.
class RandomLogitBackend final : public Backend {
 public:
  explicit RandomLogitBackend(std::uint64_t seed, std::size_t n_layers = 2, std::size_t width = 16);

  std::string architecture() const override;
  std::size_t n_layers() const override { return n_layers_; }
  std::size_t width() const override { return width_; }
  std::size_t vocab_size() const override { return 256; }
  std::size_t max_context() const override { return 1u << 20; }

  TokenSequence tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> ids) const override;
  ForwardTrace forward(std::span<const TokenId> ids, bool capture_layers,
                       const AdapterWeights* adapter) const override;
  std::vector<double> token_log_probs(std::span<const TokenId> ids, std::size_t first,
                                      const AdapterWeights* adapter) const override;
  std::vector<double> unembed(std::span<const double> hidden) const override;

 private:
  std::vector<double> hidden_at(std::uint64_t prefix_hash, std::size_t layer) const;

  std::uint64_t seed_;
  std::size_t n_layers_;
  std::size_t width_;
  std::vector<double> projection_;  // 256 x width
};

}  // namespace xalign
