#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "xalign/backend.hpp"

namespace xalign {

struct ToyConfig {
  std::size_t n_layers = 4;
  std::size_t width = 64;
  std::size_t n_heads = 4;
  std::size_t ffn_width = 256;
  std::size_t vocab_size = 256;  // byte-level tokenizer
  std::size_t max_context = 1024;
  std::uint64_t seed = 0;
  // Multiplies every random weight. 0 gives an all-zero network whose output is
  // uniform, which makes candidate scores tie exactly.
  double init_scale = 1.0;
};

// Small pre-norm decoder-only transformer over bytes: sinusoidal positions,
// causal multi-head attention, SiLU MLP, RMSNorm, untied unembedding. Weights
// are drawn from a seeded generator, so equal configs give bit-identical models.
// Low-rank adapters attach to the four attention projections of every block.
class ToyTransformer final : public Backend {
 public:
  explicit ToyTransformer(ToyConfig config);

  // Versioned blob: "XALNTOYM", u32 version, config, tensors.
  void save(const std::filesystem::path& path) const;
  static ToyTransformer load(const std::filesystem::path& path);

  const ToyConfig& config() const noexcept { return config_; }

  std::string architecture() const override;
  std::size_t n_layers() const override { return config_.n_layers; }
  std::size_t width() const override { return config_.width; }
  std::size_t vocab_size() const override { return config_.vocab_size; }
  std::size_t max_context() const override { return config_.max_context; }

  TokenSequence tokenize(std::string_view text) const override;
  std::string detokenize(std::span<const TokenId> ids) const override;
  ForwardTrace forward(std::span<const TokenId> ids, bool capture_layers,
                       const AdapterWeights* adapter) const override;
  std::vector<double> token_log_probs(std::span<const TokenId> ids, std::size_t first,
                                      const AdapterWeights* adapter) const override;
  std::vector<double> unembed(std::span<const double> hidden) const override;
  std::vector<AdapterTarget> adapter_targets() const override;
  double train_step(std::span<const TrainExample> batch, const AdapterWeights& adapter,
                    AdapterWeights* grad) const override;

 private:
  struct Block {
    std::vector<double> attn_norm, wq, wk, wv, wo, ffn_norm, w1, w2;
  };
  struct BlockCache;
  struct Pass;
  struct BlockAdapters;

  ToyTransformer(ToyConfig config, bool initialize);
  void initialize();
  BlockAdapters block_adapters(const AdapterWeights* adapter, std::size_t layer) const;
  void validate_ids(std::span<const TokenId> ids) const;
  void run(std::span<const TokenId> ids, const AdapterWeights* adapter, bool keep_cache, Pass& pass) const;
  double example_loss_and_grad(const TrainExample& example, const AdapterWeights& adapter, double weight,
                               AdapterWeights* grad) const;

  ToyConfig config_;
  std::vector<double> embedding_;  // vocab x width
  std::vector<Block> blocks_;
  std::vector<double> final_norm_;
  std::vector<double> unembedding_;  // vocab x width
};

}  // namespace xalign
