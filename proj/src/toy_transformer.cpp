#include "xalign/toy_transformer.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "xalign/blob.hpp"
#include "xalign/error.hpp"
#include "xalign/random.hpp"

namespace xalign {

namespace {

constexpr double kNormEps = 1e-6;
constexpr char kMagic[9] = "XALNTOYM";
constexpr std::uint32_t kVersion = 1;
constexpr std::array<const char*, 4> kProjections{"q", "k", "v", "o"};

std::string target_name(std::size_t layer, const char* proj) {
  return "blocks." + std::to_string(layer) + ".attn." + proj;
}

// Four independent partial sums so the compiler can vectorize without reassociating.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

// y += a * x
void axpy(double a, const double* __restrict x, double* __restrict y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// y[T x out] = x[T x in] * W^T, W row-major [out x in]
void matmul_wt(const double* x, std::size_t rows, std::size_t in, const double* w, std::size_t out, double* y) {
  for (std::size_t t = 0; t < rows; ++t) {
    const double* xr = x + t * in;
    for (std::size_t o = 0; o < out; ++o) {
      y[t * out + o] = dot(w + o * in, xr, in);
    }
  }
}

// dx[T x in] += dy[T x out] * W
void matmul_w_acc(const double* dy, std::size_t rows, std::size_t out, const double* w, std::size_t in,
                  double* dx) {
  for (std::size_t t = 0; t < rows; ++t) {
    double* dxr = dx + t * in;
    for (std::size_t o = 0; o < out; ++o) {
      const double g = dy[t * out + o];
      if (g == 0.0) continue;
      const double* wr = w + o * in;
      axpy(g, wr, dxr, in);
    }
  }
}

void rms_forward(const double* x, std::size_t rows, std::size_t d, const double* gain, double* y, double* rms) {
  for (std::size_t t = 0; t < rows; ++t) {
    const double* xr = x + t * d;
    double ss = 0.0;
    for (std::size_t i = 0; i < d; ++i) ss += xr[i] * xr[i];
    const double r = std::sqrt(ss / static_cast<double>(d) + kNormEps);
    rms[t] = r;
    for (std::size_t i = 0; i < d; ++i) y[t * d + i] = gain[i] * xr[i] / r;
  }
}

void rms_backward(const double* x, std::size_t rows, std::size_t d, const double* gain, const double* rms,
                  const double* dy, double* dx) {
  for (std::size_t t = 0; t < rows; ++t) {
    const double* xr = x + t * d;
    const double* dyr = dy + t * d;
    const double r = rms[t];
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += gain[i] * dyr[i] * xr[i];
    const double coef = dot / (static_cast<double>(d) * r * r * r);
    for (std::size_t i = 0; i < d; ++i) dx[t * d + i] += gain[i] * dyr[i] / r - xr[i] * coef;
  }
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void fill_normal(std::vector<double>& v, std::size_t n, Rng& rng, double stddev) {
  v.resize(n);
  for (double& x : v) x = rng.normal() * stddev;
}

}  // namespace

struct ToyTransformer::BlockAdapters {
  std::array<const LoraFactor*, 4> factor{};
  std::array<LoraFactor*, 4> grad{};
  double scale = 0.0;
  std::size_t rank = 0;
};

struct ToyTransformer::BlockCache {
  std::vector<double> x_in, n1, rms1, q, k, v, probs, att, x_mid, n2, rms2, z, act;
  std::array<std::vector<double>, 4> lora_u;  // x * A^T per projection
};

struct ToyTransformer::Pass {
  std::size_t rows = 0;
  std::vector<BlockCache> blocks;
  std::vector<double> x_final;
};

ToyTransformer::ToyTransformer(ToyConfig config) : ToyTransformer(std::move(config), true) {}

ToyTransformer::ToyTransformer(ToyConfig config, bool init) : config_(std::move(config)) {
  const auto& c = config_;
  if (c.n_layers < 1 || c.width == 0 || c.n_heads == 0 || c.width % c.n_heads != 0 || c.width % 2 != 0 ||
      c.ffn_width == 0 || c.vocab_size < 256 || c.max_context == 0)
    throw BackendError("invalid toy transformer configuration");
  if (init) initialize();
}

void ToyTransformer::initialize() {
  const auto& c = config_;
  Rng rng(c.seed);
  const double s = c.init_scale;
  const double inv_d = 1.0 / std::sqrt(static_cast<double>(c.width));
  const double inv_f = 1.0 / std::sqrt(static_cast<double>(c.ffn_width));
  fill_normal(embedding_, c.vocab_size * c.width, rng, s);
  blocks_.resize(c.n_layers);
  for (auto& b : blocks_) {
    b.attn_norm.assign(c.width, 1.0);
    b.ffn_norm.assign(c.width, 1.0);
    fill_normal(b.wq, c.width * c.width, rng, s * inv_d);
    fill_normal(b.wk, c.width * c.width, rng, s * inv_d);
    fill_normal(b.wv, c.width * c.width, rng, s * inv_d);
    fill_normal(b.wo, c.width * c.width, rng, s * inv_d);
    fill_normal(b.w1, c.ffn_width * c.width, rng, s * inv_d);
    fill_normal(b.w2, c.width * c.ffn_width, rng, s * inv_f);
  }
  final_norm_.assign(c.width, 1.0);
  fill_normal(unembedding_, c.vocab_size * c.width, rng, s * inv_d);
}

std::string ToyTransformer::architecture() const {
  const auto& c = config_;
  return "toy-transformer/L" + std::to_string(c.n_layers) + "-D" + std::to_string(c.width) + "-H" +
         std::to_string(c.n_heads) + "-F" + std::to_string(c.ffn_width) + "-V" + std::to_string(c.vocab_size);
}

TokenSequence ToyTransformer::tokenize(std::string_view text) const {
  TokenSequence seq;
  seq.ids.reserve(text.size());
  seq.offsets.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    seq.ids.push_back(static_cast<TokenId>(static_cast<unsigned char>(text[i])));
    seq.offsets.push_back(i);
  }
  return seq;
}

std::string ToyTransformer::detokenize(std::span<const TokenId> ids) const {
  std::string out;
  out.reserve(ids.size());
  for (auto id : ids) {
    if (id < 0 || id > 255) throw BackendError("token id " + std::to_string(id) + " is not a byte");
    out += static_cast<char>(static_cast<unsigned char>(id));
  }
  return out;
}

std::vector<AdapterTarget> ToyTransformer::adapter_targets() const {
  std::vector<AdapterTarget> out;
  for (std::size_t l = 0; l < config_.n_layers; ++l)
    for (const char* p : kProjections) out.push_back({target_name(l, p), config_.width, config_.width});
  return out;
}

ToyTransformer::BlockAdapters ToyTransformer::block_adapters(const AdapterWeights* adapter, std::size_t layer) const {
  BlockAdapters out;
  if (adapter == nullptr) return out;
  out.scale = adapter->scale();
  out.rank = adapter->rank;
  for (std::size_t p = 0; p < kProjections.size(); ++p) {
    const auto* f = adapter->find(target_name(layer, kProjections[p]));
    if (f == nullptr) continue;
    if (f->out_dim != config_.width || f->in_dim != config_.width || f->a.size() != adapter->rank * f->in_dim ||
        f->b.size() != f->out_dim * adapter->rank)
      throw BackendError("adapter factor '" + f->target + "' does not fit " + architecture());
    out.factor[p] = f;
  }
  return out;
}

void ToyTransformer::validate_ids(std::span<const TokenId> ids) const {
  if (ids.empty()) throw BackendError("empty token sequence");
  if (ids.size() > config_.max_context)
    throw ContextOverflowError("sequence of " + std::to_string(ids.size()) + " tokens exceeds context limit " +
                               std::to_string(config_.max_context));
  for (auto id : ids)
    if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size)
      throw BackendError("token id " + std::to_string(id) + " out of vocabulary");
}

void ToyTransformer::run(std::span<const TokenId> ids, const AdapterWeights* adapter, bool keep_cache,
                         Pass& pass) const {
  validate_ids(ids);
  const std::size_t rows = ids.size();
  const std::size_t d = config_.width;
  const std::size_t f = config_.ffn_width;
  const std::size_t heads = config_.n_heads;
  const std::size_t dh = d / heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  pass.rows = rows;
  pass.blocks.assign(config_.n_layers, {});

  std::vector<double> x(rows * d);
  for (std::size_t t = 0; t < rows; ++t)
    for (std::size_t i = 0; i < d / 2; ++i) {
      const double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) / static_cast<double>(d));
      const double angle = static_cast<double>(t) * freq;
      const auto id = static_cast<std::size_t>(ids[t]);
      x[t * d + 2 * i] = embedding_[id * d + 2 * i] + std::sin(angle);
      x[t * d + 2 * i + 1] = embedding_[id * d + 2 * i + 1] + std::cos(angle);
    }

  std::vector<double> proj_out(rows * d);
  std::vector<double> scores(rows);
  for (std::size_t l = 0; l < config_.n_layers; ++l) {
    const Block& b = blocks_[l];
    BlockCache& c = pass.blocks[l];
    const auto lora = block_adapters(adapter, l);

    auto project = [&](std::size_t p, const std::vector<double>& in, const std::vector<double>& w,
                       std::vector<double>& out) {
      out.assign(rows * d, 0.0);
      matmul_wt(in.data(), rows, d, w.data(), d, out.data());
      if (const auto* fac = lora.factor[p]) {
        auto& u = c.lora_u[p];
        u.assign(rows * lora.rank, 0.0);
        matmul_wt(in.data(), rows, d, fac->a.data(), lora.rank, u.data());
        for (std::size_t t = 0; t < rows; ++t)
          for (std::size_t o = 0; o < d; ++o) {
            double s = 0.0;
            for (std::size_t j = 0; j < lora.rank; ++j) s += fac->b[o * lora.rank + j] * u[t * lora.rank + j];
            out[t * d + o] += lora.scale * s;
          }
      }
    };

    c.x_in = x;
    c.n1.resize(rows * d);
    c.rms1.resize(rows);
    rms_forward(x.data(), rows, d, b.attn_norm.data(), c.n1.data(), c.rms1.data());
    project(0, c.n1, b.wq, c.q);
    project(1, c.n1, b.wk, c.k);
    project(2, c.n1, b.wv, c.v);

    c.att.assign(rows * d, 0.0);
    if (keep_cache) c.probs.assign(heads * rows * rows, 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t t = 0; t < rows; ++t) {
        double peak = -INFINITY;
        for (std::size_t s = 0; s <= t; ++s) {
          scores[s] = dot(&c.q[t * d + off], &c.k[s * d + off], dh) * inv_sqrt_dh;
          peak = std::max(peak, scores[s]);
        }
        double total = 0.0;
        for (std::size_t s = 0; s <= t; ++s) {
          scores[s] = std::exp(scores[s] - peak);
          total += scores[s];
        }
        for (std::size_t s = 0; s <= t; ++s) {
          const double p = scores[s] / total;
          if (keep_cache) c.probs[(h * rows + t) * rows + s] = p;
          axpy(p, &c.v[s * d + off], &c.att[t * d + off], dh);
        }
      }
    }
    project(3, c.att, b.wo, proj_out);
    for (std::size_t i = 0; i < rows * d; ++i) x[i] += proj_out[i];
    c.x_mid = x;

    c.n2.resize(rows * d);
    c.rms2.resize(rows);
    rms_forward(x.data(), rows, d, b.ffn_norm.data(), c.n2.data(), c.rms2.data());
    c.z.assign(rows * f, 0.0);
    matmul_wt(c.n2.data(), rows, d, b.w1.data(), f, c.z.data());
    c.act.resize(rows * f);
    for (std::size_t i = 0; i < rows * f; ++i) c.act[i] = c.z[i] * sigmoid(c.z[i]);
    matmul_wt(c.act.data(), rows, f, b.w2.data(), d, proj_out.data());
    for (std::size_t i = 0; i < rows * d; ++i) x[i] += proj_out[i];

    if (!keep_cache) {
      // Inference keeps only the residual input for layer capture.
      c.n1.clear(); c.q.clear(); c.k.clear(); c.v.clear(); c.att.clear();
      c.x_mid.clear(); c.n2.clear(); c.z.clear(); c.act.clear();
      for (auto& u : c.lora_u) u.clear();
    }
  }
  pass.x_final = std::move(x);
}

std::vector<double> ToyTransformer::unembed(std::span<const double> hidden) const {
  const std::size_t d = config_.width;
  if (hidden.size() != d) throw BackendError("unembed: hidden width mismatch");
  std::vector<double> normed(d);
  double rms = 0.0;
  rms_forward(hidden.data(), 1, d, final_norm_.data(), normed.data(), &rms);
  std::vector<double> logits(config_.vocab_size);
  matmul_wt(normed.data(), 1, d, unembedding_.data(), config_.vocab_size, logits.data());
  return logits;
}

ForwardTrace ToyTransformer::forward(std::span<const TokenId> ids, bool capture_layers,
                                     const AdapterWeights* adapter) const {
  Pass pass;
  run(ids, adapter, false, pass);
  const std::size_t d = config_.width;
  const std::size_t last = pass.rows - 1;
  ForwardTrace trace;
  trace.position = last;
  std::span<const double> final_row(pass.x_final.data() + last * d, d);
  if (capture_layers) {
    for (const auto& c : pass.blocks)
      trace.hidden.emplace_back(c.x_in.begin() + static_cast<std::ptrdiff_t>(last * d),
                                c.x_in.begin() + static_cast<std::ptrdiff_t>((last + 1) * d));
    trace.hidden.emplace_back(final_row.begin(), final_row.end());
  }
  trace.final_logits = unembed(final_row);
  return trace;
}

std::vector<double> ToyTransformer::token_log_probs(std::span<const TokenId> ids, std::size_t first,
                                                    const AdapterWeights* adapter) const {
  if (first < 1 || first > ids.size()) throw BackendError("token_log_probs: invalid start position");
  Pass pass;
  run(ids, adapter, false, pass);
  const std::size_t d = config_.width;
  std::vector<double> out;
  out.reserve(ids.size() - first);
  for (std::size_t i = first; i < ids.size(); ++i) {
    const auto logits = unembed(std::span<const double>(pass.x_final.data() + (i - 1) * d, d));
    out.push_back(log_softmax(logits)[static_cast<std::size_t>(ids[i])]);
  }
  return out;
}

double ToyTransformer::train_step(std::span<const TrainExample> batch, const AdapterWeights& adapter,
                                  AdapterWeights* grad) const {
  std::size_t count = 0;
  for (const auto& ex : batch) {
    if (ex.targets.size() != ex.ids.size() || ex.loss_mask.size() != ex.ids.size())
      throw BackendError("train example targets/mask length mismatch");
    for (auto m : ex.loss_mask) count += m != 0;
  }
  if (grad != nullptr) *grad = adapter.zeros_like();
  if (count == 0) return 0.0;
  const double weight = 1.0 / static_cast<double>(count);
  double total = 0.0;
  for (const auto& ex : batch) total += example_loss_and_grad(ex, adapter, weight, grad);
  return total * weight;
}

double ToyTransformer::example_loss_and_grad(const TrainExample& example, const AdapterWeights& adapter,
                                             double weight, AdapterWeights* grad) const {
  Pass pass;
  run(example.ids, &adapter, grad != nullptr, pass);
  const std::size_t rows = pass.rows;
  const std::size_t d = config_.width;
  const std::size_t f = config_.ffn_width;
  const std::size_t vocab = config_.vocab_size;
  const std::size_t heads = config_.n_heads;
  const std::size_t dh = d / heads;
  const double inv_sqrt_dh = 1.0 / std::sqrt(static_cast<double>(dh));

  double nll = 0.0;
  std::vector<double> dx(grad != nullptr ? rows * d : 0, 0.0);
  std::vector<double> normed(d), dnormed(d), dlogits(vocab), logits(vocab);
  for (std::size_t t = 0; t < rows; ++t) {
    if (example.loss_mask[t] == 0) continue;
    const auto target = example.targets[t];
    if (target < 0 || static_cast<std::size_t>(target) >= vocab) throw BackendError("target out of vocabulary");
    const double* xr = pass.x_final.data() + t * d;
    double rms = 0.0;
    rms_forward(xr, 1, d, final_norm_.data(), normed.data(), &rms);
    matmul_wt(normed.data(), 1, d, unembedding_.data(), vocab, logits.data());
    const auto lp = log_softmax(logits);
    nll -= lp[static_cast<std::size_t>(target)];
    if (grad == nullptr) continue;
    for (std::size_t v = 0; v < vocab; ++v) dlogits[v] = std::exp(lp[v]) * weight;
    dlogits[static_cast<std::size_t>(target)] -= weight;
    std::fill(dnormed.begin(), dnormed.end(), 0.0);
    matmul_w_acc(dlogits.data(), 1, vocab, unembedding_.data(), d, dnormed.data());
    rms_backward(xr, 1, d, final_norm_.data(), &rms, dnormed.data(), dx.data() + t * d);
  }
  if (grad == nullptr) return nll;

  std::vector<double> d_act(rows * f), dn2(rows * d), d_att(rows * d), dq(rows * d), dk(rows * d), dv(rows * d),
      dn1(rows * d), dp(rows);
  for (std::size_t l = config_.n_layers; l-- > 0;) {
    const Block& b = blocks_[l];
    const BlockCache& c = pass.blocks[l];
    auto lora = block_adapters(&adapter, l);
    for (std::size_t p = 0; p < kProjections.size(); ++p)
      if (lora.factor[p] != nullptr)
        for (auto& gf : grad->factors)
          if (gf.target == lora.factor[p]->target) lora.grad[p] = &gf;

    // dy for projection p with input `in`; accumulates into d_in and factor grads.
    auto project_backward = [&](std::size_t p, const std::vector<double>& in, const std::vector<double>& w,
                                const std::vector<double>& dy, std::vector<double>& d_in) {
      matmul_w_acc(dy.data(), rows, d, w.data(), d, d_in.data());
      const auto* fac = lora.factor[p];
      if (fac == nullptr) return;
      const std::size_t r = lora.rank;
      const auto& u = c.lora_u[p];
      std::vector<double> du(rows * r, 0.0);
      for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t o = 0; o < d; ++o) {
          const double g = lora.scale * dy[t * d + o];
          if (g == 0.0) continue;
          for (std::size_t j = 0; j < r; ++j) {
            du[t * r + j] += g * fac->b[o * r + j];
            if (lora.grad[p]) lora.grad[p]->b[o * r + j] += g * u[t * r + j];
          }
        }
      if (lora.grad[p])
        for (std::size_t t = 0; t < rows; ++t)
          for (std::size_t j = 0; j < r; ++j) {
            const double g = du[t * r + j];
            if (g == 0.0) continue;
            axpy(g, &in[t * d], &lora.grad[p]->a[j * d], d);
          }
      matmul_w_acc(du.data(), rows, r, fac->a.data(), d, d_in.data());
    };

    // MLP: x_out = x_mid + W2 silu(W1 rms(x_mid))
    std::fill(d_act.begin(), d_act.end(), 0.0);
    matmul_w_acc(dx.data(), rows, d, b.w2.data(), f, d_act.data());
    for (std::size_t i = 0; i < rows * f; ++i) {
      const double s = sigmoid(c.z[i]);
      d_act[i] *= s * (1.0 + c.z[i] * (1.0 - s));
    }
    std::fill(dn2.begin(), dn2.end(), 0.0);
    matmul_w_acc(d_act.data(), rows, f, b.w1.data(), d, dn2.data());
    rms_backward(c.x_mid.data(), rows, d, b.ffn_norm.data(), c.rms2.data(), dn2.data(), dx.data());

    // Attention output projection.
    std::fill(d_att.begin(), d_att.end(), 0.0);
    project_backward(3, c.att, b.wo, dx, d_att);

    std::fill(dq.begin(), dq.end(), 0.0);
    std::fill(dk.begin(), dk.end(), 0.0);
    std::fill(dv.begin(), dv.end(), 0.0);
    for (std::size_t h = 0; h < heads; ++h) {
      const std::size_t off = h * dh;
      for (std::size_t t = 0; t < rows; ++t) {
        const double* prow = c.probs.data() + (h * rows + t) * rows;
        double weighted = 0.0;
        const double* da_t = &d_att[t * d + off];
        for (std::size_t s = 0; s <= t; ++s) {
          const double g = dot(da_t, &c.v[s * d + off], dh);
          axpy(prow[s], da_t, &dv[s * d + off], dh);
          dp[s] = g;
          weighted += prow[s] * g;
        }
        for (std::size_t s = 0; s <= t; ++s) {
          const double ds = prow[s] * (dp[s] - weighted) * inv_sqrt_dh;
          if (ds == 0.0) continue;
          axpy(ds, &c.k[s * d + off], &dq[t * d + off], dh);
          axpy(ds, &c.q[t * d + off], &dk[s * d + off], dh);
        }
      }
    }
    std::fill(dn1.begin(), dn1.end(), 0.0);
    project_backward(0, c.n1, b.wq, dq, dn1);
    project_backward(1, c.n1, b.wk, dk, dn1);
    project_backward(2, c.n1, b.wv, dv, dn1);
    rms_backward(c.x_in.data(), rows, d, b.attn_norm.data(), c.rms1.data(), dn1.data(), dx.data());
  }
  return nll;
}

void ToyTransformer::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model '" + path.string() + "'");
  out.write(kMagic, 8);
  blob::put<std::uint32_t>(out, kVersion);
  const auto& c = config_;
  for (std::uint64_t v : {std::uint64_t(c.n_layers), std::uint64_t(c.width), std::uint64_t(c.n_heads),
                          std::uint64_t(c.ffn_width), std::uint64_t(c.vocab_size), std::uint64_t(c.max_context),
                          c.seed})
    blob::put<std::uint64_t>(out, v);
  blob::put<double>(out, c.init_scale);
  blob::put_doubles(out, embedding_);
  for (const auto& b : blocks_)
    for (const auto* t : {&b.attn_norm, &b.wq, &b.wk, &b.wv, &b.wo, &b.ffn_norm, &b.w1, &b.w2})
      blob::put_doubles(out, *t);
  blob::put_doubles(out, final_norm_);
  blob::put_doubles(out, unembedding_);
  if (!out) throw DataError("failed writing model '" + path.string() + "'");
}

ToyTransformer ToyTransformer::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model '" + path.string() + "'");
  blob::expect_magic(in, kMagic, kVersion);
  ToyConfig c;
  c.n_layers = blob::get<std::uint64_t>(in);
  c.width = blob::get<std::uint64_t>(in);
  c.n_heads = blob::get<std::uint64_t>(in);
  c.ffn_width = blob::get<std::uint64_t>(in);
  c.vocab_size = blob::get<std::uint64_t>(in);
  c.max_context = blob::get<std::uint64_t>(in);
  c.seed = blob::get<std::uint64_t>(in);
  c.init_scale = blob::get<double>(in);
  ToyTransformer model(c, false);
  const std::size_t d = c.width;
  model.embedding_ = blob::get_doubles(in, c.vocab_size * d);
  model.blocks_.resize(c.n_layers);
  for (auto& b : model.blocks_) {
    b.attn_norm = blob::get_doubles(in, d);
    b.wq = blob::get_doubles(in, d * d);
    b.wk = blob::get_doubles(in, d * d);
    b.wv = blob::get_doubles(in, d * d);
    b.wo = blob::get_doubles(in, d * d);
    b.ffn_norm = blob::get_doubles(in, d);
    b.w1 = blob::get_doubles(in, c.ffn_width * d);
    b.w2 = blob::get_doubles(in, d * c.ffn_width);
  }
  model.final_norm_ = blob::get_doubles(in, d);
  model.unembedding_ = blob::get_doubles(in, c.vocab_size * d);
  return model;
}

}  // namespace xalign
