#include "xalign/geometry.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "xalign/error.hpp"

namespace xalign {

LatentKind parse_latent_kind(std::string_view name) {
  if (name == "logits") return LatentKind::kLogits;
  if (name == "hidden") return LatentKind::kHidden;
  throw ConfigError("unknown latent kind '" + std::string(name) + "' (expected logits or hidden)");
}

std::string_view to_string(LatentKind kind) { return kind == LatentKind::kLogits ? "logits" : "hidden"; }

std::map<std::size_t, std::vector<LatentMatrix>> collect_latents(
    const ModelHandle& handle, const std::map<LanguageCode, std::vector<LatentPrompt>>& prompts,
    const std::vector<std::size_t>& layers, LatentKind kind) {
  if (prompts.empty()) throw DataError("no languages to collect latents for");
  for (auto layer : layers)
    if (layer > handle.n_layers())
      throw ConfigError("layer " + std::to_string(layer) + " exceeds model depth " + std::to_string(handle.n_layers()));

  std::set<std::string> reference;
  for (const auto& p : prompts.begin()->second) reference.insert(p.instance_id);
  for (const auto& [lang, items] : prompts) {
    std::set<std::string> ids;
    for (const auto& p : items)
      if (!ids.insert(p.instance_id).second) throw DataError("duplicate instance id '" + p.instance_id + "'");
    if (ids != reference) {
      std::vector<std::string> diff;
      std::set_symmetric_difference(ids.begin(), ids.end(), reference.begin(), reference.end(),
                                    std::back_inserter(diff));
      std::string msg = "instance ids of '" + lang.str() + "' differ from '" + prompts.begin()->first.str() + "':";
      for (const auto& id : diff) msg += " " + id;
      throw AlignmentError(msg);
    }
  }

  std::map<std::size_t, std::vector<LatentMatrix>> out;
  for (const auto& [lang, items] : prompts) {
    std::vector<const LatentPrompt*> sorted;
    for (const auto& p : items) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(),
              [](const LatentPrompt* a, const LatentPrompt* b) { return a->instance_id < b->instance_id; });
    std::map<std::size_t, LatentMatrix> per_layer;
    for (auto layer : layers) per_layer[layer] = LatentMatrix{lang, layer, {}, {}};
    for (const auto* p : sorted) {
      const auto trace = forward_trace(handle, p->prompt);
      for (auto layer : layers) {
        auto& m = per_layer[layer];
        const auto& hidden = trace.hidden[layer];
        const auto latent = kind == LatentKind::kLogits ? unembed(handle, hidden) : hidden;
        if (m.rows.cols == 0) m.rows.cols = latent.size();
        m.rows.data.insert(m.rows.data.end(), latent.begin(), latent.end());
        ++m.rows.rows;
        m.instance_ids.push_back(p->instance_id);
      }
    }
    for (auto& [layer, m] : per_layer) out[layer].push_back(std::move(m));
  }
  return out;
}

std::vector<LatentMatrix> collect_latents(const ModelHandle& handle,
                                          const std::map<LanguageCode, std::vector<LatentPrompt>>& prompts,
                                          std::size_t layer, LatentKind kind) {
  return std::move(collect_latents(handle, prompts, std::vector<std::size_t>{layer}, kind).at(layer));
}

SymmetricEigen symmetric_eigen(const Matrix& input) {
  const std::size_t n = input.rows;
  if (input.cols != n) throw NumericError("eigendecomposition needs a square matrix");
  Matrix a = input;
  Matrix v(n, n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double scale = 0.0;
  for (double x : a.data) scale = std::max(scale, std::abs(x));
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off <= 1e-30 * scale * scale || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });
  SymmetricEigen out{{}, Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    out.values.push_back(a(order[j], order[j]));
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

PCAModel pca_fit(const Matrix& data, std::size_t dims) {
  if (dims != 1 && dims != 2) throw ConfigError("PCA dimensions must be 1 or 2");
  if (data.rows < dims + 1)
    throw DataError("PCA with " + std::to_string(dims) + " dimensions needs at least " + std::to_string(dims + 1) +
                    " rows, got " + std::to_string(data.rows));
  const std::size_t n = data.rows, d = data.cols;
  PCAModel model;
  model.mean.assign(d, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) model.mean[c] += data(r, c);
  for (double& m : model.mean) m /= static_cast<double>(n);

  Matrix centred(n, d);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) centred(r, c) = data(r, c) - model.mean[c];
  double total = 0.0;
  for (double x : centred.data) total += x * x;
  total /= static_cast<double>(n - 1);
  if (!(total > 0.0) || !std::isfinite(total)) throw DataError("PCA input has zero variance");

  // Wide inputs (more columns than rows) use the n x n Gram matrix: it has the
  // same nonzero spectrum and X^T u recovers the covariance eigenvectors.
  std::vector<std::vector<double>> vectors;
  std::vector<double> values;
  if (n < d) {
    Matrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) s += centred(i, c) * centred(j, c);
        gram(i, j) = gram(j, i) = s / static_cast<double>(n - 1);
      }
    const auto eig = symmetric_eigen(gram);
    for (std::size_t k = 0; k < dims; ++k) {
      std::vector<double> v(d, 0.0);
      for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < d; ++c) v[c] += centred(r, c) * eig.vectors(r, k);
      double norm = 0.0;
      for (double x : v) norm += x * x;
      norm = std::sqrt(norm);
      if (!(norm > 1e-12 * std::sqrt(total))) break;  // rank deficient: fall back below
      for (double& x : v) x /= norm;
      vectors.push_back(std::move(v));
      values.push_back(eig.values[k]);
    }
  }
  if (vectors.size() < dims) {
    vectors.clear();
    values.clear();
    Matrix cov(d, d);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) cov(i, j) += centred(r, i) * centred(r, j);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = i; j < d; ++j) {
        cov(i, j) /= static_cast<double>(n - 1);
        cov(j, i) = cov(i, j);
      }
    const auto eig = symmetric_eigen(cov);
    for (std::size_t k = 0; k < dims; ++k) {
      std::vector<double> v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = eig.vectors(i, k);
      vectors.push_back(std::move(v));
      values.push_back(eig.values[k]);
    }
  }

  for (std::size_t k = 0; k < dims; ++k) {
    auto& comp = vectors[k];
    std::size_t peak = 0;
    for (std::size_t i = 0; i < d; ++i)
      if (std::abs(comp[i]) > std::abs(comp[peak])) peak = i;
    if (comp[peak] < 0)
      for (double& x : comp) x = -x;
    const double var = std::max(values[k], 0.0);
    model.components.push_back(std::move(comp));
    model.explained_variance.push_back(var);
    model.explained_variance_ratio.push_back(var / total);
  }
  return model;
}

Matrix pca_project(const PCAModel& model, const Matrix& rows) {
  if (rows.cols != model.mean.size())
    throw DataError("projection rows have width " + std::to_string(rows.cols) + ", model expects " +
                    std::to_string(model.mean.size()));
  Matrix out(rows.rows, model.components.size());
  for (std::size_t r = 0; r < rows.rows; ++r)
    for (std::size_t k = 0; k < model.components.size(); ++k) {
      double s = 0.0;
      for (std::size_t c = 0; c < rows.cols; ++c) s += (rows(r, c) - model.mean[c]) * model.components[k][c];
      out(r, k) = s;
    }
  return out;
}

Matrix stack_rows(const std::vector<LatentMatrix>& latents) {
  Matrix out;
  for (const auto& m : latents) {
    if (out.cols == 0) out.cols = m.rows.cols;
    if (m.rows.cols != out.cols) throw DataError("latent matrices have different widths");
    out.data.insert(out.data.end(), m.rows.data.begin(), m.rows.data.end());
    out.rows += m.rows.rows;
  }
  return out;
}

double pearson_1d(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DataError("Pearson inputs differ in length (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  if (a.size() < 2) throw DataError("Pearson needs at least two points");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw DataError("Pearson input has zero variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::vector<std::pair<std::string, double>> pairwise_pearson(const std::vector<LatentMatrix>& latents) {
  if (latents.size() < 2) throw ConfigError("correlation needs at least two languages");
  for (const auto& m : latents)
    if (m.instance_ids != latents.front().instance_ids)
      throw AlignmentError("latent rows of '" + m.lang.str() + "' are not aligned with '" +
                           latents.front().lang.str() + "'");
  const auto model = pca_fit(stack_rows(latents), 1);
  std::vector<std::vector<double>> scores;
  for (const auto& m : latents) {
    const auto p = pca_project(model, m.rows);
    scores.push_back(p.data);
  }
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < latents.size(); ++i)
    for (std::size_t j = i; j < latents.size(); ++j)
      out.emplace_back(latents[i].lang.str() + "-" + latents[j].lang.str(), pearson_1d(scores[i], scores[j]));
  return out;
}

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DataError("bad number '" + std::string(text) + "'");
  return v;
}

void write_correlation_csv(const std::filesystem::path& path, const CorrelationTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "pair,base,trained\n";
  for (const auto& r : table.rows)
    out << r.pair << ',' << format_double(r.base) << ',' << (r.trained ? format_double(*r.trained) : "") << '\n';
}

CorrelationTable read_correlation_csv(const std::filesystem::path& path, std::size_t layer) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  CorrelationTable t{layer, {}};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() == 2) cells.emplace_back();
    if (cells.size() != 3) throw ParseError(path.string(), line_no, "expected pair,base,trained");
    try {
      CorrelationRow r{cells[0], parse_double(cells[1]), std::nullopt};
      if (!cells[2].empty()) r.trained = parse_double(cells[2]);
      t.rows.push_back(std::move(r));
    } catch (const DataError& e) {
      throw ParseError(path.string(), line_no, e.what());
    }
  }
  return t;
}

void write_scatter_csv(const std::filesystem::path& path, const std::vector<LatentMatrix>& latents,
                       const PCAModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "lang,instance_id,pc1,pc2\n";
  for (const auto& m : latents) {
    const auto p = pca_project(model, m.rows);
    for (std::size_t r = 0; r < p.rows; ++r) {
      out << m.lang.str() << ',' << m.instance_ids[r] << ',' << format_double(p(r, 0)) << ',';
      if (p.cols > 1) out << format_double(p(r, 1));
      out << '\n';
    }
  }
}

}  // namespace xalign
