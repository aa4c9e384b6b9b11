#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xalign/backend.hpp"
#include "xalign/language.hpp"

namespace xalign {

// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

enum class LatentKind { kLogits, kHidden };
LatentKind parse_latent_kind(std::string_view name);
std::string_view to_string(LatentKind kind);

struct LatentMatrix {
  LanguageCode lang;
  std::size_t layer = 0;
  Matrix rows;  // one row per instance, ordered as instance_ids
  std::vector<std::string> instance_ids;
};

struct LatentPrompt {
  std::string instance_id;
  std::string prompt;
};

// Latent vectors at the trace position for every language and layer. Rows are
// ordered by sorted instance id. Throws AlignmentError when languages do not
// share one id set.
std::map<std::size_t, std::vector<LatentMatrix>> collect_latents(
    const ModelHandle& handle, const std::map<LanguageCode, std::vector<LatentPrompt>>& prompts,
    const std::vector<std::size_t>& layers, LatentKind kind = LatentKind::kLogits);

std::vector<LatentMatrix> collect_latents(const ModelHandle& handle,
                                          const std::map<LanguageCode, std::vector<LatentPrompt>>& prompts,
                                          std::size_t layer, LatentKind kind = LatentKind::kLogits);

// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues descending; eigenvectors are the columns of `vectors`.
struct SymmetricEigen {
  std::vector<double> values;
  Matrix vectors;
};
SymmetricEigen symmetric_eigen(const Matrix& a);

struct PCAModel {
  std::vector<double> mean;
  std::vector<std::vector<double>> components;  // unit vectors, largest variance first
  std::vector<double> explained_variance;
  std::vector<double> explained_variance_ratio;
};

// Covariance eigendecomposition of mean-centred rows. Each component's
// largest-magnitude coordinate is made positive.
PCAModel pca_fit(const Matrix& data, std::size_t dims);
Matrix pca_project(const PCAModel& model, const Matrix& rows);

Matrix stack_rows(const std::vector<LatentMatrix>& latents);

double pearson_1d(std::span<const double> a, std::span<const double> b);

// (lang_a-lang_b, base r, trained r); trained is empty when no adapter was used.
struct CorrelationRow {
  std::string pair;
  double base = 0.0;
  std::optional<double> trained;
};
struct CorrelationTable {
  std::size_t layer = 0;
  std::vector<CorrelationRow> rows;
};

// Pearson r between the 1-D joint-PCA projections of every pair of languages,
// including each language with itself.
std::vector<std::pair<std::string, double>> pairwise_pearson(const std::vector<LatentMatrix>& latents);

std::string format_double(double value);
double parse_double(std::string_view text);

void write_correlation_csv(const std::filesystem::path& path, const CorrelationTable& table);
CorrelationTable read_correlation_csv(const std::filesystem::path& path, std::size_t layer);

// lang,instance_id,pc1,pc2 for every language projected on the joint 2-D fit.
void write_scatter_csv(const std::filesystem::path& path, const std::vector<LatentMatrix>& latents,
                       const PCAModel& model);

}  // namespace xalign
