#include <doctest.h>

#include <fstream>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"
#include "xalign/error.hpp"
#include "xalign/geometry.hpp"

using namespace xalign;
using namespace xalign::testing;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  // Uneven column scales keep the leading eigenvalues well separated.
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng) * (1.0 + 0.5 * static_cast<double>(c - j));
  return m;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

std::map<LanguageCode, std::vector<LatentPrompt>> prompts_for(const std::vector<const char*>& langs, int n) {
  std::map<LanguageCode, std::vector<LatentPrompt>> out;
  for (const auto* l : langs)
    for (int i = n - 1; i >= 0; --i)
      out[LanguageCode(l)].push_back({"id" + std::to_string(100 + i), std::string(l) + " text " + std::to_string(i * 7)});
  return out;
}

}  // namespace

TEST_CASE("latent collection shapes and alignment") {
  const auto handle = toy_handle(small_toy_config(3));
  const auto prompts = prompts_for({"en", "de", "zh", "sw"}, 50);
  const auto mats = collect_latents(handle, prompts, 1);
  REQUIRE(mats.size() == 4);
  for (const auto& m : mats) {
    CHECK(m.rows.rows == 50);
    CHECK(m.rows.cols == 256);
    CHECK(m.instance_ids == mats.front().instance_ids);
    CHECK(std::is_sorted(m.instance_ids.begin(), m.instance_ids.end()));
  }

  const auto last = collect_latents(handle, prompts, handle.n_layers());
  const auto& de = last[0];
  CHECK(de.lang == LanguageCode("de"));
  for (std::size_t r = 0; r < 5; ++r) {
    const auto& id = de.instance_ids[r];
    const auto it = std::find_if(prompts.at(de.lang).begin(), prompts.at(de.lang).end(),
                                 [&](const LatentPrompt& p) { return p.instance_id == id; });
    const auto logits = forward_trace(handle, it->prompt).final_logits;
    for (std::size_t c = 0; c < logits.size(); ++c) CHECK(std::abs(de.rows(r, c) - logits[c]) < 1e-9);
  }

  const auto hidden = collect_latents(handle, prompts, 0, LatentKind::kHidden);
  CHECK(hidden[0].rows.cols == handle.backend().width());

  auto broken = prompts;
  broken[LanguageCode("zh")].pop_back();
  try {
    collect_latents(handle, broken, 1);
    FAIL("expected alignment error");
  } catch (const AlignmentError& e) {
    CHECK(std::string(e.what()).find("id100") != std::string::npos);
  }
  CHECK_THROWS_AS(collect_latents(handle, prompts, handle.n_layers() + 1), ConfigError);
}

TEST_CASE("Jacobi eigensolver on a known matrix") {
  Matrix a(2, 2);
  a(0, 0) = 2;
  a(0, 1) = a(1, 0) = 1;
  a(1, 1) = 2;
  const auto e = symmetric_eigen(a);
  CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(std::abs(e.vectors(0, 0)) - std::sqrt(0.5)) < 1e-14);
}

TEST_CASE("collinear points have one full component") {
  Matrix m(5, 2);
  for (std::size_t i = 0; i < 5; ++i) {
    m(i, 0) = static_cast<double>(i);
    m(i, 1) = 2.0 * static_cast<double>(i) + 1.0;
  }
  const auto model = pca_fit(m, 1);
  CHECK(model.explained_variance_ratio[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.components[0][1] > 0);
}

TEST_CASE("PCA matches a dense eigensolver") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_matrix(rng, 20, 8);
    const auto model = pca_fit(m, 2);
    const auto oracle = eigen_pca(m, 2);
    double ratio_sum = 0.0;
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(std::abs(model.explained_variance[k] - oracle.variances[k]) < 1e-8);
      CHECK(std::abs(model.explained_variance_ratio[k] - oracle.variances[k] / oracle.total) < 1e-8);
      for (std::size_t i = 0; i < 8; ++i) CHECK(std::abs(model.components[k][i] - oracle.components[k](i)) < 1e-8);
      ratio_sum += model.explained_variance_ratio[k];
    }
    CHECK(ratio_sum <= 1.0 + 1e-12);
    CHECK(model.explained_variance[0] >= model.explained_variance[1]);
    double dot = 0, n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < 8; ++i) {
      dot += model.components[0][i] * model.components[1][i];
      n0 += model.components[0][i] * model.components[0][i];
      n1 += model.components[1][i] * model.components[1][i];
    }
    CHECK(std::abs(dot) < 1e-8);
    CHECK(std::abs(n0 - 1) < 1e-8);
    CHECK(std::abs(n1 - 1) < 1e-8);

    const auto p = pca_project(model, m);
    double c01 = 0;
    for (std::size_t r = 0; r < p.rows; ++r) c01 += p(r, 0) * p(r, 1);
    CHECK(std::abs(c01 / 19.0) < 1e-8);
  }
}

TEST_CASE("PCA on wide matrices matches a dense eigensolver") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto m = random_matrix(rng, 12, 40);
    const auto model = pca_fit(m, 2);
    const auto oracle = eigen_pca(m, 2);
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(std::abs(model.explained_variance[k] - oracle.variances[k]) < 1e-8);
      CHECK(std::abs(model.explained_variance_ratio[k] - oracle.variances[k] / oracle.total) < 1e-8);
      for (std::size_t i = 0; i < 40; ++i) CHECK(std::abs(model.components[k][i] - oracle.components[k](i)) < 1e-8);
    }
  }
  // Two distinct rows: the second component has no variance, so the Gram route cannot supply it.
  Matrix pair(2, 6);
  for (std::size_t c = 0; c < 6; ++c) pair(1, c) = static_cast<double>(c);
  const auto model = pca_fit(pair, 1);
  CHECK(model.explained_variance_ratio[0] == doctest::Approx(1.0));
  const auto degenerate = pca_fit(random_matrix(rng, 3, 6), 2);
  CHECK(degenerate.components.size() == 2);
}

TEST_CASE("PCA projection is the best rank-k reconstruction") {
  std::mt19937_64 rng(4);
  for (std::size_t k : {std::size_t{1}, std::size_t{2}}) {
    const auto m = random_matrix(rng, 12, 5);
    const auto model = pca_fit(m, k);
    const auto p = pca_project(model, m);
    double err = 0;
    for (std::size_t r = 0; r < m.rows; ++r)
      for (std::size_t c = 0; c < m.cols; ++c) {
        double rec = model.mean[c];
        for (std::size_t j = 0; j < k; ++j) rec += p(r, j) * model.components[j][c];
        err += (m(r, c) - rec) * (m(r, c) - rec);
      }
    CHECK(err == doctest::Approx(svd_tail_energy(m, k)).epsilon(1e-9));
  }
}

TEST_CASE("PCA preconditions and projection basics") {
  std::mt19937_64 rng(8);
  const auto m = random_matrix(rng, 2, 3);
  CHECK_THROWS_AS(pca_fit(m, 2), DataError);
  CHECK_THROWS_AS(pca_fit(m, 3), ConfigError);
  CHECK_THROWS_AS(pca_fit(Matrix(6, 3, 1.5), 1), DataError);

  const auto big = random_matrix(rng, 9, 3);
  const auto model = pca_fit(big, 2);
  Matrix mean(1, 3);
  for (std::size_t c = 0; c < 3; ++c) mean(0, c) = model.mean[c];
  const auto origin = pca_project(model, mean);
  CHECK(std::abs(origin(0, 0)) < 1e-12);
  CHECK(std::abs(origin(0, 1)) < 1e-12);
  CHECK(pca_project(model, big).data == pca_project(model, big).data);
  CHECK_THROWS_AS(pca_project(model, Matrix(1, 4)), DataError);
}

TEST_CASE("Pearson matches the closed-form formula") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a = random_vector(rng, 10);
    auto b = random_vector(rng, 10);
    for (std::size_t i = 0; i < 10; ++i) b[i] += 0.5 * a[i];
    CHECK(std::abs(pearson_1d(a, b) - pearson_formula(a, b)) < 1e-12);
  }
}

TEST_CASE("Pearson properties") {
  std::mt19937_64 rng(22);
  const auto a = random_vector(rng, 30);
  const auto b = random_vector(rng, 30);
  std::vector<double> neg, affine;
  for (double x : a) {
    neg.push_back(-x);
    affine.push_back(3.5 * x - 2.0);
  }
  CHECK(pearson_1d(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pearson_1d(a, neg) == doctest::Approx(-1.0).epsilon(1e-15));
  const double r = pearson_1d(a, b);
  CHECK(r >= -1.0);
  CHECK(r <= 1.0);
  CHECK(pearson_1d(b, a) == doctest::Approx(r).epsilon(1e-14));
  CHECK(pearson_1d(affine, b) == doctest::Approx(r).epsilon(1e-12));
  CHECK(pearson_1d(neg, b) == doctest::Approx(-r).epsilon(1e-12));

  CHECK_THROWS_AS(pearson_1d(a, std::vector<double>(29, 0.0)), DataError);
  CHECK_THROWS_AS(pearson_1d(a, std::vector<double>(30, 1.0)), DataError);
  CHECK_THROWS_AS(pearson_1d(std::vector<double>{1.0}, std::vector<double>{2.0}), DataError);
}

TEST_CASE("pairwise correlation over joint PCA") {
  const auto handle = toy_handle(small_toy_config(3));
  const auto mats = collect_latents(handle, prompts_for({"en", "de", "sw"}, 12), 1);
  const auto rows = pairwise_pearson(mats);
  CHECK(rows.size() == 6);
  for (const auto& [pair, r] : rows) {
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
    if (pair == "de-de" || pair == "en-en" || pair == "sw-sw") CHECK(r == doctest::Approx(1.0));
  }
  auto misaligned = mats;
  std::swap(misaligned[1].instance_ids[0], misaligned[1].instance_ids[1]);
  CHECK_THROWS_AS(pairwise_pearson(misaligned), AlignmentError);
  CHECK_THROWS_AS(pairwise_pearson({mats[0]}), ConfigError);
}

TEST_CASE("published correlations round-trip through the CSV bit-exactly") {
  TempDir dir("corr");
  CorrelationTable table{18, {}};
  for (const auto& r : read_csv("published_pearson.csv"))
    if (r[0] == "qwen1.5-1.8b" && r[1] == "18") table.rows.push_back({r[2], std::stod(r[3]), std::stod(r[4])});
  table.rows.push_back({"en-en", 1.0, std::nullopt});
  write_correlation_csv(dir.path() / "c.csv", table);
  const auto back = read_correlation_csv(dir.path() / "c.csv", 18);
  REQUIRE(back.rows.size() == table.rows.size());
  bool saw_negative = false;
  for (std::size_t i = 0; i < back.rows.size(); ++i) {
    CHECK(back.rows[i].pair == table.rows[i].pair);
    CHECK(back.rows[i].base == table.rows[i].base);
    CHECK(back.rows[i].trained == table.rows[i].trained);
    if (back.rows[i].pair == "en-sw") {
      CHECK(back.rows[i].base == -0.0424);
      saw_negative = true;
    }
  }
  CHECK(saw_negative);
  std::ifstream in(dir.path() / "c.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "pair,base,trained");
}

TEST_CASE("shortest round-trip number formatting") {
  std::mt19937_64 rng(1);
  for (double v : random_vector(rng, 100)) CHECK(parse_double(format_double(v)) == v);
  CHECK(format_double(-0.0424) == "-0.0424");
  CHECK_THROWS_AS(parse_double("1.5x"), DataError);
}

TEST_CASE("scatter CSV") {
  TempDir dir("scatter");
  const auto handle = toy_handle(small_toy_config(3));
  const auto mats = collect_latents(handle, prompts_for({"en", "ja"}, 5), 2);
  write_scatter_csv(dir.path() / "s.csv", mats, pca_fit(stack_rows(mats), 2));
  std::ifstream in(dir.path() / "s.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "lang,instance_id,pc1,pc2");
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    CHECK(std::count(line.begin(), line.end(), ',') == 3);
  }
  CHECK(n == 10);
}
