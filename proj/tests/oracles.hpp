#pragma once

// Reference implementations used only by tests.

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "xalign/backend.hpp"
#include "xalign/geometry.hpp"

namespace xalign::testing {

inline Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd out(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) out(r, c) = m(r, c);
  return out;
}

struct EigenPca {
  std::vector<Eigen::VectorXd> components;
  std::vector<double> variances;
  double total = 0.0;
};

// Dense self-adjoint eigensolver on the sample covariance, same sign convention.
inline EigenPca eigen_pca(const Matrix& data, std::size_t dims) {
  const Eigen::MatrixXd x = to_eigen(data);
  const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
  const Eigen::MatrixXd cov = centred.transpose() * centred / static_cast<double>(x.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  EigenPca out;
  out.total = cov.trace();
  const auto n = cov.rows();
  for (std::size_t k = 0; k < dims; ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(n - 1 - static_cast<Eigen::Index>(k));
    Eigen::Index peak = 0;
    v.cwiseAbs().maxCoeff(&peak);
    if (v(peak) < 0) v = -v;
    out.components.push_back(v);
    out.variances.push_back(solver.eigenvalues()(n - 1 - static_cast<Eigen::Index>(k)));
  }
  return out;
}

// Best rank-k reconstruction error of the centred data (sum of the trailing squared singular values).
inline double svd_tail_energy(const Matrix& data, std::size_t k) {
  const Eigen::MatrixXd x = to_eigen(data);
  const Eigen::MatrixXd centred = x.rowwise() - x.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centred);
  const auto& s = svd.singularValues();
  double tail = 0.0;
  for (Eigen::Index i = static_cast<Eigen::Index>(k); i < s.size(); ++i) tail += s(i) * s(i);
  return tail;
}

// Textbook single-pass product-moment formula.
inline double pearson_formula(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  long double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += static_cast<long double>(a[i]) * b[i];
    saa += static_cast<long double>(a[i]) * a[i];
    sbb += static_cast<long double>(b[i]) * b[i];
  }
  const long double num = n * sab - sa * sb;
  const long double den = std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
  return static_cast<double>(num / den);
}

// Teacher-forced scoring one token at a time through forward(), independent of
// score_completion and token_log_probs.
inline double stepwise_score(const Backend& backend, const std::string& prompt, const std::string& completion) {
  auto ids = backend.tokenize(prompt).ids;
  double total = 0.0;
  for (auto id : backend.tokenize(completion).ids) {
    const auto trace = backend.forward(ids, false, nullptr);
    total += log_softmax(trace.final_logits)[static_cast<std::size_t>(id)];
    ids.push_back(id);
  }
  return total;
}

// Total variation distance between two distributions on one support.
inline double total_variation(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace xalign::testing
