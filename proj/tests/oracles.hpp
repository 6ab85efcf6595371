#pragma once

// Reference implementations used only by the tests. They are deliberately
// naive and share no code with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// D^{-1/2} A D^{-1/2} with explicit loops; isolated rows stay zero.
inline MatrixXd normalized_adjacency(const MatrixXd& a) {
  const auto n = a.rows();
  std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) deg[i] += a(i, j);
  MatrixXd l = MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (deg[i] > 0 && deg[j] > 0) l(i, j) = a(i, j) / std::sqrt(deg[i] * deg[j]);
  return l;
}

// Two-stage fixed point: vertical pass F <- lam L F + (1 - lam) Z, then the
// horizontal pass F <- lam F L + (1 - lam) F_v, each iterated to a tolerance.
inline MatrixXd e2cp_iterative(const MatrixXd& z, const MatrixXd& a, double lam, double tol = 1e-14,
                               int max_iter = 100000) {
  const MatrixXd l = normalized_adjacency(a);
  auto iterate = [&](const MatrixXd& source, bool left) {
    MatrixXd f = MatrixXd::Zero(source.rows(), source.cols());
    for (int it = 0; it < max_iter; ++it) {
      MatrixXd next = left ? MatrixXd(lam * l * f + (1.0 - lam) * source) : MatrixXd(lam * f * l + (1.0 - lam) * source);
      const double step = (next - f).norm();
      f = std::move(next);
      if (step <= tol * (1.0 - lam)) break;
    }
    return f;
  };
  const MatrixXd fv = iterate(z, true);
  return iterate(fv, false);
}

// Top-d right singular vectors of the centered data.
inline MatrixXd pca_basis(const MatrixXd& x, Eigen::Index d) {
  const MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::JacobiSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  return svd.matrixV().leftCols(d);
}

// Largest principal angle between the column spans of two orthonormal bases,
// via asin of the spectral norm of the residual projection.
inline double max_subspace_angle(const MatrixXd& u, const MatrixXd& v) {
  const MatrixXd residual = v - u * (u.transpose() * v);
  Eigen::JacobiSVD<MatrixXd> svd(residual);
  const double s = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

struct Pairs {
  std::int64_t same_both = 0, same_pred = 0, same_truth = 0, total = 0;
};

inline Pairs count_pairs(const std::vector<int>& pred, const std::vector<int>& truth) {
  Pairs p;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      const bool sp = pred[i] == pred[j];
      const bool st = truth[i] == truth[j];
      p.same_both += sp && st;
      p.same_pred += sp;
      p.same_truth += st;
      ++p.total;
    }
  }
  return p;
}

// Hubert-Arabie ARI, (index - expected) / (max - expected), scaled by 2T so
// numerator and denominator are exact integers before one division.
inline double ari(const std::vector<int>& pred, const std::vector<int>& truth) {
  const Pairs p = count_pairs(pred, truth);
  const std::int64_t num = 2 * (p.total * p.same_both - p.same_pred * p.same_truth);
  const std::int64_t den = p.total * (p.same_pred + p.same_truth) - 2 * p.same_pred * p.same_truth;
  if (den == 0) return 1.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

// NMI from explicit probability tables, geometric-mean normalization.
inline double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  const double n = static_cast<double>(pred.size());
  std::map<int, double> pp, pt;
  std::map<std::pair<int, int>, double> joint;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    pp[pred[i]] += 1.0;
    pt[truth[i]] += 1.0;
    joint[{pred[i], truth[i]}] += 1.0;
  }
  for (auto* m : {&pp, &pt})
    for (auto& [k, v] : *m) v /= n;
  for (auto& [k, v] : joint) v /= n;
  if (pp.size() == 1 && pt.size() == 1) return 1.0;
  double hp = 0.0, ht = 0.0, mi = 0.0;
  for (const auto& [k, v] : pp) hp -= v * std::log(v);
  for (const auto& [k, v] : pt) ht -= v * std::log(v);
  if (hp <= 0.0 || ht <= 0.0) return 0.0;
  for (const auto& [k, v] : joint) mi += v * (std::log(v) - std::log(pp[k.first]) - std::log(pt[k.second]));
  return mi / std::sqrt(hp * ht);
}

inline std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i)
    for (std::size_t j = 1; j <= b.size(); ++j)
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
  return d[a.size()][b.size()];
}

// cpWER error count by trying every speaker permutation. Streams are the
// concatenated words of each speaker; missing speakers are empty streams.
inline std::size_t cpwer_errors(const std::vector<std::vector<std::string>>& ref_streams,
                                const std::vector<std::vector<std::string>>& hyp_streams) {
  const std::size_t n = std::max(ref_streams.size(), hyp_streams.size());
  std::vector<std::vector<std::string>> ref = ref_streams, hyp = hyp_streams;
  ref.resize(n);
  hyp.resize(n);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = SIZE_MAX;
  do {
    std::size_t e = 0;
    for (std::size_t i = 0; i < n; ++i) e += levenshtein(ref[i], hyp[perm[i]]);
    best = std::min(best, e);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracle
