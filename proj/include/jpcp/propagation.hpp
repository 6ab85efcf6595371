#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Cholesky>

#include "jpcp/affinity.hpp"
#include "jpcp/constraints.hpp"
#include "jpcp/rng.hpp"
#include "jpcp/types.hpp"

namespace jpcp {

struct PropagationConfig {
  double lambda = 0.5;
  /// 0 selects default_knn_k(N).
  Index knn_k = 0;
  double theta_m = 0.9;
  double theta_c = 0.15;
  double augment_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in (0, 1)");
    if (!(augment_fraction >= 0.0 && augment_fraction <= 1.0)) {
      throw InvalidArgument("augment_fraction must lie in [0, 1]");
    }
    if (!(theta_c < theta_m)) throw InvalidArgument("theta_c must be < theta_m");
    if (knn_k < 0) throw InvalidArgument("knn_k must be non-negative");
  }

  Index knn_for(Index n) const { return knn_k > 0 ? std::min(knn_k, n - 1) : default_knn_k(n); }
};

/// Closed-form propagation without the final clamp:
/// (1 - lambda)^2 (I - lambda L)^{-1} Z (I - lambda L)^{-1}, L the normalized
/// adjacency of `a`. Both solves reuse one Cholesky factor of I - lambda L.
/// lambda = 0 is accepted and returns Z.
template <typename DerivedZ, typename DerivedA>
Matrix<typename DerivedA::Scalar> e2cp_unclamped(const Eigen::MatrixBase<DerivedZ>& z,
                                                 const Eigen::MatrixBase<DerivedA>& a, double lambda) {
  using Scalar = typename DerivedA::Scalar;
  if (!(lambda >= 0.0 && lambda < 1.0)) throw InvalidArgument("lambda must lie in [0, 1)");
  if (z.rows() != a.rows() || z.cols() != a.cols() || a.rows() != a.cols()) {
    throw InvalidArgument("constraint and affinity matrices differ in shape");
  }
  const Index n = a.rows();
  const Scalar lam = static_cast<Scalar>(lambda);
  const Matrix<Scalar> l = normalized_laplacian(a, /*zero_isolated=*/true);
  const Matrix<Scalar> system = Matrix<Scalar>::Identity(n, n) - lam * l;

  Eigen::LLT<Matrix<Scalar>> llt(system);
  if (llt.info() != Eigen::Success) throw std::runtime_error("I - lambda*L is not positive definite");

  // Left solve, then the right solve through the transpose (system is symmetric).
  const Matrix<Scalar> left = llt.solve(z.template cast<Scalar>());
  const Matrix<Scalar> both = llt.solve(left.transpose()).transpose();
  const Scalar scale = (Scalar(1) - lam) * (Scalar(1) - lam);
  return scale * (both + both.transpose()) / Scalar(2);
}

template <typename Derived>
Matrix<typename Derived::Scalar> clamp_unit(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  return m.cwiseMax(Scalar(-1)).cwiseMin(Scalar(1));
}

/// Exhaustive and efficient constraint propagation, clamped to [-1, 1].
template <typename DerivedZ, typename DerivedA>
Matrix<typename DerivedA::Scalar> e2cp(const Eigen::MatrixBase<DerivedZ>& z, const Eigen::MatrixBase<DerivedA>& a,
                                       double lambda) {
  return clamp_unit(e2cp_unclamped(z, a, lambda));
}

/// Adds high-confidence pairs from the affinity: among unconstrained pairs
/// with a > theta_m, floor(augment_fraction * count) drawn uniformly become
/// must-links; likewise pairs with a < theta_c become cannot-links.
template <typename Derived>
ConstraintSet augment_constraints(const ConstraintSet& cs, const Eigen::MatrixBase<Derived>& a,
                                  const PropagationConfig& cfg) {
  ConstraintSet out = cs;
  if (cfg.augment_fraction <= 0.0) return out;
  const Index n = a.rows();
  std::vector<IndexPair> high;
  std::vector<IndexPair> low;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (cs.is_constrained(i, j)) continue;
      const double v = static_cast<double>(a(i, j));
      if (v > cfg.theta_m) high.emplace_back(i, j);
      else if (v < cfg.theta_c) low.emplace_back(i, j);
    }
  }

  Rng rng(cfg.seed);
  // Partial Fisher-Yates: the first `take` slots end up a uniform subset.
  auto draw = [&](std::vector<IndexPair>& pool) {
    const auto take = static_cast<std::size_t>(std::floor(cfg.augment_fraction * static_cast<double>(pool.size())));
    for (std::size_t t = 0; t < take; ++t) {
      const auto pick = t + static_cast<std::size_t>(rng.uniform_index(pool.size() - t));
      std::swap(pool[t], pool[pick]);
    }
    pool.resize(take);
  };
  draw(high);
  draw(low);
  for (const auto& [i, j] : high) out.add_must(i, j);
  for (const auto& [i, j] : low) out.add_cannot(i, j);
  return out;
}

/// E2CP over a k-NN sparsified graph with affinity-based constraint
/// augmentation. Augmentation thresholds are read from `confidence`; the
/// propagation graph is the k-NN sparsified `a`.
template <typename DerivedC, typename Derived>
Matrix<typename Derived::Scalar> e2cpm(const ConstraintSet& cs, const Eigen::MatrixBase<DerivedC>& confidence,
                                       const Eigen::MatrixBase<Derived>& a, const PropagationConfig& cfg) {
  cfg.validate();
  const Index n = a.rows();
  if (confidence.rows() != n || confidence.cols() != n) {
    throw InvalidArgument("confidence and affinity matrices differ in shape");
  }
  if (n < 2) return Matrix<typename Derived::Scalar>::Zero(n, n);
  const ConstraintSet augmented = augment_constraints(cs, confidence, cfg);
  const MatrixXd z = to_constraint_matrix(augmented, n);
  const auto sparse = knn_sparsify(a, cfg.knn_for(n));
  return e2cp(z, sparse, cfg.lambda);
}

/// Same, with `a` serving as both the augmentation confidence and the graph.
template <typename Derived>
Matrix<typename Derived::Scalar> e2cpm(const ConstraintSet& cs, const Eigen::MatrixBase<Derived>& a,
                                       const PropagationConfig& cfg) {
  return e2cpm(cs, a, a, cfg);
}

}  // namespace jpcp
