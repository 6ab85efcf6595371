#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "jpcp/log.hpp"
#include "jpcp/types.hpp"

namespace jpcp {

inline constexpr double kDefaultRowKeepFraction = 0.05;
inline constexpr Index kDefaultRowKeepMin = 6;
inline constexpr double kRefineDamping = 0.01;

/// max(4, ceil(n / 10)), capped at n - 1.
inline Index default_knn_k(Index n) {
  const Index k = std::max<Index>(4, (n + 9) / 10);
  return std::max<Index>(1, std::min(k, n - 1));
}

/// Throws DataError unless `a` is square, symmetric within `tol`, finite, in
/// [0, 1] and has a unit diagonal.
template <typename Derived>
void check_affinity(const Eigen::MatrixBase<Derived>& a, double tol = 1e-9) {
  using std::abs;
  if (a.rows() != a.cols()) throw DataError("affinity matrix is not square");
  for (Index i = 0; i < a.rows(); ++i) {
    if (abs(static_cast<double>(a(i, i)) - 1.0) > tol) throw DataError("affinity diagonal must be 1");
    for (Index j = 0; j < a.cols(); ++j) {
      const double v = static_cast<double>(a(i, j));
      if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) throw DataError("affinity entry outside [0, 1]");
      if (abs(v - static_cast<double>(a(j, i))) > tol) throw DataError("affinity matrix is not symmetric");
    }
  }
}

/// Shifted cosine similarity (1 + cos) / 2 between the rows of `x`.
template <typename Derived>
Matrix<typename Derived::Scalar> cosine_affinity(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  if (n < 1) throw InvalidArgument("cosine affinity needs at least one embedding");

  Matrix<Scalar> unit = x;
  for (Index i = 0; i < n; ++i) {
    const Scalar norm = unit.row(i).norm();
    if (!(norm > Scalar(0))) throw DataError("embedding " + std::to_string(i) + " has zero norm");
    unit.row(i) /= norm;
  }
  const Matrix<Scalar> gram = unit * unit.transpose();

  Matrix<Scalar> a(n, n);
  for (Index i = 0; i < n; ++i) {
    a(i, i) = Scalar(1);
    for (Index j = i + 1; j < n; ++j) {
      const Scalar v = std::clamp((Scalar(1) + gram(i, j)) / Scalar(2), Scalar(0), Scalar(1));
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

inline MatrixXd cosine_affinity(const EmbeddingSet& embeddings) { return cosine_affinity(embeddings.vectors); }

/// Row-wise thresholding followed by symmetrization. In every row, entries
/// strictly below the (1 - keep_fraction) quantile (linear interpolation over
/// the whole row) are multiplied by kRefineDamping. `min_keep` lowers the
/// quantile where needed so that at least that many off-diagonal entries per
/// row reach the threshold. The result is (A' + A'^T)/2 with the diagonal reset
/// to 1.
template <typename Derived>
Matrix<typename Derived::Scalar> refine(const Eigen::MatrixBase<Derived>& a, double keep_fraction, Index min_keep = 0) {
  using Scalar = typename Derived::Scalar;
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw InvalidArgument("row_keep_fraction must lie in (0, 1]");
  }
  const Index n = a.rows();
  Matrix<Scalar> damped = a;
  std::vector<Scalar> row(static_cast<std::size_t>(n));
  if (min_keep < 0) throw InvalidArgument("row_keep_min must be >= 0");
  const double pos = std::min((1.0 - keep_fraction) * static_cast<double>(n - 1),
                              static_cast<double>(std::max<Index>(n - 1 - min_keep, 0)));
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, row.size() - 1);
  const Scalar frac = static_cast<Scalar>(pos - std::floor(pos));

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = a(i, j);
    std::sort(row.begin(), row.end());
    const Scalar threshold = row[lo] + frac * (row[hi] - row[lo]);
    for (Index j = 0; j < n; ++j) {
      if (a(i, j) < threshold) damped(i, j) *= static_cast<Scalar>(kRefineDamping);
    }
  }

  Matrix<Scalar> out = (damped + damped.transpose()) / Scalar(2);
  out.diagonal().setOnes();
  return out;
}

/// Constrained affinity adjustment driven by propagated constraints in [-1, 1]:
/// non-negative entries pull the affinity towards 1, negative ones towards 0.
template <typename DerivedA, typename DerivedZ>
Matrix<typename DerivedA::Scalar> apply_constraints(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedZ>& z_hat) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != z_hat.rows() || a.cols() != z_hat.cols()) {
    throw InvalidArgument("affinity and constraint matrices differ in shape");
  }
  const Index n = a.rows();
  Matrix<Scalar> out(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const Scalar z = static_cast<Scalar>(z_hat(i, j));
      const Scalar v = a(i, j);
      if (!(z >= Scalar(-1) && z <= Scalar(1))) {
        throw std::logic_error("propagated constraint outside [-1, 1]; clamp before adjusting affinity");
      }
      if (z == Scalar(0)) out(i, j) = v;
      else if (z > Scalar(0)) out(i, j) = Scalar(1) - (Scalar(1) - z) * (Scalar(1) - v);
      else out(i, j) = (Scalar(1) + z) * v;
    }
  }
  out.diagonal().setOnes();
  return out;
}

/// k-nearest-neighbour sparsification: each row keeps its k largest
/// off-diagonal entries (ties to the lower column index), then (A'^T + A')/2.
template <typename Derived>
Matrix<typename Derived::Scalar> knn_sparsify(const Eigen::MatrixBase<Derived>& a, Index k) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  if (k < 1 || k >= n) {
    throw InvalidArgument("knn_sparsify needs 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  }
  Matrix<Scalar> kept = Matrix<Scalar>::Zero(n, n);
  std::vector<Index> cols;
  cols.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    cols.clear();
    for (Index j = 0; j < n; ++j)
      if (j != i) cols.push_back(j);
    std::partial_sort(cols.begin(), cols.begin() + k, cols.end(), [&](Index x, Index y) {
      return a(i, x) > a(i, y) || (a(i, x) == a(i, y) && x < y);
    });
    for (Index t = 0; t < k; ++t) kept(i, cols[static_cast<std::size_t>(t)]) = a(i, cols[static_cast<std::size_t>(t)]);
  }
  Matrix<Scalar> out = (kept.transpose() + kept) / Scalar(2);
  out.diagonal().setOnes();
  return out;
}

/// D^{-1/2} A D^{-1/2}, D the degree matrix of A. This is the normalized
/// adjacency (spectrum in [-1, 1]) that constraint propagation diffuses over.
/// A zero row sum throws, unless `zero_isolated` is set, in which case that
/// node's row and column are left at zero.
template <typename Derived>
Matrix<typename Derived::Scalar> normalized_laplacian(const Eigen::MatrixBase<Derived>& a, bool zero_isolated = false) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows();
  Vector<Scalar> inv_sqrt = a.rowwise().sum();
  for (Index i = 0; i < n; ++i) {
    if (!(inv_sqrt(i) > Scalar(0))) {
      if (!zero_isolated) throw DataError("affinity row " + std::to_string(i) + " has zero sum");
      log().warn("node {} is isolated in the affinity graph; its propagation row is zeroed", i);
      inv_sqrt(i) = Scalar(0);
    } else {
      inv_sqrt(i) = Scalar(1) / std::sqrt(inv_sqrt(i));
    }
  }
  Matrix<Scalar> l = inv_sqrt.asDiagonal() * a * inv_sqrt.asDiagonal();
  // Exact symmetry; the two scalings round differently per triangle.
  return (l + l.transpose()) / Scalar(2);
}

}  // namespace jpcp
