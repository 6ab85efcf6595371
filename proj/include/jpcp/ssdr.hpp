#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "jpcp/constraints.hpp"
#include "jpcp/log.hpp"
#include "jpcp/types.hpp"

namespace jpcp {

/// Semi-supervised dimension reduction settings. `alpha` weights must-links,
/// `beta` weights cannot-links, `out_dim` is the projected dimension
/// (0 selects min(D, 32), capped at the rank of the scatter matrix).
struct SsdrConfig {
  double alpha = 1.0;
  double beta = 1.0;
  Index out_dim = 0;

  void validate(Index input_dim) const {
    if (!(alpha >= 0.0) || !(beta >= 0.0)) throw InvalidArgument("ssdr alpha and beta must be non-negative");
    if (out_dim < 0 || out_dim > input_dim) throw InvalidArgument("ssdr out_dim must lie in [1, D]");
  }
  Index dim_for(Index input_dim) const { return out_dim > 0 ? out_dim : std::min<Index>(input_dim, 32); }
};

template <typename Scalar>
struct SsdrResult {
  /// D x d, orthonormal columns.
  Matrix<Scalar> projection;
  /// Descending eigenvalues of E L E^T for the retained directions.
  Vector<Scalar> eigenvalues;
  /// N x d projected embeddings, each row re-normalized to unit length.
  Matrix<Scalar> embeddings;
};

/// Pair weights: 1/N^2 everywhere, minus alpha/|M| on must-link pairs and plus
/// beta/|C| on cannot-link pairs. With these signs, maximizing
/// sum_ij S_ij |W^T(e_i - e_j)|^2 keeps the overall spread, pulls must-linked
/// embeddings together and pushes cannot-linked ones apart. A weight term with
/// an empty set is skipped.
inline MatrixXd ssdr_weight_matrix(const ConstraintSet& cs, Index n, const SsdrConfig& cfg) {
  if (n < 2) throw InvalidArgument("ssdr needs at least two embeddings");
  if (cs.min_size() > n) throw InvalidArgument("constraint index out of range");
  const double base = 1.0 / (static_cast<double>(n) * static_cast<double>(n));
  MatrixXd s = MatrixXd::Constant(n, n, base);
  if (!cs.must().empty()) {
    const double w = base - cfg.alpha / static_cast<double>(cs.must().size());
    for (const auto& [i, j] : cs.must()) s(i, j) = s(j, i) = w;
  }
  if (!cs.cannot().empty()) {
    const double w = base + cfg.beta / static_cast<double>(cs.cannot().size());
    for (const auto& [i, j] : cs.cannot()) s(i, j) = s(j, i) = w;
  }
  return s;
}

/// Unnormalized graph Laplacian diag(S 1) - S.
template <typename Derived>
Matrix<typename Derived::Scalar> graph_laplacian(const Eigen::MatrixBase<Derived>& s) {
  Matrix<typename Derived::Scalar> l = -s;
  l.diagonal() += s.rowwise().sum();
  return l;
}

/// Flips each column so its largest-magnitude entry is positive.
template <typename Scalar>
void canonicalize_signs(Matrix<Scalar>& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < Scalar(0)) vectors.col(c) = -vectors.col(c);
  }
}

/// Projects the rows of `x` (N x D) onto the top eigenvectors of E L E^T,
/// E the centered embeddings as columns and L the Laplacian of the SSDR
/// weight matrix.
template <typename Derived>
SsdrResult<typename Derived::Scalar> ssdr_project(const Eigen::MatrixBase<Derived>& x, const ConstraintSet& cs,
                                                  const SsdrConfig& cfg) {
  using Scalar = typename Derived::Scalar;
  const Index n = x.rows();
  const Index dim = x.cols();
  cfg.validate(dim);
  Index d = cfg.dim_for(dim);

  const Matrix<Scalar> centered = x.rowwise() - x.colwise().mean();
  const Matrix<Scalar> l = graph_laplacian(ssdr_weight_matrix(cs, n, cfg).cast<Scalar>());
  Matrix<Scalar> scatter = centered.transpose() * l * centered;
  scatter = (scatter + scatter.transpose()) / Scalar(2);

  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(scatter);
  if (solver.info() != Eigen::Success) throw std::runtime_error("ssdr eigen-decomposition failed");
  const Vector<Scalar> ascending = solver.eigenvalues();

  const Scalar largest = ascending.cwiseAbs().maxCoeff();
  Index rank = 0;
  for (Index i = 0; i < dim; ++i) {
    if (std::abs(ascending(i)) > largest * Scalar(dim) * std::numeric_limits<Scalar>::epsilon()) ++rank;
  }
  if (d > rank) {
    if (cfg.out_dim > 0) log().warn("ssdr out_dim {} exceeds the rank {} of the scatter matrix; reducing", d, rank);
    else log().debug("ssdr default out_dim {} capped at scatter rank {}", d, rank);
    d = std::max<Index>(1, rank);
  }

  SsdrResult<Scalar> result;
  result.projection.resize(dim, d);
  result.eigenvalues.resize(d);
  for (Index c = 0; c < d; ++c) {
    result.projection.col(c) = solver.eigenvectors().col(dim - 1 - c);
    result.eigenvalues(c) = ascending(dim - 1 - c);
  }
  canonicalize_signs(result.projection);

  result.embeddings = centered * result.projection;
  for (Index i = 0; i < n; ++i) {
    const Scalar norm = result.embeddings.row(i).norm();
    if (norm > Scalar(0)) result.embeddings.row(i) /= norm;
    else log().warn("embedding {} projects to the origin", i);
  }
  return result;
}

/// Objective trace(W^T E L E^T W) for an arbitrary D x d basis W.
template <typename DerivedX, typename DerivedW>
double ssdr_objective(const Eigen::MatrixBase<DerivedX>& x, const ConstraintSet& cs, const SsdrConfig& cfg,
                      const Eigen::MatrixBase<DerivedW>& w) {
  const MatrixXd xd = x.template cast<double>();
  const MatrixXd centered = xd.rowwise() - xd.colwise().mean();
  const MatrixXd l = graph_laplacian(ssdr_weight_matrix(cs, x.rows(), cfg));
  const MatrixXd projected = centered * w.template cast<double>();
  return (projected.transpose() * l * projected).trace();
}

}  // namespace jpcp
