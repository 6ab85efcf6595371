#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "jpcp/affinity.hpp"
#include "jpcp/rng.hpp"
#include "jpcp/types.hpp"

namespace jpcp {

struct ClusteringConfig {
  int max_speakers = 16;
  std::optional<int> fixed_k;
  int kmeans_restarts = 10;
  std::uint64_t seed = 0;

  void validate() const {
    if (max_speakers < 1) throw InvalidArgument("max_speakers must be >= 1");
    if (kmeans_restarts < 1) throw InvalidArgument("kmeans_restarts must be >= 1");
    if (fixed_k && *fixed_k < 1) throw InvalidArgument("fixed_k must be >= 1");
  }
};

struct DiarizationResult {
  Labels labels;
  int k = 0;
  /// Spectrum of the normalized affinity, descending.
  VectorXd eigenvalues;
};

/// Eigenvalues of D^{-1/2} A D^{-1/2}, largest first.
template <typename Derived>
VectorXd normalized_spectrum(const Eigen::MatrixBase<Derived>& a) {
  const MatrixXd l = normalized_laplacian(a.template cast<double>().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(l, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse();
}

/// Largest-eigengap index among k in [1, max_k]; ties go to the smallest k.
inline int eigengap_count(const VectorXd& descending, int max_k) {
  int best = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= max_k && k < descending.size(); ++k) {
    const double gap = descending(k - 1) - descending(k);
    if (gap > best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

template <typename Derived>
int estimate_num_speakers(const Eigen::MatrixBase<Derived>& a, int max_speakers) {
  if (a.rows() < 2) return 1;
  const int max_k = std::min<int>(max_speakers, static_cast<int>(a.rows()) - 1);
  return eigengap_count(normalized_spectrum(a), max_k);
}

struct KMeansResult {
  Labels labels;
  double inertia = 0.0;
};

/// Lloyd's k-means with k-means++ seeding over the rows of `points`. Empty
/// clusters are refilled with the point farthest from its centroid.
KMeansResult kmeans(const MatrixXd& points, int k, Rng& rng, int max_iterations = 300);

/// Renumbers labels in order of first appearance.
Labels canonical_labels(const Labels& labels);

/// Normalized spectral clustering: top-k eigenvectors of the normalized
/// affinity, rows scaled to unit length, best of `kmeans_restarts` k-means runs.
DiarizationResult spectral_cluster(const MatrixXd& a, const ClusteringConfig& cfg);

}  // namespace jpcp
