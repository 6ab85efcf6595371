#include "jpcp/clustering.hpp"

#include <map>
#include <string>

namespace jpcp {

namespace {

std::size_t weighted_pick(const std::vector<double>& weights, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  if (!(total > 0.0)) return static_cast<std::size_t>(rng.uniform_index(weights.size()));
  const double target = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (target < acc) return i;
  }
  // Round-off fallthrough: last point with non-zero weight.
  for (std::size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0.0) return i;
  return 0;
}

}  // namespace

KMeansResult kmeans(const MatrixXd& points, int k, Rng& rng, int max_iterations) {
  const Index n = points.rows();
  if (k < 1 || k > n) throw InvalidArgument("kmeans needs 1 <= k <= N");

  MatrixXd centers(k, points.cols());
  std::vector<double> dist2(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  centers.row(0) = points.row(static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n))));
  for (int c = 1; c < k; ++c) {
    for (Index i = 0; i < n; ++i) {
      dist2[i] = std::min(dist2[i], (points.row(i) - centers.row(c - 1)).squaredNorm());
    }
    centers.row(c) = points.row(static_cast<Index>(weighted_pick(dist2, rng)));
  }

  Labels labels(static_cast<std::size_t>(n), -1);
  std::vector<double> own(static_cast<std::size_t>(n), 0.0);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = (points.row(i) - centers.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      own[i] = best_d;
      if (labels[i] != best) {
        labels[i] = best;
        changed = true;
      }
    }

    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (int l : labels) ++counts[l];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      Index far = -1;
      for (Index i = 0; i < n; ++i) {
        if (counts[labels[i]] > 1 && (far < 0 || own[i] > own[far])) far = i;
      }
      --counts[labels[far]];
      labels[far] = c;
      own[far] = 0.0;
      counts[c] = 1;
      changed = true;
    }

    centers.setZero();
    for (Index i = 0; i < n; ++i) centers.row(labels[i]) += points.row(i);
    for (int c = 0; c < k; ++c) centers.row(c) /= static_cast<double>(counts[c]);
    if (!changed) break;
  }

  KMeansResult result;
  result.labels = std::move(labels);
  for (Index i = 0; i < n; ++i) result.inertia += (points.row(i) - centers.row(result.labels[i])).squaredNorm();
  return result;
}

Labels canonical_labels(const Labels& labels) {
  std::map<int, int> remap;
  Labels out;
  out.reserve(labels.size());
  for (int l : labels) {
    auto it = remap.try_emplace(l, static_cast<int>(remap.size())).first;
    out.push_back(it->second);
  }
  return out;
}

DiarizationResult spectral_cluster(const MatrixXd& a, const ClusteringConfig& cfg) {
  cfg.validate();
  const Index n = a.rows();
  DiarizationResult result;
  if (n == 0) return result;
  if (n == 1) {
    result.labels = {0};
    result.k = 1;
    result.eigenvalues = VectorXd::Ones(1);
    return result;
  }

  const MatrixXd l = normalized_laplacian(a);
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectral eigen-decomposition failed");
  result.eigenvalues = solver.eigenvalues().reverse();

  int k = cfg.fixed_k ? *cfg.fixed_k
                      : eigengap_count(result.eigenvalues, std::min<int>(cfg.max_speakers, static_cast<int>(n) - 1));
  if (k > n) throw InvalidArgument("requested " + std::to_string(k) + " clusters for " + std::to_string(n) + " embeddings");

  MatrixXd spectral(n, k);
  for (int c = 0; c < k; ++c) spectral.col(c) = solver.eigenvectors().col(n - 1 - c);
  for (Index i = 0; i < n; ++i) {
    const double norm = spectral.row(i).norm();
    if (norm > 0.0) spectral.row(i) /= norm;
  }

  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg.kmeans_restarts; ++r) {
    Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(r)}));
    KMeansResult run = kmeans(spectral, k, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  result.labels = canonical_labels(best.labels);
  result.k = k;
  return result;
}

}  // namespace jpcp
