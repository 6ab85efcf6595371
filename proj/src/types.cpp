#include "jpcp/types.hpp"

#include <cmath>
#include <set>

namespace jpcp {

void EmbeddingSet::validate() const {
  const auto n = static_cast<std::size_t>(size());
  if (start_times.size() != n || end_times.size() != n) {
    throw DataError("embedding set: time arrays do not match the number of vectors");
  }
  if (!words.empty() && words.size() != n) {
    throw DataError("embedding set: word lists do not match the number of vectors");
  }
  if (!vectors.allFinite()) throw DataError("embedding set: non-finite vector entry");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(start_times[i] < end_times[i])) {
      throw DataError("embedding " + std::to_string(i) + ": start_time must be < end_time");
    }
  }
}

EmbeddingSet make_embedding_set(MatrixXd vectors) {
  EmbeddingSet set;
  const auto n = static_cast<std::size_t>(vectors.rows());
  set.vectors = std::move(vectors);
  set.start_times.resize(n);
  set.end_times.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    set.start_times[i] = static_cast<double>(i);
    set.end_times[i] = static_cast<double>(i + 1);
  }
  return set;
}

double normalize_rows(MatrixXd& vectors) {
  double worst = 0.0;
  for (Index i = 0; i < vectors.rows(); ++i) {
    const double norm = vectors.row(i).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw DataError("embedding " + std::to_string(i) + " has zero or non-finite norm");
    }
    worst = std::max(worst, std::abs(norm - 1.0));
    vectors.row(i) /= norm;
  }
  return worst;
}

int count_distinct(const Labels& labels) {
  return static_cast<int>(std::set<int>(labels.begin(), labels.end()).size());
}

}  // namespace jpcp
