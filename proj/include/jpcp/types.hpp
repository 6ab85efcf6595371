#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace jpcp {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Index = Eigen::Index;

/// Unordered pair of embedding indices, stored with first < second.
using IndexPair = std::pair<Index, Index>;

/// Per-embedding cluster or speaker id.
using Labels = std::vector<int>;

/// Malformed input data (bad files, inconsistent annotations, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// N embeddings of dimension D. Row i of `vectors` is embedding i.
struct EmbeddingSet {
  MatrixXd vectors;
  std::vector<double> start_times;
  std::vector<double> end_times;
  // Optional per-embedding token lists; empty when no transcript was loaded.
  std::vector<std::vector<std::string>> words;

  Index size() const { return vectors.rows(); }
  Index dim() const { return vectors.cols(); }
  bool has_words() const { return !words.empty(); }

  /// Checks time extents, finiteness and array lengths; throws DataError.
  void validate() const;
};

/// Builds an EmbeddingSet on a unit timeline ([i, i+1) seconds per row).
EmbeddingSet make_embedding_set(MatrixXd vectors);

/// Scales every row to unit Euclidean norm; throws DataError on a zero row.
/// Returns the largest |norm - 1| seen before scaling.
double normalize_rows(MatrixXd& vectors);

/// Number of distinct values in `labels`.
int count_distinct(const Labels& labels);

}  // namespace jpcp
