#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "jpcp/types.hpp"

namespace jpcp {

/// One annotated stretch of a session, as produced by dialogue detection and
/// speaker-turn detection over the transcript.
struct SegmentAnnotation {
  std::int64_t segment_id = 0;
  double start_time = 0.0;
  double end_time = 0.0;
  bool is_dialogue = false;
  std::vector<double> turn_change_points;
  std::optional<std::string> speaker_label;

  /// start < end and every change point strictly inside; throws DataError.
  void validate() const;
};

/// Must-link and cannot-link sets over embedding indices. Pairs are kept in
/// canonical (i < j) order, so membership is symmetric.
class ConstraintSet {
 public:
  ConstraintSet() = default;

  /// Adds a must-link. Throws InvalidArgument for i == j, negative indices or
  /// if the pair is already a cannot-link. Returns false if already present.
  bool add_must(Index i, Index j);
  bool add_cannot(Index i, Index j);

  bool is_must(Index i, Index j) const { return must_.count(canonical(i, j)) != 0; }
  bool is_cannot(Index i, Index j) const { return cannot_.count(canonical(i, j)) != 0; }
  bool is_constrained(Index i, Index j) const { return is_must(i, j) || is_cannot(i, j); }

  const std::set<IndexPair>& must() const { return must_; }
  const std::set<IndexPair>& cannot() const { return cannot_; }
  std::size_t size() const { return must_.size() + cannot_.size(); }
  bool empty() const { return must_.empty() && cannot_.empty(); }

  /// Largest index referenced plus one (0 when empty).
  Index min_size() const;

  static IndexPair canonical(Index i, Index j) { return i < j ? IndexPair{i, j} : IndexPair{j, i}; }

  friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

 private:
  std::set<IndexPair> must_;
  std::set<IndexPair> cannot_;
};

/// Derives constraints from segment annotations. Embeddings fully inside one
/// non-dialogue segment are must-linked; at each turn change point the last
/// embedding ending at or before the point is cannot-linked with the first
/// embedding starting at or after it. Pairs that qualify for both end up as
/// cannot-links and are appended to `conflicts` when given.
ConstraintSet build_constraints(const std::vector<SegmentAnnotation>& annotations,
                                const EmbeddingSet& embeddings,
                                std::vector<IndexPair>* conflicts = nullptr);

/// Samples floor(rate * N(N-1)/2) distinct pairs uniformly and labels each
/// must or cannot from ground truth. Empty label strings count as unlabeled.
ConstraintSet simulate_constraints(const std::vector<std::string>& labels, double rate,
                                   std::uint64_t seed);
ConstraintSet simulate_constraints(const Labels& labels, double rate, std::uint64_t seed);

/// Z with +1 for must, -1 for cannot, 0 elsewhere.
MatrixXd to_constraint_matrix(const ConstraintSet& cs, Index n);

/// Reads the canonical pair sets back from a constraint matrix.
ConstraintSet from_constraint_matrix(const MatrixXd& z);

/// Number of unordered pairs among n items.
inline std::uint64_t pair_count(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

/// Maps a rank in [0, n(n-1)/2) to the pair (i, j), i < j, in row-major order.
IndexPair unrank_pair(std::uint64_t rank, Index n);

}  // namespace jpcp
