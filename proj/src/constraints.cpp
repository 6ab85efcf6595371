#include "jpcp/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include "jpcp/log.hpp"
#include "jpcp/rng.hpp"

namespace jpcp {

void SegmentAnnotation::validate() const {
  const std::string where = "segment " + std::to_string(segment_id);
  if (!std::isfinite(start_time) || !std::isfinite(end_time) || !(start_time < end_time)) {
    throw DataError(where + ": start_time must be < end_time");
  }
  for (double t : turn_change_points) {
    if (!(t > start_time && t < end_time)) {
      throw DataError(where + ": turn change point " + std::to_string(t) +
                      " is not strictly inside the segment");
    }
  }
}

bool ConstraintSet::add_must(Index i, Index j) {
  if (i == j || i < 0 || j < 0) throw InvalidArgument("must-link needs two distinct non-negative indices");
  const auto p = canonical(i, j);
  if (cannot_.count(p)) {
    throw InvalidArgument("pair (" + std::to_string(p.first) + "," + std::to_string(p.second) +
                          ") is already a cannot-link");
  }
  return must_.insert(p).second;
}

bool ConstraintSet::add_cannot(Index i, Index j) {
  if (i == j || i < 0 || j < 0) throw InvalidArgument("cannot-link needs two distinct non-negative indices");
  const auto p = canonical(i, j);
  if (must_.count(p)) {
    throw InvalidArgument("pair (" + std::to_string(p.first) + "," + std::to_string(p.second) +
                          ") is already a must-link");
  }
  return cannot_.insert(p).second;
}

Index ConstraintSet::min_size() const {
  Index n = 0;
  if (!must_.empty()) n = std::max(n, std::max_element(must_.begin(), must_.end(), [](auto& a, auto& b) {
                                        return a.second < b.second;
                                      })->second + 1);
  if (!cannot_.empty()) n = std::max(n, std::max_element(cannot_.begin(), cannot_.end(), [](auto& a, auto& b) {
                                          return a.second < b.second;
                                        })->second + 1);
  return n;
}

namespace {

// Index of the annotation containing t (start <= t < end), or -1.
// `order` lists annotations sorted by start time.
std::ptrdiff_t find_segment(const std::vector<SegmentAnnotation>& annotations,
                            const std::vector<std::size_t>& order, double t) {
  auto it = std::upper_bound(order.begin(), order.end(), t, [&](double v, std::size_t idx) {
    return v < annotations[idx].start_time;
  });
  if (it == order.begin()) return -1;
  const std::size_t idx = *std::prev(it);
  return t < annotations[idx].end_time ? static_cast<std::ptrdiff_t>(idx) : -1;
}

}  // namespace

ConstraintSet build_constraints(const std::vector<SegmentAnnotation>& annotations,
                                const EmbeddingSet& embeddings, std::vector<IndexPair>* conflicts) {
  if (annotations.empty()) throw DataError("annotation list is empty");
  for (const auto& a : annotations) a.validate();

  std::vector<std::size_t> order(annotations.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return annotations[a].start_time < annotations[b].start_time;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& prev = annotations[order[k - 1]];
    const auto& next = annotations[order[k]];
    if (prev.end_time > next.start_time) {
      throw DataError("annotations " + std::to_string(prev.segment_id) + " and " +
                      std::to_string(next.segment_id) + " overlap in time");
    }
  }

  const Index n = embeddings.size();
  // Midpoint association of embeddings to segments.
  std::vector<std::vector<Index>> members(annotations.size());
  for (Index e = 0; e < n; ++e) {
    const double mid = 0.5 * (embeddings.start_times[e] + embeddings.end_times[e]);
    const auto seg = find_segment(annotations, order, mid);
    if (seg < 0) throw DataError("embedding " + std::to_string(e) + " is not covered by any annotation");
    members[static_cast<std::size_t>(seg)].push_back(e);
  }

  std::set<IndexPair> must;
  std::set<IndexPair> cannot;
  for (std::size_t s = 0; s < annotations.size(); ++s) {
    const auto& seg = annotations[s];
    const auto& ids = members[s];

    if (!seg.is_dialogue) {
      std::vector<Index> inside;
      for (Index e : ids) {
        if (embeddings.start_times[e] >= seg.start_time && embeddings.end_times[e] <= seg.end_time) {
          inside.push_back(e);
        }
      }
      for (std::size_t a = 0; a < inside.size(); ++a)
        for (std::size_t b = a + 1; b < inside.size(); ++b) must.insert(ConstraintSet::canonical(inside[a], inside[b]));
    }

    for (double t : seg.turn_change_points) {
      Index before = -1;
      Index after = -1;
      for (Index e : ids) {
        const double st = embeddings.start_times[e];
        const double en = embeddings.end_times[e];
        if (en <= t && (before < 0 || en >= embeddings.end_times[before])) before = e;
        if (st >= t && (after < 0 || st < embeddings.start_times[after])) after = e;
      }
      if (before >= 0 && after >= 0) cannot.insert(ConstraintSet::canonical(before, after));
    }
  }

  ConstraintSet out;
  for (const auto& p : cannot) out.add_cannot(p.first, p.second);
  for (const auto& p : must) {
    if (cannot.count(p)) {
      log().warn("pair ({},{}) qualifies as must-link and cannot-link; keeping cannot-link", p.first, p.second);
      if (conflicts) conflicts->push_back(p);
      continue;
    }
    out.add_must(p.first, p.second);
  }
  return out;
}

IndexPair unrank_pair(std::uint64_t rank, Index n) {
  Index i = 0;
  std::uint64_t row = static_cast<std::uint64_t>(n - 1);
  while (rank >= row) {
    rank -= row;
    --row;
    ++i;
  }
  return {i, i + 1 + static_cast<Index>(rank)};
}

namespace {

template <typename SameLabel>
ConstraintSet sample_pairs(Index n, double rate, std::uint64_t seed, SameLabel same) {
  if (n < 2) throw InvalidArgument("constraint simulation needs at least two embeddings");
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidArgument("constraint rate must lie in [0, 1]");

  const std::uint64_t total = pair_count(static_cast<std::uint64_t>(n));
  const auto m = static_cast<std::uint64_t>(std::floor(rate * static_cast<double>(total)));

  // Sparse partial Fisher-Yates over pair ranks: the draw is the first m
  // entries of a seeded permutation, so a larger rate extends a smaller one.
  Rng rng(seed);
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto at = [&](std::uint64_t k) {
    auto it = swapped.find(k);
    return it == swapped.end() ? k : it->second;
  };
  std::set<std::uint64_t> ranks;
  for (std::uint64_t t = 0; t < m; ++t) {
    const std::uint64_t pick = t + rng.uniform_index(total - t);
    const std::uint64_t chosen = at(pick);
    swapped[pick] = at(t);
    ranks.insert(chosen);
  }

  ConstraintSet cs;
  Index i = 0;
  std::uint64_t row_start = 0;
  std::uint64_t row_len = static_cast<std::uint64_t>(n - 1);
  for (std::uint64_t r : ranks) {
    while (r >= row_start + row_len) {
      row_start += row_len;
      --row_len;
      ++i;
    }
    const Index j = i + 1 + static_cast<Index>(r - row_start);
    if (same(i, j)) cs.add_must(i, j);
    else cs.add_cannot(i, j);
  }
  return cs;
}

}  // namespace

ConstraintSet simulate_constraints(const std::vector<std::string>& labels, double rate, std::uint64_t seed) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].empty()) throw DataError("embedding " + std::to_string(i) + " has no speaker label");
  }
  return sample_pairs(static_cast<Index>(labels.size()), rate, seed,
                      [&](Index i, Index j) { return labels[i] == labels[j]; });
}

ConstraintSet simulate_constraints(const Labels& labels, double rate, std::uint64_t seed) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) throw DataError("embedding " + std::to_string(i) + " has no speaker label");
  }
  return sample_pairs(static_cast<Index>(labels.size()), rate, seed,
                      [&](Index i, Index j) { return labels[i] == labels[j]; });
}

MatrixXd to_constraint_matrix(const ConstraintSet& cs, Index n) {
  if (cs.min_size() > n) {
    throw InvalidArgument("constraint index " + std::to_string(cs.min_size() - 1) + " out of range for n=" +
                          std::to_string(n));
  }
  MatrixXd z = MatrixXd::Zero(n, n);
  for (const auto& [i, j] : cs.must()) z(i, j) = z(j, i) = 1.0;
  for (const auto& [i, j] : cs.cannot()) z(i, j) = z(j, i) = -1.0;
  return z;
}

ConstraintSet from_constraint_matrix(const MatrixXd& z) {
  ConstraintSet cs;
  for (Index i = 0; i < z.rows(); ++i) {
    for (Index j = i + 1; j < z.cols(); ++j) {
      if (z(i, j) > 0) cs.add_must(i, j);
      else if (z(i, j) < 0) cs.add_cannot(i, j);
    }
  }
  return cs;
}

}  // namespace jpcp
