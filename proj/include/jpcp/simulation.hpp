#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jpcp/constraints.hpp"
#include "jpcp/metrics.hpp"
#include "jpcp/types.hpp"

namespace jpcp {

/// Synthetic multi-speaker session generator settings.
struct SimulationConfig {
  int num_speakers = 4;
  /// Per-speaker embedding counts are drawn uniformly from this range.
  int min_embeddings_per_speaker = 10;
  int max_embeddings_per_speaker = 30;
  Index dim = 64;
  /// Concentration: tangent-space noise has expected norm about 1/spread.
  double intra_speaker_spread = 2.0;
  /// Minimum pairwise angle between speaker centroids, degrees.
  double inter_speaker_separation = 25.0;
  /// Mean length of a same-speaker run.
  double turn_structure = 4.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SimulatedSession {
  EmbeddingSet embeddings;
  Labels labels;
  std::vector<SegmentAnnotation> annotations;
  MatrixXd centroids;

  /// Per-embedding speaker names "S<label>".
  std::vector<std::string> speaker_names() const;
  /// Ground-truth transcript.
  LabeledTranscript truth_transcript(const std::string& session_id) const;
};

/// Deterministic per seed. Embeddings are centroid plus isotropic tangent noise,
/// renormalized; each embedding covers 1-2 s of a contiguous timeline and
/// carries a few vocabulary tokens. Annotations split the timeline at run
/// boundaries: single runs become non-dialogue segments, groups of runs become
/// dialogue segments with their internal turn changes marked.
SimulatedSession generate_session(const SimulationConfig& cfg);

/// Lengths of maximal same-label runs.
std::vector<int> run_lengths(const Labels& labels);

}  // namespace jpcp
