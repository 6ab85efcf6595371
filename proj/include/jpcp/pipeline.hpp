#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jpcp/clustering.hpp"
#include "jpcp/constraints.hpp"
#include "jpcp/propagation.hpp"
#include "jpcp/ssdr.hpp"
#include "jpcp/types.hpp"

namespace jpcp {

/// Back-end variants, from plain spectral clustering to constraints in both
/// the embedding normalization and the affinity.
enum class Variant { kAcousticOnly, kSsdrSc, kE2cp, kE2cpm, kSsdrE2cpm };

Variant parse_variant(std::string_view name);
std::string_view to_string(Variant v);
bool uses_ssdr(Variant v);
bool uses_propagation(Variant v);

struct PipelineConfig {
  Variant variant = Variant::kSsdrE2cpm;
  SsdrConfig ssdr;
  PropagationConfig propagation;
  ClusteringConfig clustering;
  double row_keep_fraction = kDefaultRowKeepFraction;
  /// Minimum number of neighbours per row that escape damping.
  Index row_keep_min = kDefaultRowKeepMin;
  /// Top-level seed; component seeds are derived from it by `seeded()`.
  std::uint64_t seed = 0;

  void validate() const;
  /// Copy with propagation and clustering seeds derived from `seed`.
  PipelineConfig seeded() const;
};

/// Intermediate matrices of one run, for debug dumps.
struct PipelineTrace {
  std::optional<MatrixXd> projection;
  MatrixXd affinity;
  std::optional<MatrixXd> propagated;
  MatrixXd adjusted_affinity;
};

/// cosine -> refine -> [propagate -> adjust] -> spectral clustering, with an
/// optional SSDR projection in front. `cfg` is used as given; call
/// `seeded()` first to derive component seeds from the top-level seed.
DiarizationResult run_pipeline(const MatrixXd& embeddings, const ConstraintSet& cs, const PipelineConfig& cfg,
                               PipelineTrace* trace = nullptr);

}  // namespace jpcp
