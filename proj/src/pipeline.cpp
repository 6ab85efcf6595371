#include "jpcp/pipeline.hpp"

#include "jpcp/affinity.hpp"
#include "jpcp/rng.hpp"

namespace jpcp {

Variant parse_variant(std::string_view name) {
  if (name == "acoustic-only") return Variant::kAcousticOnly;
  if (name == "SSDR+SC") return Variant::kSsdrSc;
  if (name == "E2CP") return Variant::kE2cp;
  if (name == "E2CPM") return Variant::kE2cpm;
  if (name == "SSDR+E2CPM") return Variant::kSsdrE2cpm;
  throw InvalidArgument("unknown pipeline variant '" + std::string(name) +
                        "' (expected acoustic-only, SSDR+SC, E2CP, E2CPM or SSDR+E2CPM)");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::kAcousticOnly: return "acoustic-only";
    case Variant::kSsdrSc: return "SSDR+SC";
    case Variant::kE2cp: return "E2CP";
    case Variant::kE2cpm: return "E2CPM";
    case Variant::kSsdrE2cpm: return "SSDR+E2CPM";
  }
  return "?";
}

bool uses_ssdr(Variant v) { return v == Variant::kSsdrSc || v == Variant::kSsdrE2cpm; }
bool uses_propagation(Variant v) { return v == Variant::kE2cp || v == Variant::kE2cpm || v == Variant::kSsdrE2cpm; }

void PipelineConfig::validate() const {
  propagation.validate();
  clustering.validate();
  if (!(row_keep_fraction > 0.0 && row_keep_fraction <= 1.0)) throw InvalidArgument("row_keep_fraction must lie in (0, 1]");
  if (row_keep_min < 0) throw InvalidArgument("row_keep_min must be >= 0");
}

PipelineConfig PipelineConfig::seeded() const {
  PipelineConfig out = *this;
  out.propagation.seed = derive_seed(seed, {1});
  out.clustering.seed = derive_seed(seed, {2});
  return out;
}

DiarizationResult run_pipeline(const MatrixXd& embeddings, const ConstraintSet& cs, const PipelineConfig& cfg,
                               PipelineTrace* trace) {
  cfg.validate();
  const Index n = embeddings.rows();
  if (cs.min_size() > n) throw InvalidArgument("constraint set references embeddings beyond N");

  MatrixXd features = embeddings;
  if (uses_ssdr(cfg.variant) && n >= 2) {
    auto projected = ssdr_project(embeddings, cs, cfg.ssdr);
    features = std::move(projected.embeddings);
    if (trace) trace->projection = std::move(projected.projection);
  }

  const MatrixXd raw = cosine_affinity(features);
  const MatrixXd affinity = refine(raw, cfg.row_keep_fraction, cfg.row_keep_min);
  MatrixXd adjusted = affinity;
  if (uses_propagation(cfg.variant) && n >= 2) {
    MatrixXd z_hat = cfg.variant == Variant::kE2cp
                         ? e2cp(to_constraint_matrix(cs, n), affinity, cfg.propagation.lambda)
                         : e2cpm(cs, raw, affinity, cfg.propagation);
    adjusted = apply_constraints(affinity, z_hat);
    if (trace) trace->propagated = std::move(z_hat);
  }
  if (trace) {
    trace->affinity = affinity;
    trace->adjusted_affinity = adjusted;
  }
  return spectral_cluster(adjusted, cfg.clustering);
}

}  // namespace jpcp
