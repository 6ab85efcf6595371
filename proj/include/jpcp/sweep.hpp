#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jpcp/pipeline.hpp"
#include "jpcp/simulation.hpp"

namespace jpcp {

/// Constraint-rate sweep over synthetic sessions.
struct SweepSpec {
  std::vector<double> constraint_rates{0.0, 0.01, 0.03, 0.06, 0.12};
  int trials_per_rate = 20;
  std::vector<Variant> variants{Variant::kSsdrE2cpm};
  SimulationConfig session;
  /// When both are > 0, each trial draws its speaker count from this range
  /// instead of using session.num_speakers.
  int min_speakers = 0;
  int max_speakers = 0;
  PipelineConfig pipeline;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Default "hard" synthetic instance: 8 speakers, dim 64, 25 degree minimum
/// centroid separation, noise set so plain spectral clustering lands well
/// below perfect.
SweepSpec hard_instance_spec();

struct SweepRow {
  double rate = 0.0;
  int trial = 0;
  Variant variant = Variant::kAcousticOnly;
  double ari = 0.0;
  double nmi = 0.0;
  int spk_diff = 0;
  double text_der = 0.0;
};

struct SweepSummaryRow {
  double rate = 0.0;
  Variant variant = Variant::kAcousticOnly;
  int trials = 0;
  double ari_mean = 0.0, ari_std = 0.0;
  double nmi_mean = 0.0, nmi_std = 0.0;
  double spk_diff_mean = 0.0, spk_diff_std = 0.0;
  int spk_diff_total = 0;
  double text_der_mean = 0.0, text_der_std = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;

  std::vector<SweepSummaryRow> summary() const;
  const SweepSummaryRow& summary_for(double rate, Variant variant) const;
  /// Header `rate,trial,variant,ari,nmi,spk_diff,text_der`.
  std::string rows_csv() const;
  std::string summary_csv() const;

 private:
  mutable std::vector<SweepSummaryRow> summary_cache_;
};

/// Every trial generates one session and one seeded constraint permutation;
/// each rate takes a prefix of that permutation, so rates are compared on the
/// same sessions. Trial seeds depend only on (seed, trial index).
SweepReport run_sweep(const SweepSpec& spec);

}  // namespace jpcp
