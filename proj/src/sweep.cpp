#include "jpcp/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "jpcp/metrics.hpp"
#include "jpcp/rng.hpp"

namespace jpcp {

void SweepSpec::validate() const {
  if (constraint_rates.empty()) throw InvalidArgument("sweep needs at least one constraint rate");
  for (std::size_t i = 0; i < constraint_rates.size(); ++i) {
    const double r = constraint_rates[i];
    if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("constraint rates must lie in [0, 1]");
    if (i > 0 && !(r > constraint_rates[i - 1])) throw InvalidArgument("constraint rates must be sorted ascending");
  }
  if (trials_per_rate < 1) throw InvalidArgument("trials_per_rate must be >= 1");
  if (variants.empty()) throw InvalidArgument("sweep needs at least one pipeline variant");
  if ((min_speakers > 0) != (max_speakers > 0) || min_speakers > max_speakers) {
    throw InvalidArgument("speaker range must satisfy 1 <= min_speakers <= max_speakers");
  }
  session.validate();
  pipeline.validate();
}

SweepSpec hard_instance_spec() {
  SweepSpec spec;
  spec.session.num_speakers = 8;
  spec.session.dim = 64;
  spec.session.inter_speaker_separation = 25.0;
  spec.session.intra_speaker_spread = 0.58;
  spec.session.min_embeddings_per_speaker = 10;
  spec.session.max_embeddings_per_speaker = 30;
  spec.session.turn_structure = 4.0;
  return spec;
}

SweepReport run_sweep(const SweepSpec& spec) {
  spec.validate();
  SweepReport report;
  const std::size_t n_rates = spec.constraint_rates.size();
  std::vector<std::vector<SweepRow>> by_rate(n_rates);

  for (int trial = 0; trial < spec.trials_per_rate; ++trial) {
    const auto t = static_cast<std::uint64_t>(trial);
    SimulationConfig sim = spec.session;
    sim.seed = derive_seed(spec.seed, {t, 0});
    if (spec.min_speakers > 0) {
      Rng rng(derive_seed(spec.seed, {t, 3}));
      sim.num_speakers = spec.min_speakers +
                         static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(spec.max_speakers - spec.min_speakers + 1)));
    }
    const SimulatedSession session = generate_session(sim);
    const LabeledTranscript truth = session.truth_transcript("trial" + std::to_string(trial));
    const Index n = session.embeddings.size();

    PipelineConfig pipeline = spec.pipeline;
    pipeline.seed = derive_seed(spec.seed, {t, 2});
    pipeline = pipeline.seeded();
    const std::uint64_t constraint_seed = derive_seed(spec.seed, {t, 1});

    for (std::size_t r = 0; r < n_rates; ++r) {
      const double rate = spec.constraint_rates[r];
      const ConstraintSet cs = n >= 2 ? simulate_constraints(session.labels, rate, constraint_seed) : ConstraintSet{};
      for (Variant v : spec.variants) {
        PipelineConfig cfg = pipeline;
        cfg.variant = v;
        const DiarizationResult result = run_pipeline(session.embeddings.vectors, cs, cfg);

        LabeledTranscript pred = truth;
        for (std::size_t i = 0; i < pred.speakers.size(); ++i) pred.speakers[i] = "spk" + std::to_string(result.labels[i]);
        const MetricsReport m = evaluate(pred, truth);

        SweepRow row;
        row.rate = rate;
        row.trial = trial;
        row.variant = v;
        row.ari = m.ari;
        row.nmi = m.nmi;
        row.spk_diff = m.spk_diff;
        row.text_der = m.text_der ? m.text_der->rate() : 0.0;
        by_rate[r].push_back(row);
      }
    }
  }
  for (auto& rows : by_rate) report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  return report;
}

namespace {

void mean_std(const std::vector<double>& xs, double& mean, double& sd) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
}

}  // namespace

std::vector<SweepSummaryRow> SweepReport::summary() const {
  std::vector<SweepSummaryRow> out;
  std::vector<std::pair<double, Variant>> keys;
  for (const auto& row : rows) {
    const std::pair<double, Variant> key{row.rate, row.variant};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  for (const auto& [rate, variant] : keys) {
    std::vector<double> ari, nmi, spk, der;
    for (const auto& row : rows) {
      if (row.rate != rate || row.variant != variant) continue;
      ari.push_back(row.ari);
      nmi.push_back(row.nmi);
      spk.push_back(row.spk_diff);
      der.push_back(row.text_der);
    }
    SweepSummaryRow s;
    s.rate = rate;
    s.variant = variant;
    s.trials = static_cast<int>(ari.size());
    mean_std(ari, s.ari_mean, s.ari_std);
    mean_std(nmi, s.nmi_mean, s.nmi_std);
    mean_std(spk, s.spk_diff_mean, s.spk_diff_std);
    mean_std(der, s.text_der_mean, s.text_der_std);
    for (double x : spk) s.spk_diff_total += static_cast<int>(x);
    out.push_back(s);
  }
  return out;
}

const SweepSummaryRow& SweepReport::summary_for(double rate, Variant variant) const {
  if (summary_cache_.empty()) summary_cache_ = summary();
  for (const auto& s : summary_cache_)
    if (s.rate == rate && s.variant == variant) return s;
  throw InvalidArgument(fmt::format("no sweep rows for rate {} and variant {}", rate, to_string(variant)));
}

std::string SweepReport::rows_csv() const {
  std::string out = "rate,trial,variant,ari,nmi,spk_diff,text_der\n";
  for (const auto& r : rows) {
    out += fmt::format("{:.4f},{},{},{:.8f},{:.8f},{},{:.8f}\n", r.rate, r.trial, to_string(r.variant), r.ari, r.nmi,
                       r.spk_diff, r.text_der);
  }
  return out;
}

std::string SweepReport::summary_csv() const {
  std::string out =
      "rate,variant,trials,ari_mean,ari_std,nmi_mean,nmi_std,spk_diff_mean,spk_diff_std,spk_diff_total,"
      "text_der_mean,text_der_std\n";
  for (const auto& s : summary()) {
    out += fmt::format("{:.4f},{},{},{:.8f},{:.8f},{:.8f},{:.8f},{:.8f},{:.8f},{},{:.8f},{:.8f}\n", s.rate,
                       to_string(s.variant), s.trials, s.ari_mean, s.ari_std, s.nmi_mean, s.nmi_std, s.spk_diff_mean,
                       s.spk_diff_std, s.spk_diff_total, s.text_der_mean, s.text_der_std);
  }
  return out;
}

}  // namespace jpcp
