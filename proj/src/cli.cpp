#include "jpcp/cli.hpp"

#include <algorithm>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "jpcp/config.hpp"
#include "jpcp/constraints.hpp"
#include "jpcp/io.hpp"
#include "jpcp/log.hpp"
#include "jpcp/metrics.hpp"
#include "jpcp/pipeline.hpp"
#include "jpcp/rng.hpp"
#include "jpcp/simulation.hpp"
#include "jpcp/sweep.hpp"

namespace jpcp {

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError(fmt::format("cannot create output directory '{}'", dir.string()));
}

std::string join_words(const std::vector<std::string>& words, Tokenization mode) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0 && mode == Tokenization::kWhitespace) out.push_back(' ');
    out += words[i];
  }
  return out;
}

ConstraintSet select_constraints(const Session& session, const DiarizeConfig& cfg, std::string& used,
                                 std::vector<IndexPair>& conflicts) {
  ConstraintSource source = cfg.constraints.source;
  if (source == ConstraintSource::kAuto) {
    source = session.constraints ? ConstraintSource::kFile
             : session.annotations ? ConstraintSource::kAnnotations
                                   : ConstraintSource::kNone;
  }
  used = std::string(to_string(source));
  switch (source) {
    case ConstraintSource::kFile:
      if (!session.constraints) throw DataError("constraint source 'file' but the manifest names no constraint file");
      return *session.constraints;
    case ConstraintSource::kAnnotations:
      if (!session.annotations) throw DataError("constraint source 'annotations' but the manifest names no annotation file");
      return build_constraints(*session.annotations, session.embeddings, &conflicts);
    case ConstraintSource::kSimulated:
      if (!session.truth) throw DataError("constraint source 'simulated' needs a transcript with speakers");
      if (session.embeddings.size() < 2) return {};
      return simulate_constraints(session.truth->speakers, cfg.constraints.rate, derive_seed(cfg.pipeline.seed, {3}));
    default:
      return {};
  }
}

int cmd_diarize(const fs::path& manifest_path, const fs::path& config_path, const fs::path& out_dir, bool dump,
                std::ostream& out) {
  const SessionManifest manifest = read_manifest(manifest_path);
  const DiarizeConfig cfg = diarize_config_from_json(read_config_file(config_path));
  const Session session = load_session(manifest);
  ensure_dir(out_dir);

  std::string used;
  std::vector<IndexPair> conflicts;
  const ConstraintSet cs = select_constraints(session, cfg, used, conflicts);

  PipelineTrace trace;
  const PipelineConfig pipeline = cfg.pipeline.seeded();
  const DiarizationResult result = run_pipeline(session.embeddings.vectors, cs, pipeline, &trace);

  write_rttm(result, session.embeddings, session.id, out_dir / (session.id + ".rttm"));
  write_json_file(out_dir / "labels.json", {{"session_id", session.id}, {"k", result.k}, {"labels", result.labels}});

  std::vector<TranscriptEntry> pred;
  for (Index i = 0; i < session.embeddings.size(); ++i) {
    TranscriptEntry e;
    e.start = session.embeddings.start_times[i];
    e.end = session.embeddings.end_times[i];
    e.speaker = "spk" + std::to_string(result.labels[i]);
    if (session.embeddings.has_words()) e.text = join_words(session.embeddings.words[i], session.tokenization);
    pred.push_back(std::move(e));
  }
  write_transcript(pred, out_dir / "pred_transcript.json");

  json meta;
  meta["session_id"] = session.id;
  meta["n"] = session.embeddings.size();
  meta["dim"] = session.embeddings.dim();
  meta["config"] = to_json(cfg);
  json conflict_list = json::array();
  for (const auto& [i, j] : conflicts) conflict_list.push_back({i, j});
  meta["constraints"] = {{"source", used},
                         {"must", cs.must().size()},
                         {"cannot", cs.cannot().size()},
                         {"conflicts", std::move(conflict_list)}};
  meta["ssdr_out_dim"] = trace.projection ? json(trace.projection->cols()) : json();
  meta["knn_k"] = session.embeddings.size() >= 2 ? json(cfg.pipeline.propagation.knn_for(session.embeddings.size())) : json();
  meta["estimated_k"] = result.k;

  out << fmt::format("session {}: {} embeddings, {} must-links, {} cannot-links ({}), k={}\n", session.id,
                     session.embeddings.size(), cs.must().size(), cs.cannot().size(), used, result.k);
  if (session.truth) {
    LabeledTranscript pred_t = *session.truth;
    for (std::size_t i = 0; i < pred_t.speakers.size(); ++i) pred_t.speakers[i] = *pred[i].speaker;
    const MetricsReport report = evaluate(pred_t, *session.truth);
    write_json_file(out_dir / "metrics.json", metrics_to_json(report));
    const std::string table = format_table({{std::string(to_string(cfg.pipeline.variant)), report}});
    write_text_file(out_dir / "metrics.txt", table);
    meta["metrics"] = metrics_to_json(report);
    out << table;
  }
  write_json_file(out_dir / "metadata.json", meta);

  if (dump || cfg.dump_matrices) {
    write_matrix_csv(trace.affinity, out_dir / "affinity.csv");
    write_matrix_csv(trace.adjusted_affinity, out_dir / "adjusted_affinity.csv");
    if (trace.propagated) write_matrix_csv(*trace.propagated, out_dir / "propagated.csv");
    if (trace.projection) write_matrix_csv(*trace.projection, out_dir / "projection.csv");
  }
  return kExitOk;
}

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir, std::ostream& out) {
  const SimulateConfig cfg = simulate_config_from_json(read_config_file(config_path));
  const SimulatedSession sim = generate_session(cfg.session);
  ensure_dir(out_dir);

  SessionManifest manifest;
  manifest.session_id = cfg.session_id;
  manifest.embeddings = out_dir / (cfg.format == EmbeddingFormat::kBinary ? "embeddings.bin" : "embeddings.csv");
  manifest.dim = sim.embeddings.dim();
  manifest.count = sim.embeddings.size();
  manifest.annotations = out_dir / "annotations.json";
  manifest.transcript = out_dir / "transcript.json";

  write_embedding_file(sim.embeddings.vectors, manifest.embeddings, cfg.format);
  write_annotations(sim.annotations, *manifest.annotations);
  const auto names = sim.speaker_names();
  std::vector<TranscriptEntry> entries;
  for (Index i = 0; i < sim.embeddings.size(); ++i) {
    TranscriptEntry e;
    e.start = sim.embeddings.start_times[i];
    e.end = sim.embeddings.end_times[i];
    e.speaker = names[static_cast<std::size_t>(i)];
    e.text = join_words(sim.embeddings.words[i], Tokenization::kWhitespace);
    entries.push_back(std::move(e));
  }
  write_transcript(entries, *manifest.transcript);

  json meta;
  meta["session_id"] = cfg.session_id;
  meta["simulation"] = to_json(cfg.session);
  meta["format"] = cfg.format == EmbeddingFormat::kBinary ? "binary" : "csv";
  if (cfg.constraint_rate) {
    manifest.constraints = out_dir / "constraints.json";
    const std::uint64_t seed = derive_seed(cfg.session.seed, {3});
    const ConstraintSet cs = sim.embeddings.size() >= 2 ? simulate_constraints(sim.labels, *cfg.constraint_rate, seed)
                                                         : ConstraintSet{};
    write_constraints(cs, sim.embeddings.size(), *manifest.constraints);
    meta["constraint_rate"] = *cfg.constraint_rate;
  }
  write_manifest(manifest, out_dir / "manifest.json");
  write_json_file(out_dir / "metadata.json", meta);
  out << fmt::format("simulated {} embeddings from {} speakers into {}\n", sim.embeddings.size(),
                     cfg.session.num_speakers, (out_dir / "manifest.json").string());
  return kExitOk;
}

int cmd_sweep(const fs::path& spec_path, const fs::path& out_dir, std::ostream& out) {
  const SweepSpec spec = sweep_spec_from_json(read_config_file(spec_path));
  const SweepReport report = run_sweep(spec);
  ensure_dir(out_dir);
  write_text_file(out_dir / "sweep.csv", report.rows_csv());
  write_text_file(out_dir / "summary.csv", report.summary_csv());
  write_json_file(out_dir / "metadata.json", {{"spec", to_json(spec)}});

  out << fmt::format("{:<14} {:>6} {:>8} {:>8} {:>8}\n", "variant", "rate", "ARI", "NMI", "SpkDiff");
  for (const auto& s : report.summary()) {
    out << fmt::format("{:<14} {:>6.3f} {:>8.4f} {:>8.4f} {:>8}\n", to_string(s.variant), s.rate, s.ari_mean, s.nmi_mean,
                       s.spk_diff_total);
  }
  return kExitOk;
}

int cmd_eval(const fs::path& pred_path, const fs::path& truth_path, const std::string& tokenization,
             const std::optional<fs::path>& out_path, std::ostream& out) {
  Tokenization mode;
  try {
    mode = parse_tokenization(tokenization);
  } catch (const InvalidArgument& e) {
    throw CLI::ValidationError("--tokenization", e.what());
  }
  const auto pred_entries = read_transcript(pred_path);
  const auto truth_entries = read_transcript(truth_path);
  if (pred_entries.size() != truth_entries.size()) {
    throw DataError(fmt::format("prediction has {} entries but the truth has {}", pred_entries.size(),
                                truth_entries.size()));
  }
  const std::string id = truth_path.stem().string();
  const LabeledTranscript pred = to_labeled(pred_entries, id, mode);
  const LabeledTranscript truth = to_labeled(truth_entries, id, mode);
  const MetricsReport report = evaluate(pred, truth);
  if (out_path) write_json_file(*out_path, metrics_to_json(report));
  out << format_table({{id, report}});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained spectral clustering back-end for speaker diarization", "jpcp"};
  app.require_subcommand(1);

  fs::path manifest, config, out_dir, spec, pred, truth;
  bool dump = false;
  std::string tokenization = "whitespace";
  std::optional<fs::path> eval_out;

  auto* diarize = app.add_subcommand("diarize", "Cluster one session and write RTTM, labels and metrics");
  diarize->add_option("--manifest", manifest, "Session manifest (JSON or TOML)")->required()->check(CLI::ExistingFile);
  diarize->add_option("--config", config, "Pipeline config (TOML or JSON)")->required()->check(CLI::ExistingFile);
  diarize->add_option("--out", out_dir, "Output directory")->required();
  diarize->add_flag("--dump-matrices", dump, "Write intermediate matrices as CSV");

  auto* simulate = app.add_subcommand("simulate", "Write a synthetic session in manifest format");
  simulate->add_option("--config", config, "Simulation config (TOML or JSON)")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "Constraint-rate sweep over synthetic sessions");
  sweep->add_option("--spec", spec, "Sweep spec (TOML or JSON)")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out_dir, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Score a predicted transcript against the truth");
  eval->add_option("--pred", pred, "Predicted transcript JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth, "Reference transcript JSON")->required()->check(CLI::ExistingFile);
  eval->add_option("--tokenization", tokenization, "whitespace or per-character");
  eval->add_option("--out", eval_out, "Write the metrics report as JSON");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
    if (*diarize) return cmd_diarize(manifest, config, out_dir, dump, out);
    if (*simulate) return cmd_simulate(config, out_dir, out);
    if (*sweep) return cmd_sweep(spec, out_dir, out);
    return cmd_eval(pred, truth, tokenization, eval_out, out);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace jpcp
