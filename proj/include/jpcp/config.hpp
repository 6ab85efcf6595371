#pragma once

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "jpcp/io.hpp"
#include "jpcp/pipeline.hpp"
#include "jpcp/simulation.hpp"
#include "jpcp/sweep.hpp"

namespace jpcp {

/// Where `diarize` takes its constraints from.
enum class ConstraintSource {
  kAuto,         // constraint file if given, else annotations, else none
  kNone,
  kFile,
  kAnnotations,
  kSimulated,    // sampled from the ground-truth transcript at `rate`
};

ConstraintSource parse_constraint_source(std::string_view name);
std::string_view to_string(ConstraintSource source);

struct ConstraintOptions {
  ConstraintSource source = ConstraintSource::kAuto;
  double rate = 0.0;
};

struct DiarizeConfig {
  PipelineConfig pipeline;
  ConstraintOptions constraints;
  bool dump_matrices = false;
};

struct SimulateConfig {
  std::string session_id = "sim";
  SimulationConfig session;
  EmbeddingFormat format = EmbeddingFormat::kBinary;
  /// When set, a constraint file sampled at this rate is written too.
  std::optional<double> constraint_rate;
};

// Parsers reject unknown keys and wrong types with DataError, and run the
// corresponding validate().
DiarizeConfig diarize_config_from_json(const json& doc);
SimulateConfig simulate_config_from_json(const json& doc);
/// Starts from hard_instance_spec() and applies the overrides in `doc`.
SweepSpec sweep_spec_from_json(const json& doc);

json to_json(const PipelineConfig& cfg);
json to_json(const SimulationConfig& cfg);
json to_json(const DiarizeConfig& cfg);
json to_json(const SweepSpec& spec);

}  // namespace jpcp
