#include "jpcp/config.hpp"

#include <set>
#include <type_traits>

#include <fmt/format.h>

namespace jpcp {

ConstraintSource parse_constraint_source(std::string_view name) {
  if (name == "auto") return ConstraintSource::kAuto;
  if (name == "none") return ConstraintSource::kNone;
  if (name == "file") return ConstraintSource::kFile;
  if (name == "annotations") return ConstraintSource::kAnnotations;
  if (name == "simulated") return ConstraintSource::kSimulated;
  throw InvalidArgument("unknown constraint source '" + std::string(name) +
                        "' (expected auto, none, file, annotations or simulated)");
}

std::string_view to_string(ConstraintSource source) {
  switch (source) {
    case ConstraintSource::kAuto: return "auto";
    case ConstraintSource::kNone: return "none";
    case ConstraintSource::kFile: return "file";
    case ConstraintSource::kAnnotations: return "annotations";
    case ConstraintSource::kSimulated: return "simulated";
  }
  return "?";
}

namespace {

// Reads typed fields out of one JSON object and rejects keys nobody asked for.
class Section {
 public:
  Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw DataError(name() + " must be a table/object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return obj_.contains(key);
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    if (!has(key)) return;
    out = convert<T>(obj_.at(key), key);
  }

  template <typename T>
  void get(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    if (obj_.at(key).is_null()) out.reset();
    else out = convert<T>(obj_.at(key), key);
  }

  Section sub(const std::string& key) {
    known_.insert(key);
    return Section(obj_.contains(key) ? obj_.at(key) : empty(), path_.empty() ? key : path_ + "." + key);
  }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!known_.count(key)) throw DataError(fmt::format("{}: unknown key '{}'", name(), key));
    }
  }

 private:
  static const json& empty() {
    static const json e = json::object();
    return e;
  }

  std::string name() const { return path_.empty() ? "config" : "config [" + path_ + "]"; }

  template <typename T>
  T convert(const json& v, const std::string& key) const {
    const std::string where = fmt::format("{}: '{}'", name(), key);
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw DataError(where + " must be a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw DataError(where + " must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) return v.get<T>();
        if (v.get<std::int64_t>() < 0) throw DataError(where + " must be non-negative");
      }
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw DataError(where + " must be a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw DataError(where + " must be a string");
      return v.get<std::string>();
    } else {
      if (!v.is_array()) throw DataError(where + " must be an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<typename T::value_type>(v[i], key));
      return out;
    }
  }

  const json& obj_;
  std::string path_;
  std::set<std::string> known_;
};

template <typename F>
auto checked(F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("config: ") + e.what());
  }
}

Variant variant_field(Section& s) {
  std::string name;
  s.get("variant", name);
  return name.empty() ? Variant::kSsdrE2cpm : checked([&] { return parse_variant(name); });
}

// Fields shared by diarize configs and the sweep's [pipeline] table.
void read_pipeline_body(Section& root, PipelineConfig& cfg) {
  root.get("row_keep_fraction", cfg.row_keep_fraction);
  root.get("row_keep_min", cfg.row_keep_min);

  Section ssdr = root.sub("ssdr");
  ssdr.get("alpha", cfg.ssdr.alpha);
  ssdr.get("beta", cfg.ssdr.beta);
  ssdr.get("out_dim", cfg.ssdr.out_dim);
  ssdr.finish();

  Section prop = root.sub("propagation");
  prop.get("lambda", cfg.propagation.lambda);
  prop.get("knn_k", cfg.propagation.knn_k);
  prop.get("theta_m", cfg.propagation.theta_m);
  prop.get("theta_c", cfg.propagation.theta_c);
  prop.get("augment_fraction", cfg.propagation.augment_fraction);
  prop.finish();

  Section clus = root.sub("clustering");
  clus.get("max_speakers", cfg.clustering.max_speakers);
  clus.get("fixed_k", cfg.clustering.fixed_k);
  clus.get("kmeans_restarts", cfg.clustering.kmeans_restarts);
  clus.finish();
}

void read_session_body(Section& s, SimulationConfig& cfg) {
  s.get("num_speakers", cfg.num_speakers);
  s.get("min_embeddings_per_speaker", cfg.min_embeddings_per_speaker);
  s.get("max_embeddings_per_speaker", cfg.max_embeddings_per_speaker);
  s.get("dim", cfg.dim);
  s.get("intra_speaker_spread", cfg.intra_speaker_spread);
  s.get("inter_speaker_separation", cfg.inter_speaker_separation);
  s.get("turn_structure", cfg.turn_structure);
  s.finish();
}

}  // namespace

DiarizeConfig diarize_config_from_json(const json& doc) {
  DiarizeConfig cfg;
  Section root(doc, "");
  root.get("seed", cfg.pipeline.seed);
  cfg.pipeline.variant = variant_field(root);
  read_pipeline_body(root, cfg.pipeline);

  Section cons = root.sub("constraints");
  std::string source = "auto";
  cons.get("source", source);
  cfg.constraints.source = checked([&] { return parse_constraint_source(source); });
  cons.get("rate", cfg.constraints.rate);
  cons.finish();
  if (!(cfg.constraints.rate >= 0.0 && cfg.constraints.rate <= 1.0)) {
    throw DataError("config [constraints]: rate must lie in [0, 1]");
  }

  Section out = root.sub("output");
  out.get("dump_matrices", cfg.dump_matrices);
  out.finish();
  root.finish();
  checked([&] {
    cfg.pipeline.validate();
    return 0;
  });
  return cfg;
}

SimulateConfig simulate_config_from_json(const json& doc) {
  SimulateConfig cfg;
  Section root(doc, "");
  root.get("seed", cfg.session.seed);
  root.get("session_id", cfg.session_id);
  std::string format = "binary";
  root.get("format", format);
  if (format == "binary") cfg.format = EmbeddingFormat::kBinary;
  else if (format == "csv") cfg.format = EmbeddingFormat::kCsv;
  else throw DataError("config: format must be \"binary\" or \"csv\"");

  Section session = root.sub("session");
  read_session_body(session, cfg.session);

  Section cons = root.sub("constraints");
  cons.get("rate", cfg.constraint_rate);
  cons.finish();
  root.finish();

  if (cfg.session_id.empty()) throw DataError("config: session_id must not be empty");
  if (cfg.constraint_rate && !(*cfg.constraint_rate >= 0.0 && *cfg.constraint_rate <= 1.0)) {
    throw DataError("config [constraints]: rate must lie in [0, 1]");
  }
  checked([&] {
    cfg.session.validate();
    return 0;
  });
  return cfg;
}

SweepSpec sweep_spec_from_json(const json& doc) {
  SweepSpec spec = hard_instance_spec();
  Section root(doc, "");
  root.get("seed", spec.seed);
  root.get("rates", spec.constraint_rates);
  root.get("trials", spec.trials_per_rate);
  std::vector<std::string> variants;
  root.get("variants", variants);
  if (root.has("variants")) {
    spec.variants.clear();
    for (const auto& v : variants) spec.variants.push_back(checked([&] { return parse_variant(v); }));
  }

  Section session = root.sub("session");
  read_session_body(session, spec.session);

  Section speakers = root.sub("speakers");
  speakers.get("min", spec.min_speakers);
  speakers.get("max", spec.max_speakers);
  speakers.finish();

  Section pipeline = root.sub("pipeline");
  read_pipeline_body(pipeline, spec.pipeline);
  pipeline.finish();
  root.finish();

  checked([&] {
    spec.validate();
    return 0;
  });
  return spec;
}

json to_json(const PipelineConfig& cfg) {
  json doc;
  doc["seed"] = cfg.seed;
  doc["variant"] = std::string(to_string(cfg.variant));
  doc["row_keep_fraction"] = cfg.row_keep_fraction;
  doc["row_keep_min"] = cfg.row_keep_min;
  doc["ssdr"] = {{"alpha", cfg.ssdr.alpha}, {"beta", cfg.ssdr.beta}, {"out_dim", cfg.ssdr.out_dim}};
  doc["propagation"] = {{"lambda", cfg.propagation.lambda},
                        {"knn_k", cfg.propagation.knn_k},
                        {"theta_m", cfg.propagation.theta_m},
                        {"theta_c", cfg.propagation.theta_c},
                        {"augment_fraction", cfg.propagation.augment_fraction}};
  doc["clustering"] = {{"max_speakers", cfg.clustering.max_speakers},
                       {"fixed_k", cfg.clustering.fixed_k ? json(*cfg.clustering.fixed_k) : json()},
                       {"kmeans_restarts", cfg.clustering.kmeans_restarts}};
  return doc;
}

json to_json(const SimulationConfig& cfg) {
  return {{"seed", cfg.seed},
          {"num_speakers", cfg.num_speakers},
          {"min_embeddings_per_speaker", cfg.min_embeddings_per_speaker},
          {"max_embeddings_per_speaker", cfg.max_embeddings_per_speaker},
          {"dim", cfg.dim},
          {"intra_speaker_spread", cfg.intra_speaker_spread},
          {"inter_speaker_separation", cfg.inter_speaker_separation},
          {"turn_structure", cfg.turn_structure}};
}

json to_json(const DiarizeConfig& cfg) {
  json doc = to_json(cfg.pipeline);
  doc["constraints"] = {{"source", std::string(to_string(cfg.constraints.source))}, {"rate", cfg.constraints.rate}};
  doc["output"] = {{"dump_matrices", cfg.dump_matrices}};
  return doc;
}

json to_json(const SweepSpec& spec) {
  json doc;
  doc["seed"] = spec.seed;
  doc["rates"] = spec.constraint_rates;
  doc["trials"] = spec.trials_per_rate;
  json variants = json::array();
  for (Variant v : spec.variants) variants.push_back(std::string(to_string(v)));
  doc["variants"] = std::move(variants);
  json session = to_json(spec.session);
  session.erase("seed");
  doc["session"] = std::move(session);
  doc["speakers"] = {{"min", spec.min_speakers}, {"max", spec.max_speakers}};
  json pipeline = to_json(spec.pipeline);
  pipeline.erase("seed");
  pipeline.erase("variant");
  doc["pipeline"] = std::move(pipeline);
  return doc;
}

}  // namespace jpcp
