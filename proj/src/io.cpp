#include "jpcp/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "jpcp/log.hpp"

namespace jpcp {

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw DataError(fmt::format("write to '{}' failed", path.string()));
}

json read_json_file(const fs::path& path) {
  const std::string text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(fmt::format("{}: invalid JSON: {}", path.string(), e.what()));
  }
}

namespace {

json toml_to_json(const toml::node& node, const std::string& where) {
  if (auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [key, value] : *t) out[std::string(key.str())] = toml_to_json(value, where);
    return out;
  }
  if (auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& value : *a) out.push_back(toml_to_json(value, where));
    return out;
  }
  if (auto* v = node.as_string()) return v->get();
  if (auto* v = node.as_integer()) return v->get();
  if (auto* v = node.as_floating_point()) return v->get();
  if (auto* v = node.as_boolean()) return v->get();
  throw DataError(where + ": dates and times are not supported in config files");
}

}  // namespace

json read_config_file(const fs::path& path) {
  if (path.extension() != ".toml") return read_json_file(path);
  const std::string text = read_text_file(path);
  try {
    const toml::table table = toml::parse(text, path.string());
    return toml_to_json(table, path.string());
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw DataError(fmt::format("{}:{}:{}: invalid TOML: {}", path.string(), where.line, where.column,
                                e.description()));
  }
}

void write_json_file(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

// Embedding files -----------------------------------------------------------

namespace {

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffu));
}

MatrixXd parse_binary(const std::string& bytes, const fs::path& path) {
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 16) {
    throw DataError(fmt::format("{}: size mismatch: {} bytes is shorter than the 16-byte header", path.string(),
                                bytes.size()));
  }
  const std::uint32_t version = load_u32(p + 4);
  if (version != kEmbeddingVersion) {
    throw DataError(fmt::format("{}: unsupported version {} at offset 4", path.string(), version));
  }
  const std::uint64_t n = load_u32(p + 8);
  const std::uint64_t d = load_u32(p + 12);
  const std::uint64_t expected = 16 + 4 * n * d;
  if (bytes.size() != expected) {
    throw DataError(fmt::format("{}: size mismatch: header declares {}x{} float32 ({} bytes) but the file has {} bytes",
                                path.string(), n, d, expected, bytes.size()));
  }
  MatrixXd m(static_cast<Index>(n), static_cast<Index>(d));
  std::size_t offset = 16;
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = 0; j < d; ++j, offset += 4) {
      const float v = std::bit_cast<float>(load_u32(p + offset));
      if (!std::isfinite(v)) {
        throw DataError(fmt::format("{}: non-finite value at offset {} (row {}, column {})", path.string(), offset,
                                    i, j));
      }
      m(static_cast<Index>(i), static_cast<Index>(j)) = v;
    }
  }
  return m;
}

MatrixXd parse_csv(const std::string& text, const fs::path& path) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string_view line(text.data() + pos, eol - pos);
    const std::size_t line_offset = pos;
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<double> row;
    std::size_t col = 0;
    while (true) {
      std::size_t comma = line.find(',', col);
      if (comma == std::string_view::npos) comma = line.size();
      std::string_view field = line.substr(col, comma - col);
      while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
      while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) field.remove_suffix(1);
      float v = 0.0f;
      const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || end != field.data() + field.size()) {
        throw DataError(fmt::format("{}: line {}, offset {}: '{}' is not a number", path.string(), line_no,
                                    line_offset + col, field));
      }
      if (!std::isfinite(v)) {
        throw DataError(fmt::format("{}: line {}, offset {}: non-finite value", path.string(), line_no,
                                    line_offset + col));
      }
      row.push_back(v);
      if (comma == line.size()) break;
      col = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw DataError(fmt::format("{}: line {} has {} values, expected {}", path.string(), line_no, row.size(),
                                  rows.front().size()));
    }
    rows.push_back(std::move(row));
  }
  const Index n = static_cast<Index>(rows.size());
  const Index d = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  MatrixXd m(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

}  // namespace

MatrixXd read_embedding_file(const fs::path& path) {
  const std::string bytes = read_text_file(path);
  if (bytes.size() >= 4 && std::memcmp(bytes.data(), kEmbeddingMagic, 4) == 0) return parse_binary(bytes, path);
  if (path.extension() == ".bin") {
    throw DataError(fmt::format("{}: bad magic at offset 0 (expected \"JPCP\")", path.string()));
  }
  return parse_csv(bytes, path);
}

void write_embedding_file(const MatrixXd& vectors, const fs::path& path, EmbeddingFormat format) {
  std::string out;
  if (format == EmbeddingFormat::kBinary) {
    out.append(kEmbeddingMagic, 4);
    store_u32(out, kEmbeddingVersion);
    store_u32(out, static_cast<std::uint32_t>(vectors.rows()));
    store_u32(out, static_cast<std::uint32_t>(vectors.cols()));
    for (Index i = 0; i < vectors.rows(); ++i)
      for (Index j = 0; j < vectors.cols(); ++j) store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(vectors(i, j))));
  } else {
    for (Index i = 0; i < vectors.rows(); ++i) {
      for (Index j = 0; j < vectors.cols(); ++j) {
        if (j > 0) out.push_back(',');
        out += fmt::format("{:.9g}", static_cast<float>(vectors(i, j)));
      }
      out.push_back('\n');
    }
  }
  write_text_file(path, out);
}

// Manifest ------------------------------------------------------------------

namespace {

template <typename T>
T get_field(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw DataError(fmt::format("{}: missing field '{}'", where, key));
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(fmt::format("{}: field '{}' has the wrong type", where, key));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

SessionManifest manifest_from_json(const json& doc, const fs::path& base_dir) {
  const std::string where = "manifest";
  if (!doc.is_object()) throw DataError("manifest: expected an object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "session_id" && key != "embeddings" && key != "annotations" && key != "constraints" &&
        key != "transcript" && key != "tokenization") {
      throw DataError(fmt::format("manifest: unknown field '{}'", key));
    }
  }
  SessionManifest m;
  m.session_id = get_field<std::string>(doc, "session_id", where);
  const json emb = doc.contains("embeddings") ? doc.at("embeddings") : json();
  if (!emb.is_object()) throw DataError("manifest: 'embeddings' must be an object with path, dim and count");
  m.embeddings = resolve(base_dir, get_field<std::string>(emb, "path", "manifest.embeddings"));
  m.dim = get_field<Index>(emb, "dim", "manifest.embeddings");
  m.count = get_field<Index>(emb, "count", "manifest.embeddings");
  if (m.dim < 1 || m.count < 1) throw DataError("manifest.embeddings: dim and count must be positive");
  if (doc.contains("annotations")) m.annotations = resolve(base_dir, get_field<std::string>(doc, "annotations", where));
  if (doc.contains("constraints")) m.constraints = resolve(base_dir, get_field<std::string>(doc, "constraints", where));
  if (doc.contains("transcript")) m.transcript = resolve(base_dir, get_field<std::string>(doc, "transcript", where));
  if (doc.contains("tokenization")) {
    try {
      m.tokenization = parse_tokenization(get_field<std::string>(doc, "tokenization", where));
    } catch (const InvalidArgument& e) {
      throw DataError(std::string("manifest: ") + e.what());
    }
  }
  return m;
}

SessionManifest read_manifest(const fs::path& path) {
  return manifest_from_json(read_config_file(path), path.parent_path());
}

void write_manifest(const SessionManifest& m, const fs::path& path) {
  const fs::path base = path.parent_path();
  auto rel = [&](const fs::path& p) {
    const fs::path r = p.lexically_relative(base);
    return (r.empty() ? p : r).generic_string();
  };
  json doc;
  doc["session_id"] = m.session_id;
  doc["embeddings"] = {{"path", rel(m.embeddings)}, {"dim", m.dim}, {"count", m.count}};
  if (m.annotations) doc["annotations"] = rel(*m.annotations);
  if (m.constraints) doc["constraints"] = rel(*m.constraints);
  if (m.transcript) doc["transcript"] = rel(*m.transcript);
  doc["tokenization"] = std::string(to_string(m.tokenization));
  write_json_file(path, doc);
}

// Transcripts ---------------------------------------------------------------

std::vector<TranscriptEntry> read_transcript(const fs::path& path) {
  const json doc = read_json_file(path);
  if (!doc.is_array()) throw DataError(path.string() + ": transcript must be a JSON array");
  std::vector<TranscriptEntry> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = fmt::format("{}: entry {}", path.string(), i);
    const json& e = doc[i];
    if (!e.is_object()) throw DataError(where + ": expected an object");
    TranscriptEntry t;
    t.start = get_field<double>(e, "start", where);
    t.end = get_field<double>(e, "end", where);
    if (!(t.start < t.end)) throw DataError(where + ": start must be < end");
    if (e.contains("speaker")) t.speaker = get_field<std::string>(e, "speaker", where);
    if (e.contains("text")) t.text = get_field<std::string>(e, "text", where);
    out.push_back(std::move(t));
  }
  return out;
}

void write_transcript(const std::vector<TranscriptEntry>& entries, const fs::path& path) {
  json doc = json::array();
  for (const auto& e : entries) {
    json j;
    j["start"] = e.start;
    j["end"] = e.end;
    if (e.speaker) j["speaker"] = *e.speaker;
    if (e.text) j["text"] = *e.text;
    doc.push_back(std::move(j));
  }
  write_json_file(path, doc);
}

LabeledTranscript to_labeled(const std::vector<TranscriptEntry>& entries, const std::string& session_id,
                             Tokenization mode) {
  LabeledTranscript t;
  t.session_id = session_id;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].speaker) throw DataError(fmt::format("transcript entry {} has no speaker", i));
    t.speakers.push_back(*entries[i].speaker);
    t.words.push_back(entries[i].text ? tokenize(*entries[i].text, mode) : std::vector<std::string>{});
  }
  return t;
}

// Annotations and constraints -------------------------------------------------

json annotations_to_json(const std::vector<SegmentAnnotation>& annotations) {
  json doc = json::array();
  for (const auto& a : annotations) {
    json j;
    j["segment_id"] = a.segment_id;
    j["start_time"] = a.start_time;
    j["end_time"] = a.end_time;
    j["is_dialogue"] = a.is_dialogue;
    j["turn_change_points"] = a.turn_change_points;
    if (a.speaker_label) j["speaker_label"] = *a.speaker_label;
    doc.push_back(std::move(j));
  }
  return doc;
}

std::vector<SegmentAnnotation> annotations_from_json(const json& doc) {
  if (!doc.is_array()) throw DataError("annotations: expected a JSON array");
  std::vector<SegmentAnnotation> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = fmt::format("annotation {}", i);
    const json& e = doc[i];
    if (!e.is_object()) throw DataError(where + ": expected an object");
    SegmentAnnotation a;
    a.segment_id = get_field<std::int64_t>(e, "segment_id", where);
    a.start_time = get_field<double>(e, "start_time", where);
    a.end_time = get_field<double>(e, "end_time", where);
    a.is_dialogue = get_field<bool>(e, "is_dialogue", where);
    if (e.contains("turn_change_points")) a.turn_change_points = get_field<std::vector<double>>(e, "turn_change_points", where);
    if (e.contains("speaker_label") && !e.at("speaker_label").is_null()) {
      a.speaker_label = get_field<std::string>(e, "speaker_label", where);
    }
    a.validate();
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<SegmentAnnotation> read_annotations(const fs::path& path) {
  try {
    return annotations_from_json(read_json_file(path));
  } catch (const DataError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path.string(), 0) == 0) throw;
    throw DataError(path.string() + ": " + msg);
  }
}

void write_annotations(const std::vector<SegmentAnnotation>& annotations, const fs::path& path) {
  write_json_file(path, annotations_to_json(annotations));
}

ConstraintSet read_constraints(const fs::path& path, Index n) {
  const json doc = read_json_file(path);
  const std::string where = path.string();
  if (!doc.is_object()) throw DataError(where + ": expected an object with n, must and cannot");
  const Index file_n = get_field<Index>(doc, "n", where);
  if (n > 0 && file_n != n) {
    throw DataError(fmt::format("{}: constraint file is for n={} but the session has {} embeddings", where, file_n, n));
  }
  ConstraintSet cs;
  auto load = [&](const char* key, bool must) {
    if (!doc.contains(key)) return;
    const auto pairs = get_field<std::vector<std::vector<Index>>>(doc, key, where);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto& p = pairs[k];
      if (p.size() != 2 || p[0] < 0 || p[1] < 0 || p[0] >= file_n || p[1] >= file_n || p[0] == p[1]) {
        throw DataError(fmt::format("{}: {}[{}] is not a pair of distinct indices in [0, {})", where, key, k, file_n));
      }
      try {
        if (must) cs.add_must(p[0], p[1]);
        else cs.add_cannot(p[0], p[1]);
      } catch (const InvalidArgument& e) {
        throw DataError(fmt::format("{}: {}", where, e.what()));
      }
    }
  };
  load("must", true);
  load("cannot", false);
  return cs;
}

void write_constraints(const ConstraintSet& cs, Index n, const fs::path& path) {
  json doc;
  doc["n"] = n;
  json must = json::array();
  for (const auto& [i, j] : cs.must()) must.push_back({i, j});
  json cannot = json::array();
  for (const auto& [i, j] : cs.cannot()) cannot.push_back({i, j});
  doc["must"] = std::move(must);
  doc["cannot"] = std::move(cannot);
  write_text_file(path, doc.dump() + "\n");
}

// Sessions ------------------------------------------------------------------

Session load_session(const SessionManifest& manifest) {
  Session s;
  s.id = manifest.session_id;
  s.tokenization = manifest.tokenization;

  MatrixXd vectors = read_embedding_file(manifest.embeddings);
  if (vectors.rows() != manifest.count || vectors.cols() != manifest.dim) {
    throw DataError(fmt::format("{}: size mismatch: manifest declares {}x{} but the file holds {}x{}",
                                manifest.embeddings.string(), manifest.count, manifest.dim, vectors.rows(),
                                vectors.cols()));
  }
  const double worst = normalize_rows(vectors);
  if (worst > 1e-3) log().warn("{}: embedding norms deviate from 1 by up to {:.3g}; normalized", manifest.embeddings.string(), worst);

  if (manifest.transcript) {
    const auto entries = read_transcript(*manifest.transcript);
    if (static_cast<Index>(entries.size()) != manifest.count) {
      throw DataError(fmt::format("{}: {} entries for {} embeddings", manifest.transcript->string(), entries.size(),
                                  manifest.count));
    }
    s.embeddings.vectors = std::move(vectors);
    bool any_speaker = false, all_speaker = true, any_text = false;
    for (const auto& e : entries) {
      s.embeddings.start_times.push_back(e.start);
      s.embeddings.end_times.push_back(e.end);
      any_speaker |= e.speaker.has_value();
      all_speaker &= e.speaker.has_value();
      any_text |= e.text.has_value();
    }
    if (any_text) {
      for (const auto& e : entries) s.embeddings.words.push_back(e.text ? tokenize(*e.text, s.tokenization) : std::vector<std::string>{});
    }
    if (any_speaker && !all_speaker) {
      throw DataError(manifest.transcript->string() + ": either every entry or no entry must name a speaker");
    }
    if (all_speaker && !entries.empty()) s.truth = to_labeled(entries, s.id, s.tokenization);
  } else {
    log().warn("session {}: no transcript; using a unit timeline", s.id);
    s.embeddings = make_embedding_set(std::move(vectors));
  }
  s.embeddings.validate();

  if (manifest.annotations) s.annotations = read_annotations(*manifest.annotations);
  if (manifest.constraints) s.constraints = read_constraints(*manifest.constraints, manifest.count);
  return s;
}

// Outputs -------------------------------------------------------------------

std::string format_rttm(const Labels& labels, const EmbeddingSet& embeddings, const std::string& session_id) {
  if (static_cast<Index>(labels.size()) != embeddings.size()) {
    throw InvalidArgument("label count does not match the number of embeddings");
  }
  std::string out;
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i;
    while (j + 1 < labels.size() && labels[j + 1] == labels[i]) ++j;
    const double start = embeddings.start_times[i];
    const double end = embeddings.end_times[j];
    out += fmt::format("SPEAKER {} 1 {:.2f} {:.2f} <NA> <NA> spk{} <NA> <NA>\n", session_id, start, end - start,
                       labels[i]);
    i = j + 1;
  }
  return out;
}

void write_rttm(const DiarizationResult& result, const EmbeddingSet& embeddings, const std::string& session_id,
                const fs::path& path) {
  write_text_file(path, format_rttm(result.labels, embeddings, session_id));
}

json metrics_to_json(const MetricsReport& r) {
  json doc;
  doc["ari"] = r.ari;
  doc["nmi"] = r.nmi;
  doc["spk_diff"] = r.spk_diff;
  auto words = [](const WordErrors& w) {
    return json{{"rate", w.rate()}, {"errors", w.errors}, {"words", w.words}};
  };
  doc["cpwer"] = r.cpwer ? words(*r.cpwer) : json();
  doc["text_der"] = r.text_der ? words(*r.text_der) : json();
  return doc;
}

void write_matrix_csv(const MatrixXd& m, const fs::path& path) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out.push_back(',');
      out += fmt::format("{:.17g}", m(i, j));
    }
    out.push_back('\n');
  }
  write_text_file(path, out);
}

}  // namespace jpcp
