#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "jpcp/clustering.hpp"
#include "jpcp/constraints.hpp"
#include "jpcp/metrics.hpp"
#include "jpcp/types.hpp"

namespace jpcp {

namespace fs = std::filesystem;
using json = nlohmann::json;

enum class EmbeddingFormat { kBinary, kCsv };

/// Binary layout: "JPCP", u32 version (1), u32 N, u32 D, then N*D float32,
/// all little-endian, row-major.
inline constexpr char kEmbeddingMagic[4] = {'J', 'P', 'C', 'P'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;

/// Reads a binary file (detected by its magic) or a comma-separated text file
/// with one embedding per line. Values are returned as stored, rounded to
/// float32; errors name the file and the byte offset or line.
MatrixXd read_embedding_file(const fs::path& path);
/// CSV values are written with 9 significant digits, which round-trips float32.
void write_embedding_file(const MatrixXd& vectors, const fs::path& path, EmbeddingFormat format);

struct SessionManifest {
  std::string session_id;
  fs::path embeddings;
  Index dim = 0;
  Index count = 0;
  std::optional<fs::path> annotations;
  std::optional<fs::path> constraints;
  std::optional<fs::path> transcript;
  Tokenization tokenization = Tokenization::kWhitespace;
};

/// JSON or TOML (by extension). Relative paths resolve against the manifest's
/// directory.
SessionManifest read_manifest(const fs::path& path);
SessionManifest manifest_from_json(const json& doc, const fs::path& base_dir);
/// Writes JSON with paths relative to the manifest's directory when possible.
void write_manifest(const SessionManifest& manifest, const fs::path& path);

/// One transcript line per embedding.
struct TranscriptEntry {
  double start = 0.0;
  double end = 0.0;
  std::optional<std::string> speaker;
  std::optional<std::string> text;
};

std::vector<TranscriptEntry> read_transcript(const fs::path& path);
void write_transcript(const std::vector<TranscriptEntry>& entries, const fs::path& path);
/// Speaker-labeled transcript; throws DataError if any entry lacks a speaker.
LabeledTranscript to_labeled(const std::vector<TranscriptEntry>& entries, const std::string& session_id,
                             Tokenization mode);

std::vector<SegmentAnnotation> read_annotations(const fs::path& path);
void write_annotations(const std::vector<SegmentAnnotation>& annotations, const fs::path& path);
json annotations_to_json(const std::vector<SegmentAnnotation>& annotations);
std::vector<SegmentAnnotation> annotations_from_json(const json& doc);

/// {"n": N, "must": [[i, j], ...], "cannot": [[i, j], ...]}. `n`, when
/// positive, must match the file.
ConstraintSet read_constraints(const fs::path& path, Index n = 0);
void write_constraints(const ConstraintSet& cs, Index n, const fs::path& path);

struct Session {
  std::string id;
  EmbeddingSet embeddings;
  std::optional<std::vector<SegmentAnnotation>> annotations;
  std::optional<ConstraintSet> constraints;
  std::optional<LabeledTranscript> truth;
  Tokenization tokenization = Tokenization::kWhitespace;
};

/// Loads embeddings (checked against the declared count and dim, then
/// unit-normalized) and the optional files named in the manifest.
Session load_session(const SessionManifest& manifest);

/// One SPEAKER line per maximal run of equal labels, times with 2 decimals.
std::string format_rttm(const Labels& labels, const EmbeddingSet& embeddings, const std::string& session_id);
void write_rttm(const DiarizationResult& result, const EmbeddingSet& embeddings, const std::string& session_id,
                const fs::path& path);

json metrics_to_json(const MetricsReport& report);

void write_matrix_csv(const MatrixXd& m, const fs::path& path);

std::string read_text_file(const fs::path& path);
void write_text_file(const fs::path& path, const std::string& text);
/// Parses JSON, throwing DataError with the file name on syntax errors.
json read_json_file(const fs::path& path);
/// TOML for a `.toml` extension, JSON otherwise; TOML tables map onto JSON
/// objects.
json read_config_file(const fs::path& path);
/// Pretty-printed with a trailing newline.
void write_json_file(const fs::path& path, const json& doc);

}  // namespace jpcp
