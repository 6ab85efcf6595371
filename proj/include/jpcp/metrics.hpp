#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jpcp/types.hpp"

namespace jpcp {

enum class Tokenization { kWhitespace, kPerCharacter };

Tokenization parse_tokenization(std::string_view name);
std::string_view to_string(Tokenization mode);

/// Whitespace split, or one token per non-space UTF-8 code point.
std::vector<std::string> tokenize(std::string_view text, Tokenization mode);

/// Speaker-attributed words, one entry per embedding in time order.
struct LabeledTranscript {
  std::string session_id;
  std::vector<std::string> speakers;
  std::vector<std::vector<std::string>> words;

  std::size_t word_count() const;
  void validate() const;
};

/// Maps string labels to dense ints in order of first appearance.
Labels encode_labels(const std::vector<std::string>& labels);

/// Pair-counting confusion over unordered pairs: same cluster in both (tp),
/// same only in pred (fp), same only in truth (fn), different in both (tn).
struct PairCounts {
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

PairCounts pair_counts(const Labels& pred, const Labels& truth);
double adjusted_rand_index(const PairCounts& counts);
double adjusted_rand_index(const Labels& pred, const Labels& truth);

/// Mutual information over the geometric mean of the entropies (natural log).
/// Two single-cluster partitions score 1.
double normalized_mutual_information(const Labels& pred, const Labels& truth);

inline int speaker_count_diff(int pred_k, int true_k) { return pred_k > true_k ? pred_k - true_k : true_k - pred_k; }

/// How the speaker mapping of cpWER / TextDER is searched.
enum class MappingSearch { kAuto, kExhaustive, kHungarian };

/// Speakers beyond which kAuto switches from exhaustive search to Hungarian.
inline constexpr std::size_t kExhaustiveSpeakerLimit = 8;

/// Minimum-cost assignment of rows to columns of a square cost matrix.
/// Returns the column for each row.
std::vector<int> hungarian_assignment(const MatrixXd& cost);
std::vector<int> exhaustive_assignment(const MatrixXd& cost);

/// Word-level Levenshtein distance.
std::size_t edit_distance(const std::vector<std::string>& ref, const std::vector<std::string>& hyp);

struct WordErrors {
  std::size_t errors = 0;
  std::size_t words = 0;
  double rate() const { return words == 0 ? 0.0 : static_cast<double>(errors) / static_cast<double>(words); }
};

/// Concatenated minimum-permutation WER.
WordErrors cpwer_counts(const LabeledTranscript& pred, const LabeledTranscript& truth,
                        MappingSearch search = MappingSearch::kAuto);
double cpwer(const LabeledTranscript& pred, const LabeledTranscript& truth,
             MappingSearch search = MappingSearch::kAuto);

/// Fraction of words attributed to the wrong speaker under the best speaker
/// mapping. Both transcripts must carry the same word sequence.
WordErrors text_der_counts(const LabeledTranscript& pred, const LabeledTranscript& truth,
                           MappingSearch search = MappingSearch::kAuto);
double text_der(const LabeledTranscript& pred, const LabeledTranscript& truth,
                MappingSearch search = MappingSearch::kAuto);

struct MetricsReport {
  double ari = 0.0;
  double nmi = 0.0;
  int spk_diff = 0;
  std::optional<WordErrors> cpwer;
  std::optional<WordErrors> text_der;
};

/// Scores predicted labels against ground truth; word metrics are filled in
/// when the transcripts carry words.
MetricsReport evaluate(const LabeledTranscript& pred, const LabeledTranscript& truth);

/// Corpus-level report: mean ARI/NMI, summed SpkDiff, word metrics pooled
/// over sessions.
MetricsReport aggregate(const std::vector<MetricsReport>& sessions);

/// Aligned text table with one row per named report.
std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

}  // namespace jpcp
