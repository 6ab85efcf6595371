#include "jpcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace jpcp {

Tokenization parse_tokenization(std::string_view name) {
  if (name == "whitespace") return Tokenization::kWhitespace;
  if (name == "per-character" || name == "char") return Tokenization::kPerCharacter;
  throw InvalidArgument("unknown tokenization mode '" + std::string(name) + "'");
}

std::string_view to_string(Tokenization mode) {
  return mode == Tokenization::kWhitespace ? "whitespace" : "per-character";
}

std::vector<std::string> tokenize(std::string_view text, Tokenization mode) {
  std::vector<std::string> out;
  auto is_space = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  if (mode == Tokenization::kWhitespace) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
      const std::size_t begin = i;
      while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
      if (i > begin) out.emplace_back(text.substr(begin, i - begin));
    }
    return out;
  }
  for (std::size_t i = 0; i < text.size();) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    if (lead >= 0xF0) len = 4;
    else if (lead >= 0xE0) len = 3;
    else if (lead >= 0xC0) len = 2;
    len = std::min(len, text.size() - i);
    if (!(len == 1 && is_space(lead))) out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t LabeledTranscript::word_count() const {
  std::size_t n = 0;
  for (const auto& w : words) n += w.size();
  return n;
}

void LabeledTranscript::validate() const {
  if (!words.empty() && words.size() != speakers.size()) {
    throw DataError("transcript " + session_id + ": speaker and word lists differ in length");
  }
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    if (speakers[i].empty()) throw DataError("transcript " + session_id + ": entry " + std::to_string(i) + " has no speaker");
  }
}

Labels encode_labels(const std::vector<std::string>& labels) {
  std::map<std::string, int> ids;
  Labels out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
  return out;
}

namespace {

void check_lengths(const Labels& pred, const Labels& truth) {
  if (pred.size() != truth.size()) {
    throw InvalidArgument("label sequences differ in length (" + std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
  }
}

std::uint64_t choose2(std::uint64_t n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace

PairCounts pair_counts(const Labels& pred, const Labels& truth) {
  check_lengths(pred, truth);
  std::map<std::pair<int, int>, std::uint64_t> joint;
  std::map<int, std::uint64_t> rows;
  std::map<int, std::uint64_t> cols;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    ++joint[{pred[i], truth[i]}];
    ++rows[pred[i]];
    ++cols[truth[i]];
  }
  std::uint64_t same_both = 0, same_pred = 0, same_truth = 0;
  for (const auto& [_, c] : joint) same_both += choose2(c);
  for (const auto& [_, c] : rows) same_pred += choose2(c);
  for (const auto& [_, c] : cols) same_truth += choose2(c);

  PairCounts pc;
  pc.tp = same_both;
  pc.fp = same_pred - same_both;
  pc.fn = same_truth - same_both;
  pc.tn = choose2(pred.size()) - pc.tp - pc.fp - pc.fn;
  return pc;
}

double adjusted_rand_index(const PairCounts& c) {
  if (c.fn == 0 && c.fp == 0) return 1.0;
  const double tp = static_cast<double>(c.tp), fp = static_cast<double>(c.fp);
  const double fn = static_cast<double>(c.fn), tn = static_cast<double>(c.tn);
  return 2.0 * (tp * tn - fn * fp) / ((tp + fn) * (fn + tn) + (tp + fp) * (fp + tn));
}

double adjusted_rand_index(const Labels& pred, const Labels& truth) {
  if (pred.empty()) throw InvalidArgument("ARI needs at least one label");
  return adjusted_rand_index(pair_counts(pred, truth));
}

double normalized_mutual_information(const Labels& pred, const Labels& truth) {
  check_lengths(pred, truth);
  if (pred.empty()) return 1.0;
  const double n = static_cast<double>(pred.size());
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> rows;
  std::map<int, double> cols;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    joint[{pred[i], truth[i]}] += 1.0;
    rows[pred[i]] += 1.0;
    cols[truth[i]] += 1.0;
  }
  if (rows.size() == 1 && cols.size() == 1) return 1.0;

  auto entropy = [n](const std::map<int, double>& counts) {
    double h = 0.0;
    for (const auto& [_, c] : counts) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double h_pred = entropy(rows);
  const double h_truth = entropy(cols);
  if (h_pred * h_truth <= 0.0) return 0.0;

  double mi = 0.0;
  for (const auto& [key, c] : joint) {
    mi += (c / n) * std::log(n * c / (rows[key.first] * cols[key.second]));
  }
  return std::clamp(mi / std::sqrt(h_pred * h_truth), 0.0, 1.0);
}

std::vector<int> hungarian_assignment(const MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw InvalidArgument("assignment cost matrix must be square");
  // Potentials-based O(n^3) variant with 1-based bookkeeping; column 0 is a sentinel.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int row = 1; row <= n; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[col0] = 1;
      const int r = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int c = 1; c <= n; ++c) {
        if (used[c]) continue;
        const double cur = cost(r - 1, c - 1) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= n; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int c = 1; c <= n; ++c) assignment[match[c] - 1] = c - 1;
  return assignment;
}

std::vector<int> exhaustive_assignment(const MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  if (cost.cols() != n) throw InvalidArgument("assignment cost matrix must be square");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int r = 0; r < n; ++r) total += cost(r, perm[r]);
    if (total < best_cost) {
      best_cost = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::size_t edit_distance(const std::vector<std::string>& ref, const std::vector<std::string>& hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1), cur(hyp.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

namespace {

struct SpeakerStreams {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> words;
};

SpeakerStreams streams_of(const LabeledTranscript& t) {
  SpeakerStreams s;
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < t.speakers.size(); ++i) {
    auto [it, fresh] = index.try_emplace(t.speakers[i], s.names.size());
    if (fresh) {
      s.names.push_back(t.speakers[i]);
      s.words.emplace_back();
    }
    if (!t.words.empty()) {
      auto& stream = s.words[it->second];
      stream.insert(stream.end(), t.words[i].begin(), t.words[i].end());
    }
  }
  return s;
}

std::vector<int> solve_assignment(const MatrixXd& cost, MappingSearch search) {
  const bool exhaustive = search == MappingSearch::kExhaustive ||
                          (search == MappingSearch::kAuto && static_cast<std::size_t>(cost.rows()) <= kExhaustiveSpeakerLimit);
  return exhaustive ? exhaustive_assignment(cost) : hungarian_assignment(cost);
}

}  // namespace

WordErrors cpwer_counts(const LabeledTranscript& pred, const LabeledTranscript& truth, MappingSearch search) {
  pred.validate();
  truth.validate();
  const std::size_t total = truth.word_count();
  if (total == 0) throw DataError("cpWER needs at least one reference word");

  const SpeakerStreams ref = streams_of(truth);
  const SpeakerStreams hyp = streams_of(pred);
  const std::size_t n = std::max(ref.names.size(), hyp.names.size());
  const std::vector<std::string> empty;
  MatrixXd cost(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const auto& rw = r < ref.words.size() ? ref.words[r] : empty;
    for (std::size_t h = 0; h < n; ++h) {
      const auto& hw = h < hyp.words.size() ? hyp.words[h] : empty;
      cost(static_cast<Index>(r), static_cast<Index>(h)) = static_cast<double>(edit_distance(rw, hw));
    }
  }
  const auto assignment = solve_assignment(cost, search);
  WordErrors out;
  out.words = total;
  for (std::size_t r = 0; r < n; ++r) {
    out.errors += static_cast<std::size_t>(cost(static_cast<Index>(r), assignment[r]));
  }
  return out;
}

double cpwer(const LabeledTranscript& pred, const LabeledTranscript& truth, MappingSearch search) {
  return cpwer_counts(pred, truth, search).rate();
}

WordErrors text_der_counts(const LabeledTranscript& pred, const LabeledTranscript& truth, MappingSearch search) {
  pred.validate();
  truth.validate();
  std::vector<const std::string*> ref_words, hyp_words;
  std::vector<std::size_t> ref_speaker, hyp_speaker;
  std::map<std::string, std::size_t> ref_ids, hyp_ids;
  auto flatten = [](const LabeledTranscript& t, std::map<std::string, std::size_t>& ids,
                    std::vector<const std::string*>& words, std::vector<std::size_t>& speaker) {
    for (std::size_t i = 0; i < t.words.size(); ++i) {
      const std::size_t id = ids.try_emplace(t.speakers[i], ids.size()).first->second;
      for (const auto& w : t.words[i]) {
        words.push_back(&w);
        speaker.push_back(id);
      }
    }
  };
  flatten(truth, ref_ids, ref_words, ref_speaker);
  flatten(pred, hyp_ids, hyp_words, hyp_speaker);
  bool same = ref_words.size() == hyp_words.size();
  for (std::size_t i = 0; same && i < ref_words.size(); ++i) same = *ref_words[i] == *hyp_words[i];
  if (!same) throw DataError("TextDER needs identical word sequences on both sides; use cpWER for differing transcripts");

  WordErrors out;
  out.words = ref_words.size();
  if (out.words == 0) return out;

  const std::size_t n = std::max(ref_ids.size(), hyp_ids.size());
  MatrixXd overlap = MatrixXd::Zero(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < ref_speaker.size(); ++i) {
    overlap(static_cast<Index>(ref_speaker[i]), static_cast<Index>(hyp_speaker[i])) += 1.0;
  }
  const auto assignment = solve_assignment(-overlap, search);
  std::size_t matched = 0;
  for (std::size_t r = 0; r < n; ++r) matched += static_cast<std::size_t>(overlap(static_cast<Index>(r), assignment[r]));
  out.errors = out.words - matched;
  return out;
}

double text_der(const LabeledTranscript& pred, const LabeledTranscript& truth, MappingSearch search) {
  return text_der_counts(pred, truth, search).rate();
}

MetricsReport evaluate(const LabeledTranscript& pred, const LabeledTranscript& truth) {
  pred.validate();
  truth.validate();
  const Labels p = encode_labels(pred.speakers);
  const Labels t = encode_labels(truth.speakers);
  MetricsReport report;
  report.ari = adjusted_rand_index(p, t);
  report.nmi = normalized_mutual_information(p, t);
  report.spk_diff = speaker_count_diff(count_distinct(p), count_distinct(t));
  if (truth.word_count() > 0 && !pred.words.empty()) {
    report.cpwer = cpwer_counts(pred, truth);
    try {
      report.text_der = text_der_counts(pred, truth);
    } catch (const DataError&) {
      // Differing word sequences: only cpWER is defined.
    }
  }
  return report;
}

MetricsReport aggregate(const std::vector<MetricsReport>& sessions) {
  MetricsReport total;
  if (sessions.empty()) return total;
  for (const auto& s : sessions) {
    total.ari += s.ari;
    total.nmi += s.nmi;
    total.spk_diff += s.spk_diff;
    auto pool = [](std::optional<WordErrors>& acc, const std::optional<WordErrors>& x) {
      if (!x) return;
      if (!acc) acc = WordErrors{};
      acc->errors += x->errors;
      acc->words += x->words;
    };
    pool(total.cpwer, s.cpwer);
    pool(total.text_der, s.text_der);
  }
  total.ari /= static_cast<double>(sessions.size());
  total.nmi /= static_cast<double>(sessions.size());
  return total;
}

std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::size_t name_width = 7;
  for (const auto& [name, _] : rows) name_width = std::max(name_width, name.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_width)) << "session" << std::right << std::setw(9) << "ARI"
      << std::setw(9) << "NMI" << std::setw(9) << "SpkDiff" << std::setw(11) << "CpWER(%)" << std::setw(12)
      << "TextDER(%)" << '\n';
  out << std::fixed;
  for (const auto& [name, r] : rows) {
    out << std::left << std::setw(static_cast<int>(name_width)) << name << std::right << std::setprecision(4)
        << std::setw(9) << r.ari << std::setw(9) << r.nmi << std::setw(9) << r.spk_diff;
    if (r.cpwer) out << std::setw(11) << r.cpwer->rate() * 100.0;
    else out << std::setw(11) << "-";
    if (r.text_der) out << std::setw(12) << r.text_der->rate() * 100.0;
    else out << std::setw(12) << "-";
    out << '\n';
  }
  return out.str();
}

}  // namespace jpcp
