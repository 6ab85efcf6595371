#include "jpcp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "jpcp/rng.hpp"

namespace jpcp {

void SimulationConfig::validate() const {
  if (num_speakers < 1) throw InvalidArgument("num_speakers must be >= 1");
  if (min_embeddings_per_speaker < 1 || max_embeddings_per_speaker < min_embeddings_per_speaker) {
    throw InvalidArgument("embeddings_per_speaker range must satisfy 1 <= min <= max");
  }
  if (dim < 2) throw InvalidArgument("dim must be >= 2");
  if (!(intra_speaker_spread > 0.0)) throw InvalidArgument("intra_speaker_spread must be > 0");
  if (!(inter_speaker_separation > 0.0 && inter_speaker_separation < 180.0)) {
    throw InvalidArgument("inter_speaker_separation must lie in (0, 180) degrees");
  }
  if (!(turn_structure >= 1.0)) throw InvalidArgument("turn_structure must be >= 1");
}

std::vector<std::string> SimulatedSession::speaker_names() const {
  std::vector<std::string> names;
  names.reserve(labels.size());
  for (int l : labels) names.push_back("S" + std::to_string(l));
  return names;
}

LabeledTranscript SimulatedSession::truth_transcript(const std::string& session_id) const {
  return LabeledTranscript{session_id, speaker_names(), embeddings.words};
}

std::vector<int> run_lengths(const Labels& labels) {
  std::vector<int> runs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i == 0 || labels[i] != labels[i - 1]) runs.push_back(0);
    ++runs.back();
  }
  return runs;
}

namespace {

constexpr int kMaxCentroidRejections = 10000;
constexpr int kVocabularySize = 200;

VectorXd random_unit(Index dim, Rng& rng) {
  VectorXd v(dim);
  for (Index i = 0; i < dim; ++i) v(i) = rng.normal();
  return v.normalized();
}

MatrixXd draw_centroids(const SimulationConfig& cfg, Rng& rng) {
  const double max_cos = std::cos(cfg.inter_speaker_separation * std::numbers::pi / 180.0);
  MatrixXd centroids(cfg.num_speakers, cfg.dim);
  int rejections = 0;
  for (int s = 0; s < cfg.num_speakers;) {
    const VectorXd c = random_unit(cfg.dim, rng);
    bool ok = true;
    for (int t = 0; t < s && ok; ++t) ok = centroids.row(t).dot(c) <= max_cos;
    if (ok) {
      centroids.row(s++) = c.transpose();
    } else if (++rejections >= kMaxCentroidRejections) {
      throw InvalidArgument("cannot place " + std::to_string(cfg.num_speakers) + " centroids " +
                            std::to_string(cfg.inter_speaker_separation) + " degrees apart in dimension " +
                            std::to_string(cfg.dim));
    }
  }
  return centroids;
}

// 1 + Geometric failures, mean `mean`.
int run_length(double mean, Rng& rng) {
  if (mean <= 1.0) return 1;
  const double p = 1.0 / mean;
  const double u = 1.0 - rng.uniform01();  // (0, 1]
  return 1 + static_cast<int>(std::floor(std::log(u) / std::log1p(-p)));
}

Labels draw_labels(const SimulationConfig& cfg, Rng& rng) {
  std::vector<int> budget(static_cast<std::size_t>(cfg.num_speakers));
  const auto span = static_cast<std::uint64_t>(cfg.max_embeddings_per_speaker - cfg.min_embeddings_per_speaker + 1);
  for (auto& b : budget) b = cfg.min_embeddings_per_speaker + static_cast<int>(rng.uniform_index(span));

  Labels labels;
  int prev = -1;
  for (;;) {
    // Next speaker: weighted by remaining budget, never the previous one.
    long total = 0;
    for (int s = 0; s < cfg.num_speakers; ++s)
      if (s != prev) total += budget[s];
    int speaker = prev;
    if (total > 0) {
      long pick = static_cast<long>(rng.uniform_index(static_cast<std::uint64_t>(total)));
      for (int s = 0; s < cfg.num_speakers; ++s) {
        if (s == prev) continue;
        if (pick < budget[s]) {
          speaker = s;
          break;
        }
        pick -= budget[s];
      }
    } else if (prev < 0 || budget[prev] == 0) {
      break;
    }
    const int len = std::min(run_length(cfg.turn_structure, rng), budget[speaker]);
    labels.insert(labels.end(), static_cast<std::size_t>(len), speaker);
    budget[speaker] -= len;
    prev = speaker;
  }
  return labels;
}

}  // namespace

SimulatedSession generate_session(const SimulationConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  SimulatedSession session;
  session.centroids = draw_centroids(cfg, rng);
  session.labels = draw_labels(cfg, rng);

  const auto n = static_cast<Index>(session.labels.size());
  const double noise_sd = 1.0 / (cfg.intra_speaker_spread * std::sqrt(static_cast<double>(cfg.dim)));
  MatrixXd vectors(n, cfg.dim);
  for (Index i = 0; i < n; ++i) {
    const VectorXd c = session.centroids.row(session.labels[i]).transpose();
    VectorXd g(cfg.dim);
    for (Index d = 0; d < cfg.dim; ++d) g(d) = noise_sd * rng.normal();
    g -= g.dot(c) * c;
    vectors.row(i) = (c + g).normalized().transpose();
  }

  auto& emb = session.embeddings;
  emb.vectors = std::move(vectors);
  emb.start_times.resize(n);
  emb.end_times.resize(n);
  emb.words.resize(n);
  long centis = 0;
  for (Index i = 0; i < n; ++i) {
    emb.start_times[i] = static_cast<double>(centis) / 100.0;
    centis += 100 + static_cast<long>(rng.uniform_index(101));
    emb.end_times[i] = static_cast<double>(centis) / 100.0;
    const int count = 2 + static_cast<int>(rng.uniform_index(5));
    for (int w = 0; w < count; ++w) emb.words[i].push_back("w" + std::to_string(rng.uniform_index(kVocabularySize)));
  }

  // Run boundaries as embedding index ranges.
  std::vector<std::pair<Index, Index>> runs;
  for (Index i = 0; i < n; ++i) {
    if (i == 0 || session.labels[i] != session.labels[i - 1]) runs.emplace_back(i, i);
    runs.back().second = i + 1;
  }
  std::int64_t segment_id = 0;
  for (std::size_t r = 0; r < runs.size();) {
    std::size_t take = 1;
    if (runs.size() - r > 1 && rng.uniform01() < 0.5) {
      take = std::min<std::size_t>(runs.size() - r, 2 + rng.uniform_index(2));
    }
    SegmentAnnotation seg;
    seg.segment_id = segment_id++;
    seg.start_time = emb.start_times[runs[r].first];
    seg.end_time = emb.end_times[runs[r + take - 1].second - 1];
    seg.is_dialogue = take > 1;
    for (std::size_t t = r + 1; t < r + take; ++t) seg.turn_change_points.push_back(emb.start_times[runs[t].first]);
    if (!seg.is_dialogue) seg.speaker_label = "S" + std::to_string(session.labels[runs[r].first]);
    session.annotations.push_back(std::move(seg));
    r += take;
  }
  return session;
}

}  // namespace jpcp
