#include <gtest/gtest.h>

#include "jpcp/metrics.hpp"
#include "jpcp/rng.hpp"
#include "oracles.hpp"

using namespace jpcp;

namespace {

Labels random_labels(std::size_t n, Rng& rng) {
  Labels l(n);
  for (auto& v : l) v = static_cast<int>(rng.uniform_index(n));
  return l;
}

LabeledTranscript transcript(std::vector<std::string> speakers, std::vector<std::string> texts) {
  LabeledTranscript t;
  t.session_id = "s";
  t.speakers = std::move(speakers);
  for (const auto& text : texts) t.words.push_back(tokenize(text, Tokenization::kWhitespace));
  return t;
}

}  // namespace

TEST(Ari, Examples) {
  EXPECT_EQ(adjusted_rand_index(Labels{0, 0, 1, 1, 2}, Labels{3, 3, 1, 1, 0}), 1.0);
  EXPECT_EQ(adjusted_rand_index(Labels(8, 0), Labels{0, 0, 0, 0, 1, 1, 1, 1}), 0.0);
  EXPECT_EQ(adjusted_rand_index(Labels{0}, Labels{0}), 1.0);
}

TEST(Ari, MatchesPairCountingOracle) {
  Rng rng(1);
  for (int t = 0; t < 300; ++t) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform_index(8));
    const Labels p = random_labels(n, rng), q = random_labels(n, rng);
    EXPECT_EQ(adjusted_rand_index(p, q), oracle::ari(p, q));
  }
}

TEST(PairCounts, MatchOracle) {
  Rng rng(2);
  for (int t = 0; t < 100; ++t) {
    const auto n = 2 + static_cast<std::size_t>(rng.uniform_index(10));
    const Labels p = random_labels(n, rng), q = random_labels(n, rng);
    const PairCounts c = pair_counts(p, q);
    const oracle::Pairs o = oracle::count_pairs(p, q);
    EXPECT_EQ(static_cast<std::int64_t>(c.tp), o.same_both);
    EXPECT_EQ(static_cast<std::int64_t>(c.tp + c.fp), o.same_pred);
    EXPECT_EQ(static_cast<std::int64_t>(c.tp + c.fn), o.same_truth);
    EXPECT_EQ(static_cast<std::int64_t>(c.tp + c.fp + c.fn + c.tn), o.total);
  }
}

TEST(Nmi, Examples) {
  EXPECT_DOUBLE_EQ(normalized_mutual_information(Labels{0, 0, 1, 1}, Labels{1, 1, 0, 0}), 1.0);
  EXPECT_NEAR(normalized_mutual_information(Labels{0, 0, 1, 1}, Labels{0, 1, 0, 1}), 0.0, 1e-15);
  EXPECT_EQ(normalized_mutual_information(Labels{0, 0, 0}, Labels{0, 0, 0}), 1.0);
  EXPECT_EQ(normalized_mutual_information(Labels{0, 0, 0}, Labels{0, 1, 2}), 0.0);
}

TEST(Nmi, MatchesEntropyOracle) {
  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    const auto n = 1 + static_cast<std::size_t>(rng.uniform_index(8));
    const Labels p = random_labels(n, rng), q = random_labels(n, rng);
    EXPECT_NEAR(normalized_mutual_information(p, q), oracle::nmi(p, q), 1e-12);
  }
}

TEST(SpkDiff, Examples) {
  EXPECT_EQ(speaker_count_diff(5, 5), 0);
  EXPECT_EQ(speaker_count_diff(7, 5), 2);
  EXPECT_EQ(speaker_count_diff(3, 5), 2);
  MetricsReport a, b, c;
  a.spk_diff = 1;
  c.spk_diff = 2;
  EXPECT_EQ(aggregate({a, b, c}).spk_diff, 3);
}

TEST(Tokenize, Modes) {
  EXPECT_EQ(tokenize("  a bb\tc\n", Tokenization::kWhitespace), (std::vector<std::string>{"a", "bb", "c"}));
  EXPECT_EQ(tokenize("你好 a", Tokenization::kPerCharacter), (std::vector<std::string>{"你", "好", "a"}));
  EXPECT_EQ(parse_tokenization("per-character"), Tokenization::kPerCharacter);
  EXPECT_THROW(parse_tokenization("bytes"), InvalidArgument);
}

TEST(Cpwer, Examples) {
  const auto truth = transcript({"A", "B", "A"}, {"a b c", "d e", "f g h i j"});
  EXPECT_EQ(cpwer(truth, truth), 0.0);
  const auto swapped = transcript({"B", "A", "B"}, {"a b c", "d e", "f g h i j"});
  EXPECT_EQ(cpwer(swapped, truth), 0.0);
  const auto one_sub = transcript({"x", "y", "x"}, {"a b c", "d e", "f g X i j"});
  EXPECT_DOUBLE_EQ(cpwer(one_sub, truth), 0.1);
}

TEST(Cpwer, SpeakerMismatchCountsWholeStreams) {
  const auto truth = transcript({"A", "B"}, {"a b", "c d e"});
  const auto merged = transcript({"x", "x"}, {"a b", "c d e"});
  // Best mapping aligns "a b c d e" against B's "c d e": 2 deletions, plus A's 2 words missing.
  EXPECT_EQ(cpwer_counts(merged, truth).errors, 4u);
  EXPECT_EQ(cpwer_counts(merged, truth).words, 5u);
}

TEST(Cpwer, HungarianEqualsExhaustiveAndOracle) {
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    const std::size_t n = 4 + rng.uniform_index(10);
    LabeledTranscript truth, pred;
    for (std::size_t i = 0; i < n; ++i) {
      truth.speakers.push_back("T" + std::to_string(rng.uniform_index(5)));
      pred.speakers.push_back("P" + std::to_string(rng.uniform_index(5)));
      std::vector<std::string> w;
      for (std::size_t k = 0, m = 1 + rng.uniform_index(4); k < m; ++k) w.push_back("w" + std::to_string(rng.uniform_index(6)));
      truth.words.push_back(w);
      pred.words.push_back(w);
    }
    const auto h = cpwer_counts(pred, truth, MappingSearch::kHungarian);
    const auto e = cpwer_counts(pred, truth, MappingSearch::kExhaustive);
    EXPECT_EQ(h.errors, e.errors);

    auto streams = [](const LabeledTranscript& tr) {
      std::map<std::string, std::vector<std::string>> by;
      for (std::size_t i = 0; i < tr.speakers.size(); ++i)
        by[tr.speakers[i]].insert(by[tr.speakers[i]].end(), tr.words[i].begin(), tr.words[i].end());
      std::vector<std::vector<std::string>> out;
      for (auto& [k, v] : by) out.push_back(v);
      return out;
    };
    EXPECT_EQ(e.errors, oracle::cpwer_errors(streams(truth), streams(pred)));
  }
}

TEST(Assignment, HungarianMatchesExhaustiveCost) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const Index n = 1 + static_cast<Index>(rng.uniform_index(7));
    MatrixXd cost(n, n);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) cost(i, j) = static_cast<double>(rng.uniform_index(10));
    auto total = [&](const std::vector<int>& a) {
      double s = 0.0;
      for (Index i = 0; i < n; ++i) s += cost(i, a[static_cast<std::size_t>(i)]);
      return s;
    };
    EXPECT_EQ(total(hungarian_assignment(cost)), total(exhaustive_assignment(cost)));
  }
}

TEST(EditDistance, MatchesOracle) {
  const std::vector<std::string> a{"a", "b", "c", "d"}, b{"b", "c", "x", "d", "e"};
  EXPECT_EQ(edit_distance(a, b), oracle::levenshtein(a, b));
  EXPECT_EQ(edit_distance({}, b), 5u);
}

TEST(TextDer, Examples) {
  const auto truth = transcript({"A", "A", "A", "B", "B"}, {"a b", "c d", "e f", "g h", "i j"});
  EXPECT_EQ(text_der(truth, truth), 0.0);
  const auto one = transcript({"x", "x", "x", "x", "x"}, {"a b", "c d", "e f", "g h", "i j"});
  EXPECT_DOUBLE_EQ(text_der(one, truth), 0.4);
  const auto swapped = transcript({"B", "B", "B", "A", "A"}, {"a b", "c d", "e f", "g h", "i j"});
  EXPECT_EQ(text_der(swapped, truth), 0.0);
}

TEST(TextDer, NeedsSameWords) {
  const auto truth = transcript({"A", "B"}, {"a b", "c"});
  const auto other = transcript({"A", "B"}, {"a b", "d"});
  EXPECT_THROW(text_der(other, truth), DataError);
}

TEST(Evaluate, PerfectPrediction) {
  const auto truth = transcript({"A", "B", "A", "C"}, {"a", "b c", "d", "e f g"});
  const MetricsReport r = evaluate(truth, truth);
  EXPECT_EQ(r.ari, 1.0);
  EXPECT_EQ(r.nmi, 1.0);
  EXPECT_EQ(r.spk_diff, 0);
  ASSERT_TRUE(r.cpwer && r.text_der);
  EXPECT_EQ(r.text_der->rate(), 0.0);
  EXPECT_NE(format_table({{"perfect", r}}).find("perfect"), std::string::npos);
}

TEST(Aggregate, PoolsWordsAndAveragesClusterScores) {
  MetricsReport a, b;
  a.ari = 1.0;
  b.ari = 0.5;
  a.text_der = WordErrors{1, 10};
  b.text_der = WordErrors{3, 30};
  const MetricsReport r = aggregate({a, b});
  EXPECT_DOUBLE_EQ(r.ari, 0.75);
  ASSERT_TRUE(r.text_der);
  EXPECT_EQ(r.text_der->errors, 4u);
  EXPECT_EQ(r.text_der->words, 40u);
}
