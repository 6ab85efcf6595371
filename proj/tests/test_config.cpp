#include <gtest/gtest.h>

#include "jpcp/config.hpp"
#include "jpcp/io.hpp"
#include "test_util.hpp"

using namespace jpcp;
using testutil::TempDir;

TEST(DiarizeConfig, TomlFile) {
  TempDir dir("cfg");
  testutil::write_text(dir / "c.toml", R"(seed = 7
variant = "E2CPM"
row_keep_fraction = 0.1
row_keep_min = 4

[ssdr]
out_dim = 8

[propagation]
lambda = 0.3
knn_k = 5

[clustering]
fixed_k = 3

[constraints]
source = "simulated"
rate = 0.06

[output]
dump_matrices = true
)");
  const DiarizeConfig c = diarize_config_from_json(read_config_file(dir / "c.toml"));
  EXPECT_EQ(c.pipeline.seed, 7u);
  EXPECT_EQ(c.pipeline.variant, Variant::kE2cpm);
  EXPECT_EQ(c.pipeline.row_keep_fraction, 0.1);
  EXPECT_EQ(c.pipeline.row_keep_min, 4);
  EXPECT_EQ(c.pipeline.ssdr.out_dim, 8);
  EXPECT_EQ(c.pipeline.propagation.lambda, 0.3);
  EXPECT_EQ(c.pipeline.propagation.knn_k, 5);
  EXPECT_EQ(c.pipeline.clustering.fixed_k, 3);
  EXPECT_EQ(c.constraints.source, ConstraintSource::kSimulated);
  EXPECT_EQ(c.constraints.rate, 0.06);
  EXPECT_TRUE(c.dump_matrices);
}

TEST(DiarizeConfig, DefaultsAndEcho) {
  const DiarizeConfig c = diarize_config_from_json(json::object());
  EXPECT_EQ(c.pipeline.variant, Variant::kSsdrE2cpm);
  EXPECT_EQ(c.constraints.source, ConstraintSource::kAuto);
  EXPECT_EQ(c.pipeline.row_keep_fraction, kDefaultRowKeepFraction);
  const json echo = to_json(c);
  const DiarizeConfig again = diarize_config_from_json(echo);
  EXPECT_EQ(to_json(again), echo);
  EXPECT_EQ(echo["variant"], "SSDR+E2CPM");
}

TEST(DiarizeConfig, Rejections) {
  EXPECT_THROW_WITH(diarize_config_from_json(json{{"lambda", 0.5}}), DataError, "unknown key 'lambda'");
  EXPECT_THROW_WITH(diarize_config_from_json(json{{"propagation", {{"lambda", "half"}}}}), DataError,
                    "'lambda' must be a number");
  EXPECT_THROW_WITH(diarize_config_from_json(json{{"propagation", {{"lambda", 1.5}}}}), DataError, "lambda");
  EXPECT_THROW_WITH(diarize_config_from_json(json{{"seed", -1}}), DataError, "non-negative");
  EXPECT_THROW_WITH(diarize_config_from_json(json{{"clustering", {{"fixed_k", 2.5}}}}), DataError,
                    "must be an integer");
  EXPECT_THROW(diarize_config_from_json(json{{"variant", "nope"}}), DataError);
  EXPECT_THROW(diarize_config_from_json(json{{"constraints", {{"source", "oracle"}}}}), DataError);
  EXPECT_THROW(diarize_config_from_json(json{{"constraints", {{"rate", 2.0}}}}), DataError);
}

TEST(SimulateConfig, ParsesSessionTable) {
  const json doc = {{"seed", 3},
                    {"session_id", "x"},
                    {"format", "csv"},
                    {"session", {{"num_speakers", 5}, {"dim", 16}}},
                    {"constraints", {{"rate", 0.1}}}};
  const SimulateConfig c = simulate_config_from_json(doc);
  EXPECT_EQ(c.session.seed, 3u);
  EXPECT_EQ(c.session_id, "x");
  EXPECT_EQ(c.format, EmbeddingFormat::kCsv);
  EXPECT_EQ(c.session.num_speakers, 5);
  EXPECT_EQ(c.session.dim, 16);
  EXPECT_EQ(c.constraint_rate, 0.1);
  EXPECT_THROW(simulate_config_from_json(json{{"format", "parquet"}}), DataError);
  EXPECT_THROW(simulate_config_from_json(json{{"session", {{"num_speakers", 0}}}}), DataError);
}

TEST(SweepSpec, OverridesHardInstance) {
  const json doc = {{"rates", {0.0, 0.5}},
                    {"trials", 2},
                    {"variants", {"acoustic-only", "E2CP"}},
                    {"speakers", {{"min", 2}, {"max", 4}}},
                    {"pipeline", {{"propagation", {{"knn_k", 6}}}}}};
  const SweepSpec s = sweep_spec_from_json(doc);
  EXPECT_EQ(s.constraint_rates, (std::vector<double>{0.0, 0.5}));
  EXPECT_EQ(s.trials_per_rate, 2);
  EXPECT_EQ(s.variants, (std::vector<Variant>{Variant::kAcousticOnly, Variant::kE2cp}));
  EXPECT_EQ(s.min_speakers, 2);
  EXPECT_EQ(s.pipeline.propagation.knn_k, 6);
  EXPECT_EQ(s.session.intra_speaker_spread, hard_instance_spec().session.intra_speaker_spread);
  EXPECT_THROW(sweep_spec_from_json(json{{"rates", {0.2, 0.1}}}), DataError);
  EXPECT_THROW(sweep_spec_from_json(json{{"pipeline", {{"seed", 1}}}}), DataError);
}
