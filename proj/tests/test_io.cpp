#include <gtest/gtest.h>

#include "jpcp/io.hpp"
#include "test_util.hpp"

using namespace jpcp;
using testutil::TempDir;

namespace {

// "JPCP", version 1, N=2, D=3, rows (1, -2, 0.5) and (0, 0.25, 3).
const std::vector<unsigned char> kTwoByThree = {
    'J',  'P',  'C',  'P',  1,    0,    0, 0, 2, 0,    0,    0,    3,    0,    0,    0,    0,    0,
    0x80, 0x3F, 0,    0,    0,    0xC0, 0, 0, 0, 0x3F, 0,    0,    0,    0,    0,    0,    0x80, 0x3E,
    0,    0,    0x40, 0x40};

MatrixXd two_by_three() { return (MatrixXd(2, 3) << 1.0, -2.0, 0.5, 0.0, 0.25, 3.0).finished(); }

}  // namespace

TEST(EmbeddingFile, BinaryKnownBytes) {
  TempDir dir("io");
  testutil::write_bytes(dir / "e.bin", kTwoByThree);
  EXPECT_EQ(read_embedding_file(dir / "e.bin"), two_by_three());
  write_embedding_file(two_by_three(), dir / "w.bin", EmbeddingFormat::kBinary);
  EXPECT_EQ(testutil::read_bytes(dir / "w.bin"), kTwoByThree);
}

TEST(EmbeddingFile, CsvAndBinaryAgree) {
  TempDir dir("io");
  testutil::write_text(dir / "e.csv", "1,-2,0.5\n0,0.25,3\n");
  EXPECT_EQ(read_embedding_file(dir / "e.csv"), two_by_three());

  Rng rng(1);
  const MatrixXd x = MatrixXd::NullaryExpr(7, 5, [&] { return rng.normal(); });
  write_embedding_file(x, dir / "x.bin", EmbeddingFormat::kBinary);
  write_embedding_file(x, dir / "x.csv", EmbeddingFormat::kCsv);
  const MatrixXd b = read_embedding_file(dir / "x.bin");
  EXPECT_EQ(b, read_embedding_file(dir / "x.csv"));
  EXPECT_EQ(b, x.cast<float>().cast<double>());
  write_embedding_file(b, dir / "y.csv", EmbeddingFormat::kCsv);
  EXPECT_EQ(read_embedding_file(dir / "y.csv"), b);
}

TEST(EmbeddingFile, TruncatedFileIsASizeMismatch) {
  TempDir dir("io");
  auto bytes = kTwoByThree;
  bytes.resize(bytes.size() - 4);
  testutil::write_bytes(dir / "t.bin", bytes);
  EXPECT_THROW_WITH(read_embedding_file(dir / "t.bin"), DataError, "size mismatch");
  testutil::write_bytes(dir / "h.bin", {'J', 'P', 'C', 'P', 1, 0});
  EXPECT_THROW_WITH(read_embedding_file(dir / "h.bin"), DataError, "16-byte header");
}

TEST(EmbeddingFile, BadMagicVersionAndNaN) {
  TempDir dir("io");
  auto bytes = kTwoByThree;
  bytes[0] = 'X';
  testutil::write_bytes(dir / "m.bin", bytes);
  EXPECT_THROW_WITH(read_embedding_file(dir / "m.bin"), DataError, "bad magic at offset 0");

  bytes = kTwoByThree;
  bytes[4] = 2;
  testutil::write_bytes(dir / "v.bin", bytes);
  EXPECT_THROW_WITH(read_embedding_file(dir / "v.bin"), DataError, "unsupported version 2 at offset 4");

  bytes = kTwoByThree;
  // Row 1, column 0 starts at 16 + 3 * 4 = 28; 0x7FC00000 is a quiet NaN.
  bytes[28] = 0, bytes[29] = 0, bytes[30] = 0xC0, bytes[31] = 0x7F;
  testutil::write_bytes(dir / "n.bin", bytes);
  EXPECT_THROW_WITH(read_embedding_file(dir / "n.bin"), DataError, "non-finite value at offset 28");
}

TEST(EmbeddingFile, CsvErrorsNameTheLine) {
  TempDir dir("io");
  testutil::write_text(dir / "r.csv", "1,2,3\n4,5\n");
  EXPECT_THROW_WITH(read_embedding_file(dir / "r.csv"), DataError, "line 2 has 2 values, expected 3");
  testutil::write_text(dir / "a.csv", "1,2,3\n4,x,6\n");
  EXPECT_THROW_WITH(read_embedding_file(dir / "a.csv"), DataError, "line 2");
  EXPECT_THROW_WITH(read_embedding_file(dir / "missing.csv"), DataError, "cannot open");
}

TEST(Rttm, SingleRun) {
  EmbeddingSet e = make_embedding_set(MatrixXd::Ones(2, 2));
  e.start_times = {0.0, 0.75};
  e.end_times = {0.75, 1.5};
  EXPECT_EQ(format_rttm({3, 3}, e, "s1"), "SPEAKER s1 1 0.00 1.50 <NA> <NA> spk3 <NA> <NA>\n");
}

TEST(Rttm, RunsAndAlternation) {
  const EmbeddingSet e = make_embedding_set(MatrixXd::Ones(4, 2));
  EXPECT_EQ(format_rttm({0, 0, 1, 1}, e, "s"),
            "SPEAKER s 1 0.00 2.00 <NA> <NA> spk0 <NA> <NA>\n"
            "SPEAKER s 1 2.00 2.00 <NA> <NA> spk1 <NA> <NA>\n");
  const std::string alt = format_rttm({0, 1, 0, 1}, e, "s");
  EXPECT_EQ(std::count(alt.begin(), alt.end(), '\n'), 4);
  EXPECT_EQ(format_rttm({}, make_embedding_set(MatrixXd(0, 2)), "s"), "");
}

TEST(Manifest, JsonAndTomlResolveRelativePaths) {
  TempDir dir("io");
  testutil::write_text(dir / "m.json", R"({"session_id": "a", "embeddings": {"path": "e.bin", "dim": 3, "count": 2},
                                          "transcript": "t.json", "tokenization": "per-character"})");
  const SessionManifest j = read_manifest(dir / "m.json");
  EXPECT_EQ(j.session_id, "a");
  EXPECT_EQ(j.embeddings, dir.path() / "e.bin");
  EXPECT_EQ(j.transcript, dir.path() / "t.json");
  EXPECT_FALSE(j.annotations);
  EXPECT_EQ(j.tokenization, Tokenization::kPerCharacter);

  testutil::write_text(dir / "m.toml",
                       "session_id = \"a\"\ntranscript = \"t.json\"\ntokenization = \"per-character\"\n"
                       "[embeddings]\npath = \"e.bin\"\ndim = 3\ncount = 2\n");
  const SessionManifest t = read_manifest(dir / "m.toml");
  EXPECT_EQ(t.embeddings, j.embeddings);
  EXPECT_EQ(t.transcript, j.transcript);
  EXPECT_EQ(t.dim, 3);
  EXPECT_EQ(t.count, 2);

  write_manifest(j, dir / "copy.json");
  const json doc = read_json_file(dir / "copy.json");
  EXPECT_EQ(doc["embeddings"]["path"], "e.bin");
  const SessionManifest back = read_manifest(dir / "copy.json");
  EXPECT_EQ(back.embeddings, j.embeddings);
  EXPECT_EQ(back.transcript, j.transcript);
}

TEST(Manifest, Errors) {
  TempDir dir("io");
  testutil::write_text(dir / "u.json", R"({"session_id": "a", "embeddings": {"path": "e", "dim": 1, "count": 1}, "x": 1})");
  EXPECT_THROW_WITH(read_manifest(dir / "u.json"), DataError, "unknown field 'x'");
  testutil::write_text(dir / "b.toml", "session_id = \n");
  EXPECT_THROW_WITH(read_manifest(dir / "b.toml"), DataError, "invalid TOML");
  testutil::write_text(dir / "b.json", "{");
  EXPECT_THROW_WITH(read_manifest(dir / "b.json"), DataError, "invalid JSON");
}

TEST(LoadSession, ChecksShapeAndNormalizes) {
  TempDir dir("io");
  write_embedding_file(two_by_three(), dir / "e.bin", EmbeddingFormat::kBinary);
  write_transcript({{0.0, 1.0, "A", "hi there"}, {1.0, 2.5, "B", "yes"}}, dir / "t.json");
  SessionManifest m;
  m.session_id = "s";
  m.embeddings = dir / "e.bin";
  m.dim = 3;
  m.count = 2;
  m.transcript = dir / "t.json";
  const Session s = load_session(m);
  EXPECT_NEAR(s.embeddings.vectors.row(0).norm(), 1.0, 1e-15);
  EXPECT_EQ(s.embeddings.end_times, (std::vector<double>{1.0, 2.5}));
  ASSERT_TRUE(s.truth);
  EXPECT_EQ(s.truth->speakers, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(s.embeddings.words[0], (std::vector<std::string>{"hi", "there"}));

  m.count = 3;
  EXPECT_THROW_WITH(load_session(m), DataError, "size mismatch");
  m.count = 2;
  write_transcript({{0.0, 1.0, "A", "x"}, {1.0, 2.0, std::nullopt, "y"}}, dir / "t.json");
  EXPECT_THROW_WITH(load_session(m), DataError, "every entry or no entry");
}

TEST(Constraints, FileRoundTripAndValidation) {
  TempDir dir("io");
  ConstraintSet cs;
  cs.add_must(0, 3);
  cs.add_cannot(1, 2);
  write_constraints(cs, 4, dir / "c.json");
  EXPECT_EQ(testutil::read_text(dir / "c.json"), "{\"cannot\":[[1,2]],\"must\":[[0,3]],\"n\":4}\n");
  const ConstraintSet back = read_constraints(dir / "c.json", 4);
  EXPECT_EQ(back.must(), cs.must());
  EXPECT_EQ(back.cannot(), cs.cannot());
  EXPECT_THROW_WITH(read_constraints(dir / "c.json", 5), DataError, "n=4");
  testutil::write_text(dir / "bad.json", R"({"n": 3, "must": [[0, 3]], "cannot": []})");
  EXPECT_THROW_WITH(read_constraints(dir / "bad.json"), DataError, "must[0]");
  testutil::write_text(dir / "x.json", R"({"n": 3, "must": [[0, 1]], "cannot": [[1, 0]]})");
  EXPECT_THROW(read_constraints(dir / "x.json"), DataError);
}

TEST(Annotations, RoundTrip) {
  TempDir dir("io");
  std::vector<SegmentAnnotation> a(2);
  a[0].segment_id = 0;
  a[0].start_time = 0.0;
  a[0].end_time = 3.0;
  a[0].is_dialogue = true;
  a[0].turn_change_points = {1.5};
  a[1].segment_id = 1;
  a[1].start_time = 3.0;
  a[1].end_time = 4.0;
  a[1].speaker_label = "S1";
  write_annotations(a, dir / "a.json");
  const auto back = read_annotations(dir / "a.json");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].turn_change_points, a[0].turn_change_points);
  EXPECT_TRUE(back[0].is_dialogue);
  EXPECT_EQ(back[1].speaker_label, a[1].speaker_label);
  EXPECT_EQ(annotations_to_json(back), annotations_to_json(a));
}

TEST(Transcript, RoundTripAndLabeling) {
  TempDir dir("io");
  const std::vector<TranscriptEntry> t = {{0.0, 1.0, "A", "a b"}, {1.0, 2.0, "B", std::nullopt}};
  write_transcript(t, dir / "t.json");
  const auto back = read_transcript(dir / "t.json");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].text, t[0].text);
  EXPECT_EQ(back[1].speaker, t[1].speaker);
  EXPECT_FALSE(back[1].text);
  const LabeledTranscript l = to_labeled(back, "s", Tokenization::kWhitespace);
  EXPECT_EQ(l.words[0], (std::vector<std::string>{"a", "b"}));
  EXPECT_TRUE(l.words[1].empty());
  EXPECT_THROW(to_labeled({{0.0, 1.0, std::nullopt, "x"}}, "s", Tokenization::kWhitespace), DataError);
}
