#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "moralnet/data_io.hpp"
#include "test_support.hpp"

using namespace moralnet;

namespace {

AssociationCorpus parse(const std::string& text) {
  std::istringstream in(text);
  return parse_responses(in, Source::human);
}

}  // namespace

TEST(Normalize, LowercasesTrimsCollapses) {
  EXPECT_EQ(normalize_token("  Mother  "), "mother");
  EXPECT_EQ(normalize_token("Ice \t  Cream"), "ice cream");
  EXPECT_EQ(normalize_token(""), "");
  EXPECT_EQ(normalize_token("   "), "");
  EXPECT_EQ(normalize_token("Caf\xC3\xA9"), "caf\xC3\xA9");
}

TEST(Normalize, IsIdempotent) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "aBc Z\t\n-'xY  ";
  for (int i = 0; i < 2000; ++i) {
    std::string s;
    for (int k = rng() % 20; k > 0; --k) s.push_back(alphabet[rng() % alphabet.size()]);
    const std::string once = normalize_token(s);
    EXPECT_EQ(normalize_token(once), once);
  }
}

TEST(ParseResponses, DirectFieldMapping) {
  auto c = parse("cue,R1,R2,R3\nmother,love,care,home\n");
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.records[0].cue, "mother");
  EXPECT_EQ(c.records[0].responses, (std::vector<std::string>{"love", "care", "home"}));
  EXPECT_TRUE(c.errors.empty());
}

TEST(ParseResponses, EmptyCellsShortenTheList) {
  auto c = parse("cue,R1,R2,R3\nmother,love,,\n");
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.records[0].responses, std::vector<std::string>{"love"});
}

TEST(ParseResponses, EmptyCueIsSkippedAndReported) {
  auto c = parse("cue,R1,R2,R3\n,love,care,home\nmother,love,,\n");
  ASSERT_EQ(c.records.size(), 1u);
  ASSERT_EQ(c.errors.size(), 1u);
  EXPECT_EQ(c.errors[0].line, 2u);
}

TEST(ParseResponses, MissingHeaderIsFormatError) {
  EXPECT_THROW(parse("mother,love,care,home\n"), FormatError);
  EXPECT_THROW(parse(""), FormatError);
}

TEST(ParseResponses, NormalizesAndKeepsMultiWordResponses) {
  auto c = parse("cue,R1,R2,R3\n  Mother ,\"Ice  Cream\",LOVE,\n");
  ASSERT_EQ(c.records.size(), 1u);
  EXPECT_EQ(c.records[0].cue, "mother");
  EXPECT_EQ(c.records[0].responses, (std::vector<std::string>{"ice cream", "love"}));
}

TEST(ParseResponses, TrialIdsFromColumnOrSequence) {
  auto seq = parse("cue,R1,R2,R3\na,x,,\nb,y,,\na,z,,\n");
  EXPECT_EQ(seq.records[0].trial_id, 0);
  EXPECT_EQ(seq.records[1].trial_id, 0);
  EXPECT_EQ(seq.records[2].trial_id, 1);
  auto col = parse("cue,R1,R2,R3,trial_id\na,x,,,7\n");
  EXPECT_EQ(col.records[0].trial_id, 7);
}

TEST(ParseResponses, MissingTokensOption) {
  std::istringstream in("cue,R1,R2,R3\na,x,NA,No more responses\n");
  ResponseParseOptions opt{{"NA", "No more responses"}};
  auto c = parse_responses(in, Source::human, "<s>", opt);
  EXPECT_EQ(c.records[0].responses, std::vector<std::string>{"x"});
}

TEST(ParseResponses, CorpusRoundTrip) {
  auto c = parse("cue,R1,R2,R3\nmother,love,care,\nb,\"x, y\",,\n");
  std::ostringstream out;
  write_corpus(out, c);
  std::istringstream in(out.str());
  auto back = parse_responses(in, Source::human);
  ASSERT_EQ(back.records.size(), c.records.size());
  for (std::size_t i = 0; i < c.records.size(); ++i) {
    EXPECT_EQ(back.records[i].cue, c.records[i].cue);
    EXPECT_EQ(back.records[i].responses, c.records[i].responses);
    EXPECT_EQ(back.records[i].trial_id, c.records[i].trial_id);
  }
}

namespace {

MoralLexicon lexicon(const std::string& rows, LexiconKind kind) {
  std::istringstream in("word,care,fairness,loyalty,authority,sanctity\n" + rows);
  return parse_moral_lexicon(in, kind);
}

}  // namespace

TEST(MoralLexicon, HardDirectMapping) {
  auto lex = lexicon("kill,-1,0,0,0,0\n", LexiconKind::hard);
  ASSERT_TRUE(lex.contains("kill"));
  EXPECT_EQ(lex.entries.at("kill")[0], -1.0);
  EXPECT_EQ(lex.entries.at("kill")[1], 0.0);
}

TEST(MoralLexicon, HardRejectsFractionalScores) {
  try {
    lexicon("ok,1,0,0,0,0\nkill,-0.4,0,0,0,0\n", LexiconKind::hard);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
}

TEST(MoralLexicon, SoftAcceptsUnitInterval) {
  auto lex = lexicon("kill,-0.4,0.1,0,0,0\n", LexiconKind::soft);
  EXPECT_DOUBLE_EQ(*lex.entries.at("kill")[0], -0.4);
  EXPECT_THROW(lexicon("kill,-1.2,0,0,0,0\n", LexiconKind::soft), FormatError);
}

TEST(MoralLexicon, SoftEmptyCellMeansNoValue) {
  auto lex = lexicon("kill,-0.4,,,,\n", LexiconKind::soft);
  EXPECT_TRUE(lex.entries.at("kill")[0].has_value());
  EXPECT_FALSE(lex.entries.at("kill")[1].has_value());
}

TEST(MoralLexicon, RejectsDuplicatesAndBadHeaders) {
  EXPECT_THROW(lexicon("kill,-1,0,0,0,0\nKill,-1,0,0,0,0\n", LexiconKind::hard), FormatError);
  std::istringstream in("word,care\nkill,1\n");
  EXPECT_THROW(parse_moral_lexicon(in, LexiconKind::hard), FormatError);
}

// Generated rows: the parser must reject exactly the out-of-range ones.
TEST(MoralLexicon, RejectsExactlyTheOutOfRangeRows) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pool = {"-1", "0", "1", "0.5", "-0.25", "1.5", "-2", "0.999", "-1.0", "1e0"};
  auto in_hard = [](const std::string& s) { double v = std::stod(s); return v == -1 || v == 0 || v == 1; };
  auto in_soft = [](const std::string& s) { double v = std::stod(s); return v >= -1 && v <= 1; };
  for (int trial = 0; trial < 500; ++trial) {
    std::string row = "w";
    bool hard_ok = true, soft_ok = true;
    for (int d = 0; d < 5; ++d) {
      const std::string& v = pool[rng() % pool.size()];
      row += "," + v;
      hard_ok = hard_ok && in_hard(v);
      soft_ok = soft_ok && in_soft(v);
    }
    row += "\n";
    if (hard_ok) EXPECT_NO_THROW(lexicon(row, LexiconKind::hard)) << row;
    else EXPECT_THROW(lexicon(row, LexiconKind::hard), FormatError) << row;
    if (soft_ok) EXPECT_NO_THROW(lexicon(row, LexiconKind::soft)) << row;
    else EXPECT_THROW(lexicon(row, LexiconKind::soft), FormatError) << row;
  }
}

TEST(NormLexicon, RangeChecks) {
  std::istringstream ok("word,score\ngross,5.2\nspew,4\n");
  auto lex = parse_norm_lexicon(ok, NormKind::arousal);
  EXPECT_EQ(lex.entries.size(), 2u);
  EXPECT_DOUBLE_EQ(*lex.find("gross"), 5.2);
  std::istringstream bad("word,score\nrock,5.5\n");
  EXPECT_THROW(parse_norm_lexicon(bad, NormKind::concreteness), FormatError);
  std::istringstream low("word,score\nrock,0.5\n");
  EXPECT_THROW(parse_norm_lexicon(low, NormKind::arousal), FormatError);
}

TEST(Embeddings, CsvTable) {
  std::istringstream in("word,v1,v2\na,1,0\nB,0,1\n");
  auto t = parse_embeddings_csv(in);
  EXPECT_EQ(t.dimension, 2u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_TRUE(t.find("b").has_value());
  std::istringstream ragged("a,1,0\nb,1\n");
  EXPECT_THROW(parse_embeddings_csv(ragged), FormatError);
  std::istringstream zero("a,0,0\n");
  EXPECT_THROW(parse_embeddings_csv(zero), FormatError);
}

TEST(Embeddings, Word2VecBinary) {
  std::string blob = "2 3\n";
  auto add = [&](const std::string& w, std::array<float, 3> v) {
    blob += w + " ";
    blob.append(reinterpret_cast<const char*>(v.data()), sizeof(float) * 3);
    blob += "\n";
  };
  add("King", {1.f, 2.f, 3.f});
  add("queen", {0.5f, -1.f, 0.f});
  std::istringstream in(blob);
  auto t = parse_embeddings_word2vec(in);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t.words[0], "king");
  EXPECT_FLOAT_EQ(t.vector(1)[1], -1.f);
  std::unordered_set<std::string> keep{"queen"};
  std::istringstream in2(blob);
  EXPECT_EQ(parse_embeddings_word2vec(in2, "<s>", &keep).size(), 1u);
  std::istringstream truncated(blob.substr(0, blob.size() - 6));
  EXPECT_THROW(parse_embeddings_word2vec(truncated), FormatError);
}

TEST(TokenList, ReadsLabelsAndDeduplicates) {
  std::istringstream in("cue,pos\nKind,ADJ\nkind,ADJ\nhelp,VERB\n");
  auto l = read_token_list(in);
  EXPECT_EQ(l.tokens, (std::vector<std::string>{"kind", "help"}));
  EXPECT_EQ(l.labels, (std::vector<std::string>{"ADJ", "VERB"}));
}

TEST(Files, MissingPathIsIoError) {
  EXPECT_THROW(parse_responses("/nonexistent/x.csv", Source::human), IoError);
}
