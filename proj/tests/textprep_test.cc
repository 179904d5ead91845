#include "medmap/textprep.h"

#include <gtest/gtest.h>

#include <sstream>

#include "medmap/errors.h"
#include "medmap/unicode.h"

namespace medmap {
namespace {

std::vector<std::string> Surfaces(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const Token& t : tokens) out.push_back(t.surface);
  return out;
}

TEST(SplitSentencesTest, EmptyText) {
  EXPECT_TRUE(SplitSentences("", SplitterConfig::ForLanguage("it")).empty());
  EXPECT_TRUE(SplitSentences("  \n ", SplitterConfig::ForLanguage("it")).empty());
}

TEST(SplitSentencesTest, SplitsAtPeriodFollowedBySpace) {
  const auto s = SplitSentences("Edemi declivi. Dispnea da sforzo.",
                                SplitterConfig::ForLanguage("it"));
  EXPECT_EQ(s, (std::vector<std::string>{"Edemi declivi.", "Dispnea da sforzo."}));
}

TEST(SplitSentencesTest, ProtectedAbbreviationDoesNotSplit) {
  const auto s = SplitSentences("pz. con vertigini", SplitterConfig::ForLanguage("it"));
  EXPECT_EQ(s, (std::vector<std::string>{"pz. con vertigini"}));
  const auto upper = SplitSentences("Pz. con vertigini", SplitterConfig::ForLanguage("it"));
  EXPECT_EQ(upper.size(), 1u);
}

TEST(SplitSentencesTest, BoundaryNeedsFollowingSpace) {
  const auto s = SplitSentences("Hb 7.2 g/dl; PA 130/80! Bene?",
                                SplitterConfig::ForLanguage("it"));
  EXPECT_EQ(s, (std::vector<std::string>{"Hb 7.2 g/dl;", "PA 130/80!", "Bene?"}));
}

TEST(SplitSentencesTest, GapsBetweenSpansAreWhitespace) {
  const std::string text = "  Tosse.  Febbre serotina;\nNega dolore. ";
  const auto spans = SentenceSpans(text, SplitterConfig::ForLanguage("it"));
  ASSERT_EQ(spans.size(), 3u);
  std::size_t cursor = 0;
  for (const Span& s : spans) {
    EXPECT_TRUE(TrimWhitespace(text.substr(cursor, s.begin - cursor)).empty());
    cursor = s.end;
  }
  EXPECT_TRUE(TrimWhitespace(text.substr(cursor)).empty());
}

TEST(TokenizeTest, Words) {
  const auto tokens = Tokenize("stenosi vascolari");
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_EQ(tokens[0], (Token{"stenosi", {0, 7}, TokenKind::kWord}));
  EXPECT_EQ(tokens[1], (Token{"vascolari", {8, 17}, TokenKind::kWord}));
}

TEST(TokenizeTest, WordNumberPunctuation) {
  const auto tokens = Tokenize("HbA1c 7.2%");
  ASSERT_EQ(tokens.size(), 3u);
  EXPECT_EQ(tokens[0].surface, "HbA1c");
  EXPECT_EQ(tokens[0].kind, TokenKind::kWord);
  EXPECT_EQ(tokens[1].surface, "7.2");
  EXPECT_EQ(tokens[1].kind, TokenKind::kNumber);
  EXPECT_EQ(tokens[2].surface, "%");
  EXPECT_EQ(tokens[2].kind, TokenKind::kPunctuation);
}

TEST(TokenizeTest, EmptyAndAccents) {
  EXPECT_TRUE(Tokenize("").empty());
  const auto tokens = Tokenize("citt\xC3\xA0 e pi\xC3\xB9, 7.");
  EXPECT_EQ(Surfaces(tokens), (std::vector<std::string>{"citt\xC3\xA0", "e",
                                                        "pi\xC3\xB9", ",", "7", "."}));
}

TEST(TokenizeTest, SpansSliceTheSentence) {
  const std::string s = "PA 130/80, FC 72 bpm; SpO2 98%.";
  for (const Token& t : Tokenize(s)) {
    EXPECT_EQ(s.substr(t.span.begin, t.span.size()), t.surface);
  }
}

TEST(DocumentTest, JsonRoundTrip) {
  Document d{"doc-1", Domain::kHepatology, "it", {"Cirrosi epatica.", "Ascite."}};
  std::ostringstream out;
  WriteCorpus(out, {d, d});
  std::istringstream in(out.str());
  const auto back = ReadCorpus(in);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0], d);
}

TEST(DocumentTest, UnknownDomainNamesTheLine) {
  std::istringstream in(
      "{\"doc_id\":\"a\",\"domain\":\"oncology\",\"language\":\"it\",\"sentences\":[]}\n"
      "{\"doc_id\":\"b\",\"domain\":\"dermatology\",\"language\":\"it\",\"sentences\":[]}\n");
  try {
    ReadCorpus(in, "c.jsonl");
    FAIL() << "expected RecordError";
  } catch (const RecordError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(DomainTest, ClosedSet) {
  EXPECT_EQ(ParseDomain("nephrology"), Domain::kNephrology);
  EXPECT_EQ(DomainName(Domain::kOther), "other");
  EXPECT_THROW(ParseDomain("Cardiology "), ContractError);
  EXPECT_EQ(AllDomains().size(), 6u);
}

// --- normalization ---------------------------------------------------------

Document OneSentence(const std::string& s) { return {"d", Domain::kOther, "it", {s}}; }

TEST(NormalizeTest, EmptyTableIsIdentity) {
  const Document d = OneSentence("FA parossistica");
  const auto r = Normalize(d, NormalizationTable());
  EXPECT_EQ(r.document, d);
  EXPECT_TRUE(r.log.empty());
}

TEST(NormalizeTest, MisspellingReplaced) {
  NormalizationTable table;
  table.Add("edmea", "edema", NormalizationTag::kMisspelling);
  const auto r = Normalize(OneSentence("edmea declive"), table);
  EXPECT_EQ(r.document.sentences[0], "edema declive");
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.log[0], (NormalizationEdit{0, {0, 5}, "edmea", "edema",
                                         NormalizationTag::kMisspelling}));
}

TEST(NormalizeTest, LongestMatchWins) {
  NormalizationTable table;
  table.Add("IRC", "insufficienza renale cronica", NormalizationTag::kAcronym);
  table.Add("IRC terminale", "uremia", NormalizationTag::kAcronym);
  const auto r = Normalize(OneSentence("IRC terminale, IRC."), table);
  EXPECT_EQ(r.document.sentences[0], "uremia, insufficienza renale cronica.");
  EXPECT_EQ(r.log.size(), 2u);
}

TEST(NormalizeTest, MatchesWholeTokensOnly) {
  NormalizationTable table;
  table.Add("FA", "fibrillazione atriale", NormalizationTag::kAcronym);
  const auto r = Normalize(OneSentence("FANS e FA"), table);
  EXPECT_EQ(r.document.sentences[0], "FANS e fibrillazione atriale");
}

TEST(NormalizeTest, SecondPassChangesNothing) {
  NormalizationTable table;
  table.Add("pz", "paziente", NormalizationTag::kAbbreviation);
  table.Add("IMA", "infarto miocardico acuto", NormalizationTag::kAcronym);
  const auto once = Normalize(OneSentence("pz con IMA; pz stabile"), table);
  const auto twice = Normalize(once.document, table);
  EXPECT_EQ(twice.document, once.document);
  EXPECT_TRUE(twice.log.empty());
}

TEST(NormalizationTableTest, RejectsBadEntries) {
  NormalizationTable table;
  EXPECT_THROW(table.Add("edema", "edema", NormalizationTag::kMisspelling), ContractError);
  table.Add("pz", "paziente", NormalizationTag::kAbbreviation);
  EXPECT_THROW(table.Add("pz", "persona", NormalizationTag::kAbbreviation), ContractError);
  // A replacement holding a key would fire again on the next pass.
  EXPECT_THROW(table.Add("pzt", "pz trattato", NormalizationTag::kAbbreviation),
               ContractError);
  EXPECT_THROW(table.Add("", "x", NormalizationTag::kAbbreviation), ContractError);
}

TEST(NormalizationTableTest, LoadReportsLine) {
  std::istringstream in("# comment\nFA\tfibrillazione atriale\tacronym\nX\ty\tslang\n");
  try {
    NormalizationTable::Load(in, "norm.tsv");
    FAIL() << "expected RecordError";
  } catch (const RecordError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

// Ten sentences, three single-token entries: the log must hold one edit per
// token equal to a key, counted independently here.
TEST(NormalizeTest, LogCountMatchesTokenScan) {
  NormalizationTable table;
  table.Add("FA", "fibrillazione atriale", NormalizationTag::kAcronym);
  table.Add("pz", "paziente", NormalizationTag::kAbbreviation);
  table.Add("diabte", "diabete", NormalizationTag::kMisspelling);
  Document doc{"d", Domain::kCardiology, "it",
               {"pz con FA.", "FA parossistica in pz diabte.", "Nessuna novita.",
                "pz, pz e ancora pz", "FANS sospesi", "diabte mellito",
                "Controllo FA/FC", "nulla", "pz", "IRC e FA"}};
  std::size_t expected = 0;
  for (const std::string& s : doc.sentences) {
    for (const Token& t : Tokenize(s)) {
      expected += (t.surface == "FA" || t.surface == "pz" || t.surface == "diabte") ? 1 : 0;
    }
  }
  const auto r = Normalize(doc, table);
  EXPECT_EQ(r.log.size(), expected);
  EXPECT_EQ(expected, 12u);
}

// --- chunking --------------------------------------------------------------

std::vector<std::vector<std::string>> Chunk(const std::string& s,
                                            const ChunkerConfig& config) {
  std::vector<std::vector<std::string>> out;
  for (const Phrase& p : ChunkPhrases(s, config)) out.push_back(p.words);
  return out;
}

TEST(ChunkPhrasesTest, BreaksOnStopwordsAndPunctuation) {
  const auto config = ChunkerConfig::ForLanguage("it");
  EXPECT_EQ(Chunk("Paziente con edemi agli arti inferiori.", config),
            (std::vector<std::vector<std::string>>{{"edemi"}, {"arti", "inferiori"}}));
  EXPECT_EQ(Chunk("Diabete mellito tipo 2 in scarso compenso.", config),
            (std::vector<std::vector<std::string>>{
                {"Diabete", "mellito", "tipo"}, {"scarso", "compenso"}}));
}

TEST(ChunkPhrasesTest, LongRunsAreCut) {
  ChunkerConfig config;
  config.max_phrase_words = 3;
  const auto phrases = ChunkPhrases("a b c d e f g", config);
  ASSERT_EQ(phrases.size(), 3u);
  EXPECT_EQ(phrases[2].words, std::vector<std::string>{"g"});
  EXPECT_EQ(phrases[1].extent(), (Span{6, 11}));
}

TEST(ChunkPhrasesTest, StopwordsCompareNormalized) {
  const auto config = ChunkerConfig::ForLanguage("en");
  EXPECT_EQ(Chunk("The Patient presents WITH chest pain", config),
            (std::vector<std::vector<std::string>>{{"chest", "pain"}}));
}

}  // namespace
}  // namespace medmap
