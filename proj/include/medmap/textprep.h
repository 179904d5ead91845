#ifndef MEDMAP_TEXTPREP_H_
#define MEDMAP_TEXTPREP_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace medmap {

// Half-open byte range [begin, end) into a sentence or text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool Overlaps(const Span& other) const {
    return begin < other.end && other.begin < end;
  }
  auto operator<=>(const Span&) const = default;
};

enum class TokenKind { kWord, kNumber, kPunctuation };

struct Token {
  std::string surface;
  Span span;
  TokenKind kind = TokenKind::kWord;

  bool operator==(const Token&) const = default;
};

std::string_view TokenKindName(TokenKind kind);

// Word tokens start with a letter and run over letters, digits and
// combining marks ("HbA1c"). Number tokens start with a digit and may hold
// single '.' or ',' separators between digits ("7.2"). Every other
// non-space code point is a one-character punctuation token.
std::vector<Token> Tokenize(std::string_view sentence);

// ---------------------------------------------------------------------------
// Sentence splitting

struct SplitterConfig {
  // Boundary characters; a boundary needs whitespace (or end of text) after.
  std::string boundary_chars = ".!?;";
  // Lowercased whitespace-delimited chunks ending in a boundary character
  // that must not end a sentence, e.g. "pz.".
  std::set<std::string> protected_abbreviations;

  static SplitterConfig ForLanguage(std::string_view language);
};

// Sentence extents within `text`, trimmed of surrounding whitespace. The
// bytes between consecutive spans are whitespace only.
std::vector<Span> SentenceSpans(std::string_view text,
                                const SplitterConfig& config);

std::vector<std::string> SplitSentences(std::string_view text,
                                        const SplitterConfig& config);

// ---------------------------------------------------------------------------
// Documents

enum class Domain {
  kCardiology,
  kDiabetology,
  kHepatology,
  kNephrology,
  kOncology,
  kOther,
};

std::string_view DomainName(Domain domain);
// Throws ContractError for labels outside the closed set.
Domain ParseDomain(std::string_view label);
const std::vector<Domain>& AllDomains();

struct Document {
  std::string doc_id;
  Domain domain = Domain::kOther;
  std::string language;
  std::vector<std::string> sentences;

  bool operator==(const Document&) const = default;
};

// JSON Lines, one document per line with keys doc_id, domain, language,
// sentences. Blank lines are skipped.
std::vector<Document> ReadCorpus(std::istream& in,
                                 const std::string& source_name = "corpus");
void WriteCorpus(std::ostream& out, const std::vector<Document>& corpus);
std::string DocumentToJsonLine(const Document& doc);

// ---------------------------------------------------------------------------
// Normalization

enum class NormalizationTag { kAcronym, kAbbreviation, kMisspelling };

std::string_view NormalizationTagName(NormalizationTag tag);

class NormalizationTable {
 public:
  struct Entry {
    std::string surface;
    std::string replacement;
    NormalizationTag tag;
  };

  NormalizationTable() = default;

  // Rejects self-mappings, duplicate surfaces, empty sides, and
  // replacements that contain a table surface as a token subsequence
  // (a second pass would fire again).
  void Add(std::string surface, std::string replacement, NormalizationTag tag);

  // TSV: surface<TAB>replacement<TAB>tag. '#' lines are comments.
  static NormalizationTable Load(std::istream& in,
                                 const std::string& source_name = "table");

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  // Longest entry whose token surfaces equal tokens[pos, pos+n), if any.
  // Returns the entry index and n.
  std::optional<std::pair<std::size_t, std::size_t>> LongestMatch(
      const std::vector<Token>& tokens, std::size_t pos) const;

 private:
  std::vector<Entry> entries_;
  std::vector<std::vector<std::string>> keys_;
  // first key token -> entry indices, longest key first
  std::map<std::string, std::vector<std::size_t>> by_first_;
};

struct NormalizationEdit {
  std::size_t sentence = 0;
  Span span;  // in the sentence as it was before this edit's pass
  std::string before;
  std::string after;
  NormalizationTag tag = NormalizationTag::kMisspelling;

  bool operator==(const NormalizationEdit&) const = default;
};

struct NormalizationResult {
  Document document;
  std::vector<NormalizationEdit> log;
};

// Single leftmost-longest pass over one sentence.
std::string NormalizeSentencePass(std::string_view sentence,
                                  const NormalizationTable& table,
                                  std::size_t sentence_index,
                                  std::vector<NormalizationEdit>* log);

// Applies passes until a pass makes no replacement. Throws ContractError if
// the table fails to converge within (table size + 2) passes.
NormalizationResult Normalize(const Document& doc,
                              const NormalizationTable& table);

// ---------------------------------------------------------------------------
// Phrase chunking

struct Phrase {
  std::vector<std::string> words;  // surfaces as written
  std::vector<Span> spans;         // one per word, sentence byte offsets

  Span extent() const { return {spans.front().begin, spans.back().end}; }
};

struct ChunkerConfig {
  std::set<std::string> stopwords;  // normalized (lowercase) forms
  std::size_t max_phrase_words = 12;

  static ChunkerConfig ForLanguage(std::string_view language);
};

// Maximal runs of word tokens not interrupted by punctuation, numbers or
// stopwords; runs longer than max_phrase_words are cut into consecutive
// pieces of that length.
std::vector<Phrase> ChunkPhrases(std::string_view sentence,
                                 const ChunkerConfig& config);

// One entry per line; blank and '#' lines ignored.
std::set<std::string> LoadWordList(std::istream& in);

}  // namespace medmap

#endif  // MEDMAP_TEXTPREP_H_
