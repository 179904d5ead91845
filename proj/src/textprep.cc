#include "medmap/textprep.h"

#include <algorithm>
#include <istream>
#include <ostream>

#include "json.hpp"
#include "medmap/errors.h"
#include "medmap/unicode.h"

namespace medmap {

std::string_view TokenKindName(TokenKind kind) {
  switch (kind) {
    case TokenKind::kWord:
      return "word";
    case TokenKind::kNumber:
      return "number";
    case TokenKind::kPunctuation:
      return "punctuation";
  }
  return "?";
}

namespace {

CharClass PeekClass(std::string_view text, std::size_t pos, char32_t* cp,
                    std::size_t* next) {
  std::size_t p = pos;
  *cp = DecodeUtf8(text, &p);
  *next = p;
  return Classify(*cp);
}

}  // namespace

std::vector<Token> Tokenize(std::string_view sentence) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  while (pos < sentence.size()) {
    const std::size_t start = pos;
    char32_t cp;
    std::size_t next;
    const CharClass cls = PeekClass(sentence, pos, &cp, &next);
    pos = next;
    if (cls == CharClass::kSpace) continue;

    TokenKind kind = TokenKind::kPunctuation;
    if (cls == CharClass::kLetter) {
      kind = TokenKind::kWord;
      while (pos < sentence.size()) {
        const CharClass c = PeekClass(sentence, pos, &cp, &next);
        if (c != CharClass::kLetter && c != CharClass::kDigit &&
            c != CharClass::kMark) {
          break;
        }
        pos = next;
      }
    } else if (cls == CharClass::kDigit) {
      kind = TokenKind::kNumber;
      while (pos < sentence.size()) {
        const CharClass c = PeekClass(sentence, pos, &cp, &next);
        if (c == CharClass::kDigit || c == CharClass::kMark) {
          pos = next;
          continue;
        }
        if ((cp == U'.' || cp == U',') && next < sentence.size()) {
          char32_t after;
          std::size_t after_next;
          if (PeekClass(sentence, next, &after, &after_next) ==
              CharClass::kDigit) {
            pos = after_next;
            continue;
          }
        }
        break;
      }
    }
    tokens.push_back({std::string(sentence.substr(start, pos - start)),
                      {start, pos}, kind});
  }
  return tokens;
}

// ---------------------------------------------------------------------------

SplitterConfig SplitterConfig::ForLanguage(std::string_view language) {
  SplitterConfig config;
  if (language == "it") {
    config.protected_abbreviations = {
        "pz.",  "dott.", "dott.ssa", "dr.",  "prof.", "sig.", "sig.ra",
        "es.",  "cfr.",  "vs.",      "n.",   "nr.",   "pag.", "art.",
        "tel.", "ca.",   "sx.",      "dx.",  "p.es.", "rx.",  "ecg."};
  } else if (language == "en") {
    config.protected_abbreviations = {
        "dr.", "mr.",  "mrs.", "ms.",     "prof.", "e.g.", "i.e.",
        "vs.", "no.",  "pt.",  "approx.", "fig.",  "st.",  "cf."};
  }
  return config;
}

std::vector<Span> SentenceSpans(std::string_view text,
                                const SplitterConfig& config) {
  std::vector<Span> spans;
  auto is_space = [&](std::size_t pos) {
    std::size_t p = pos;
    return Classify(DecodeUtf8(text, &p)) == CharClass::kSpace;
  };
  auto skip_space = [&](std::size_t pos) {
    while (pos < text.size()) {
      std::size_t p = pos;
      if (Classify(DecodeUtf8(text, &p)) != CharClass::kSpace) break;
      pos = p;
    }
    return pos;
  };

  std::size_t start = skip_space(0);
  std::size_t chunk_start = start;  // first byte after the last whitespace
  std::size_t pos = start;
  while (pos < text.size()) {
    const char32_t cp = DecodeUtf8(text, &pos);
    if (Classify(cp) == CharClass::kSpace) {
      chunk_start = pos;
      continue;
    }
    if (cp >= 0x80 ||
        config.boundary_chars.find(static_cast<char>(cp)) == std::string::npos) {
      continue;
    }
    if (pos < text.size() && !is_space(pos)) continue;
    const std::string chunk =
        NormalizeTerm(text.substr(chunk_start, pos - chunk_start));
    if (config.protected_abbreviations.count(chunk)) continue;
    spans.push_back({start, pos});
    start = skip_space(pos);
    chunk_start = start;
    pos = start;
  }
  if (start < text.size()) {
    const std::string_view rest = TrimWhitespace(text.substr(start));
    if (!rest.empty()) spans.push_back({start, start + rest.size()});
  }
  return spans;
}

std::vector<std::string> SplitSentences(std::string_view text,
                                        const SplitterConfig& config) {
  std::vector<std::string> out;
  for (const Span& s : SentenceSpans(text, config)) {
    out.emplace_back(text.substr(s.begin, s.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view DomainName(Domain domain) {
  switch (domain) {
    case Domain::kCardiology:
      return "cardiology";
    case Domain::kDiabetology:
      return "diabetology";
    case Domain::kHepatology:
      return "hepatology";
    case Domain::kNephrology:
      return "nephrology";
    case Domain::kOncology:
      return "oncology";
    case Domain::kOther:
      return "other";
  }
  return "other";
}

const std::vector<Domain>& AllDomains() {
  static const std::vector<Domain> kAll = {
      Domain::kCardiology, Domain::kDiabetology, Domain::kHepatology,
      Domain::kNephrology, Domain::kOncology,    Domain::kOther};
  return kAll;
}

Domain ParseDomain(std::string_view label) {
  for (Domain d : AllDomains()) {
    if (DomainName(d) == label) return d;
  }
  throw ContractError("unknown clinical domain '" + std::string(label) + "'");
}

namespace {

Document DocumentFromJson(const nlohmann::json& j) {
  Document doc;
  doc.doc_id = j.at("doc_id").get<std::string>();
  doc.domain = ParseDomain(j.at("domain").get<std::string>());
  doc.language = j.at("language").get<std::string>();
  doc.sentences = j.at("sentences").get<std::vector<std::string>>();
  if (doc.doc_id.empty()) throw ContractError("empty doc_id");
  if (doc.language.empty()) throw ContractError("empty language");
  for (const auto& s : doc.sentences) {
    if (!IsValidUtf8(s)) throw ContractError("sentence is not valid UTF-8");
  }
  return doc;
}

}  // namespace

std::vector<Document> ReadCorpus(std::istream& in,
                                 const std::string& source_name) {
  std::vector<Document> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimWhitespace(line).empty()) continue;
    try {
      corpus.push_back(DocumentFromJson(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw RecordError(source_name, line_no, e.what());
    } catch (const ContractError& e) {
      throw RecordError(source_name, line_no, e.what());
    }
  }
  return corpus;
}

std::string DocumentToJsonLine(const Document& doc) {
  nlohmann::json j;
  j["doc_id"] = doc.doc_id;
  j["domain"] = std::string(DomainName(doc.domain));
  j["language"] = doc.language;
  j["sentences"] = doc.sentences;
  return j.dump();
}

void WriteCorpus(std::ostream& out, const std::vector<Document>& corpus) {
  for (const Document& doc : corpus) out << DocumentToJsonLine(doc) << '\n';
}

// ---------------------------------------------------------------------------

std::string_view NormalizationTagName(NormalizationTag tag) {
  switch (tag) {
    case NormalizationTag::kAcronym:
      return "acronym";
    case NormalizationTag::kAbbreviation:
      return "abbreviation";
    case NormalizationTag::kMisspelling:
      return "misspelling";
  }
  return "?";
}

namespace {

std::vector<std::string> TokenSurfaces(std::string_view text) {
  std::vector<std::string> out;
  for (Token& t : Tokenize(text)) out.push_back(std::move(t.surface));
  return out;
}

bool ContainsSubsequence(const std::vector<std::string>& hay,
                         const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) !=
         hay.end();
}

NormalizationTag ParseTag(std::string_view s) {
  if (s == "acronym") return NormalizationTag::kAcronym;
  if (s == "abbreviation") return NormalizationTag::kAbbreviation;
  if (s == "misspelling") return NormalizationTag::kMisspelling;
  throw ContractError("unknown normalization tag '" + std::string(s) + "'");
}

}  // namespace

void NormalizationTable::Add(std::string surface, std::string replacement,
                             NormalizationTag tag) {
  std::vector<std::string> key = TokenSurfaces(surface);
  const std::vector<std::string> repl = TokenSurfaces(replacement);
  if (key.empty()) throw ContractError("empty normalization surface");
  if (repl.empty()) {
    throw ContractError("empty replacement for '" + surface + "'");
  }
  if (key == repl) {
    throw ContractError("normalization entry maps '" + surface +
                        "' to itself");
  }
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i] == key) {
      throw ContractError("duplicate normalization surface '" + surface + "'");
    }
    if (ContainsSubsequence(TokenSurfaces(entries_[i].replacement), key)) {
      throw ContractError("replacement '" + entries_[i].replacement +
                          "' contains surface '" + surface + "'");
    }
  }
  for (const auto& k : keys_) {
    if (ContainsSubsequence(repl, k)) {
      throw ContractError("replacement '" + replacement +
                          "' contains a table surface");
    }
  }
  if (ContainsSubsequence(repl, key)) {
    throw ContractError("replacement '" + replacement + "' contains '" +
                        surface + "'");
  }

  const std::size_t index = entries_.size();
  entries_.push_back({std::move(surface), std::move(replacement), tag});
  auto& bucket = by_first_[key.front()];
  keys_.push_back(std::move(key));
  bucket.push_back(index);
  std::stable_sort(bucket.begin(), bucket.end(),
                   [this](std::size_t a, std::size_t b) {
                     return keys_[a].size() > keys_[b].size();
                   });
}

NormalizationTable NormalizationTable::Load(std::istream& in,
                                            const std::string& source_name) {
  NormalizationTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;
    const auto fields = SplitOn(line, '\t');
    if (fields.size() != 3) {
      throw RecordError(source_name, line_no,
                        "expected surface<TAB>replacement<TAB>tag");
    }
    try {
      table.Add(fields[0], fields[1], ParseTag(fields[2]));
    } catch (const ContractError& e) {
      throw RecordError(source_name, line_no, e.what());
    }
  }
  return table;
}

std::optional<std::pair<std::size_t, std::size_t>>
NormalizationTable::LongestMatch(const std::vector<Token>& tokens,
                                 std::size_t pos) const {
  const auto it = by_first_.find(tokens[pos].surface);
  if (it == by_first_.end()) return std::nullopt;
  for (std::size_t index : it->second) {
    const auto& key = keys_[index];
    if (pos + key.size() > tokens.size()) continue;
    bool match = true;
    for (std::size_t k = 1; k < key.size() && match; ++k) {
      match = tokens[pos + k].surface == key[k];
    }
    if (match) return std::make_pair(index, key.size());
  }
  return std::nullopt;
}

std::string NormalizeSentencePass(std::string_view sentence,
                                  const NormalizationTable& table,
                                  std::size_t sentence_index,
                                  std::vector<NormalizationEdit>* log) {
  const std::vector<Token> tokens = Tokenize(sentence);
  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    const auto match = table.LongestMatch(tokens, i);
    if (!match) {
      ++i;
      continue;
    }
    const auto& [index, length] = *match;
    const auto& entry = table.entries()[index];
    const Span span{tokens[i].span.begin, tokens[i + length - 1].span.end};
    out.append(sentence.substr(cursor, span.begin - cursor));
    out.append(entry.replacement);
    if (log) {
      log->push_back({sentence_index, span,
                      std::string(sentence.substr(span.begin, span.size())),
                      entry.replacement, entry.tag});
    }
    cursor = span.end;
    i += length;
  }
  out.append(sentence.substr(cursor));
  return out;
}

NormalizationResult Normalize(const Document& doc,
                              const NormalizationTable& table) {
  NormalizationResult result{doc, {}};
  if (table.empty()) return result;
  const std::size_t max_passes = table.size() + 2;
  for (std::size_t i = 0; i < result.document.sentences.size(); ++i) {
    std::string& sentence = result.document.sentences[i];
    for (std::size_t pass = 0;; ++pass) {
      if (pass == max_passes) {
        throw ContractError("normalization table does not converge on " +
                            doc.doc_id + " sentence " + std::to_string(i));
      }
      const std::size_t before = result.log.size();
      sentence = NormalizeSentencePass(sentence, table, i, &result.log);
      if (result.log.size() == before) break;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------

ChunkerConfig ChunkerConfig::ForLanguage(std::string_view language) {
  ChunkerConfig config;
  if (language == "it") {
    config.stopwords = {
        "il",   "lo",    "la",    "i",     "gli",   "le",    "l",
        "un",   "uno",   "una",   "di",    "a",     "da",    "in",
        "con",  "su",    "per",   "tra",   "fra",   "del",   "dello",
        "della", "dei",  "degli", "delle", "dell",  "al",    "allo",
        "alla", "ai",    "agli",  "alle",  "all",   "dal",   "dallo",
        "dalla", "dai",  "dagli", "dalle", "dall",  "nel",   "nello",
        "nella", "nei",  "negli", "nelle", "nell",  "sul",   "sullo",
        "sulla", "sui",  "sugli", "sulle", "sull",  "e",     "ed",
        "o",    "od",    "ma",    "non",   "che",   "se",    "come",
        "anche", "è",    "sono",  "si",    "ci",    "ne",    "mi",
        "più",  "meno",  "già",   "ancora", "né",   "senza", "dopo",
        "prima", "presenta", "presentava", "riferisce", "riferita",
        "lamenta", "rilevano", "rileva", "segnala", "noto", "nota",
        "paziente", "pz"};
  } else if (language == "en") {
    config.stopwords = {
        "a",     "an",    "the",   "of",    "in",    "on",    "at",
        "to",    "for",   "with",  "by",    "from",  "and",   "or",
        "but",   "not",   "no",    "is",    "are",   "was",   "were",
        "be",    "been",  "being", "this",  "that",  "these", "those",
        "as",    "into",  "than",  "then",  "there", "which", "who",
        "it",    "its",   "his",   "her",   "their", "has",   "have",
        "had",   "do",    "does",  "did",   "also",  "very",  "more",
        "less",  "after", "before", "without", "presents", "presented",
        "reports", "reported", "complains", "shows", "noted", "known",
        "patient"};
  }
  return config;
}

std::vector<Phrase> ChunkPhrases(std::string_view sentence,
                                 const ChunkerConfig& config) {
  std::vector<Phrase> phrases;
  Phrase current;
  const std::size_t limit = std::max<std::size_t>(1, config.max_phrase_words);
  auto flush = [&] {
    for (std::size_t i = 0; i < current.words.size(); i += limit) {
      const std::size_t end = std::min(current.words.size(), i + limit);
      Phrase piece;
      piece.words.assign(current.words.begin() + i, current.words.begin() + end);
      piece.spans.assign(current.spans.begin() + i, current.spans.begin() + end);
      phrases.push_back(std::move(piece));
    }
    current = Phrase{};
  };
  for (const Token& token : Tokenize(sentence)) {
    if (token.kind != TokenKind::kWord ||
        config.stopwords.count(NormalizeTerm(token.surface))) {
      flush();
      continue;
    }
    current.words.push_back(token.surface);
    current.spans.push_back(token.span);
  }
  flush();
  return phrases;
}

std::set<std::string> LoadWordList(std::istream& in) {
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const std::string_view w = TrimWhitespace(line);
    if (w.empty() || w.front() == '#') continue;
    words.insert(NormalizeTerm(w));
  }
  return words;
}

}  // namespace medmap
