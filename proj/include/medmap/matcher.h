#ifndef MEDMAP_MATCHER_H_
#define MEDMAP_MATCHER_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "medmap/textprep.h"
#include "medmap/thesaurus.h"
#include "medmap/variants.h"

namespace medmap {

enum class FilterMode { kRelaxed, kStrict };
enum class HeadPosition { kFirst, kLast };

std::string_view FilterModeName(FilterMode mode);
FilterMode ParseFilterMode(std::string_view name);

struct MatchOptions {
  bool ignore_word_order = false;
  FilterMode filter_mode = FilterMode::kStrict;
  int strict_threshold = 800;
  int relaxed_threshold = 0;
  HeadPosition head = HeadPosition::kLast;
  // Mapping construction enumerates every maximal disjoint candidate set
  // exactly up to this many candidates, and runs a beam search above it.
  std::size_t exact_enumeration_limit = 16;
  std::size_t beam_width = 64;

  // Threshold in force for the selected filter mode.
  int threshold() const {
    return filter_mode == FilterMode::kStrict ? strict_threshold
                                              : relaxed_threshold;
  }
  // Throws ConfigError on thresholds outside [0,1000], relaxed > strict, or
  // a zero beam width.
  void Validate() const;
};

struct Metrics {
  double centrality = 0;
  double variation = 0;
  double coverage = 0;
  double cohesiveness = 0;

  bool IsPerfect() const {
    return centrality == 1 && variation == 1 && coverage == 1 &&
           cohesiveness == 1;
  }
};

// round(1000 * (centrality + variation + 2 coverage + 2 cohesiveness) / 6),
// held below 1000 unless every metric is exactly 1.
int ScoreFromMetrics(const Metrics& m);

struct WordMatch {
  std::size_t phrase_pos = 0;
  std::size_t term_pos = 0;
  int distance = 0;

  auto operator<=>(const WordMatch&) const = default;
};

struct Candidate {
  StringId string_id = 0;
  std::string cui;
  std::size_t term_length = 0;
  std::vector<WordMatch> matches;  // ascending phrase_pos
  Metrics metrics;
  int score = 0;

  std::vector<std::size_t> matched_positions() const;
  std::vector<int> variant_distances() const;
};

struct Mapping {
  std::vector<Candidate> candidates;  // ascending first matched position
  Metrics metrics;
  int aggregate_score = 0;

  std::size_t positions_covered() const;
  std::vector<std::string> cuis() const;  // sorted
};

// Every string containing a variant of a phrase word, each aligned to the
// phrase: the largest set of (phrase word, term word) pairs, order
// preserving unless ignore_word_order. Ties go to the smaller total
// variant distance, then the better score. Sorted by string id; scores
// are not filled in.
std::vector<Candidate> RetrieveCandidates(
    const KnowledgeSource& ks, const std::vector<std::string>& phrase_words,
    const std::vector<std::vector<Variant>>& variants,
    const MatchOptions& options);

Metrics ComputeMetrics(const std::vector<const Candidate*>& parts,
                       std::size_t phrase_length, HeadPosition head);

Candidate EvaluateCandidate(Candidate candidate, std::size_t phrase_length,
                            const MatchOptions& options = {});

// Maximal sets of position-disjoint candidates, filtered by the mode's
// threshold and ranked by (score desc, positions covered desc, CUI set asc).
std::vector<Mapping> ConstructMappings(const std::vector<Candidate>& candidates,
                                       std::size_t phrase_length,
                                       const MatchOptions& options);

// Expand -> retrieve -> evaluate -> construct for one phrase (words as
// written; they are normalized the way the knowledge source terms are).
std::vector<Mapping> MapPhrase(const KnowledgeSource& ks,
                               const std::vector<std::string>& words,
                               const VariantGenerator& gen,
                               const MatchOptions& options);

struct Annotation {
  std::string doc_id;
  std::size_t sentence = 0;
  Span span;
  std::string surface;
  std::string cui;
  int score = 0;          // candidate score
  int mapping_score = 0;  // score of the mapping it came from
  std::string term;       // matched knowledge source string
  std::string language;

  bool operator==(const Annotation&) const = default;
};

struct PhraseAnalysis {
  std::size_t sentence = 0;
  Phrase phrase;
  std::vector<Mapping> mappings;
};

// Checks that document, generator and knowledge source agree on language.
void CheckLanguages(const KnowledgeSource& ks, const Document& doc,
                    const VariantGenerator& gen);

std::vector<PhraseAnalysis> AnalyzeDocument(const KnowledgeSource& ks,
                                            const Document& doc,
                                            const VariantGenerator& gen,
                                            const MatchOptions& options,
                                            const ChunkerConfig& chunker);

// One annotation per candidate of each phrase's top mapping, ordered by
// (sentence, span, cui).
std::vector<Annotation> Annotate(const KnowledgeSource& ks, const Document& doc,
                                 const VariantGenerator& gen,
                                 const MatchOptions& options,
                                 const ChunkerConfig& chunker);
std::vector<Annotation> Annotate(const KnowledgeSource& ks, const Document& doc,
                                 const VariantGenerator& gen,
                                 const MatchOptions& options = {});

std::string AnnotationToJsonLine(const Annotation& a);
std::vector<Annotation> ReadAnnotations(std::istream& in,
                                        const std::string& source_name = "annotations");
std::string MappingsToJsonLine(const std::string& doc_id,
                               const PhraseAnalysis& analysis,
                               const KnowledgeSource& ks);

}  // namespace medmap

#endif  // MEDMAP_MATCHER_H_
