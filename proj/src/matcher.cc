#include "medmap/matcher.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <tuple>

#include "json.hpp"
#include "medmap/errors.h"
#include "medmap/unicode.h"

namespace medmap {

std::string_view FilterModeName(FilterMode mode) {
  return mode == FilterMode::kStrict ? "strict" : "relaxed";
}

FilterMode ParseFilterMode(std::string_view name) {
  if (name == "strict") return FilterMode::kStrict;
  if (name == "relaxed") return FilterMode::kRelaxed;
  throw ConfigError("filter mode must be relaxed or strict, got '" +
                    std::string(name) + "'");
}

void MatchOptions::Validate() const {
  auto in_range = [](int t) { return t >= 0 && t <= 1000; };
  if (!in_range(strict_threshold) || !in_range(relaxed_threshold)) {
    throw ConfigError("score thresholds must lie in [0, 1000]");
  }
  if (relaxed_threshold > strict_threshold) {
    throw ConfigError("relaxed threshold exceeds strict threshold");
  }
  if (beam_width == 0) throw ConfigError("beam width must be positive");
}

int ScoreFromMetrics(const Metrics& m) {
  const double weighted =
      (m.centrality + m.variation + 2 * m.coverage + 2 * m.cohesiveness) / 6.0;
  // The metrics are small rationals; the epsilon keeps exact halves from
  // rounding down through representation error.
  int score = static_cast<int>(std::floor(1000.0 * weighted + 0.5 + 1e-9));
  score = std::clamp(score, 0, 1000);
  if (score == 1000 && !m.IsPerfect()) score = 999;
  return score;
}

std::vector<std::size_t> Candidate::matched_positions() const {
  std::vector<std::size_t> out;
  for (const WordMatch& m : matches) out.push_back(m.phrase_pos);
  return out;
}

std::vector<int> Candidate::variant_distances() const {
  std::vector<int> out;
  for (const WordMatch& m : matches) out.push_back(m.distance);
  return out;
}

std::size_t Mapping::positions_covered() const {
  std::size_t n = 0;
  for (const Candidate& c : candidates) n += c.matches.size();
  return n;
}

std::vector<std::string> Mapping::cuis() const {
  std::vector<std::string> out;
  for (const Candidate& c : candidates) out.push_back(c.cui);
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Metrics

namespace {

std::size_t HeadIndex(std::size_t phrase_length, HeadPosition head) {
  return head == HeadPosition::kLast ? phrase_length - 1 : 0;
}

// Sum of squared lengths of maximal runs of consecutive values in `sorted`.
double SquaredRuns(const std::vector<std::size_t>& sorted) {
  double total = 0;
  std::size_t run = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    run = (i > 0 && sorted[i] == sorted[i - 1] + 1) ? run + 1 : 1;
    const bool run_ends = i + 1 == sorted.size() || sorted[i + 1] != sorted[i] + 1;
    if (run_ends) total += static_cast<double>(run * run);
  }
  return total;
}

}  // namespace

Metrics ComputeMetrics(const std::vector<const Candidate*>& parts,
                       std::size_t phrase_length, HeadPosition head) {
  Metrics m;
  if (phrase_length == 0 || parts.empty()) return m;
  std::vector<std::size_t> phrase_positions;
  double term_length = 0;
  double term_matched = 0;
  double term_runs = 0;
  double variation_sum = 0;
  for (const Candidate* c : parts) {
    std::vector<std::size_t> term_positions;
    for (const WordMatch& w : c->matches) {
      phrase_positions.push_back(w.phrase_pos);
      term_positions.push_back(w.term_pos);
      variation_sum += 4.0 / (w.distance + 4.0);
    }
    std::sort(term_positions.begin(), term_positions.end());
    term_runs += SquaredRuns(term_positions);
    term_length += static_cast<double>(c->term_length);
    term_matched += static_cast<double>(c->matches.size());
  }
  std::sort(phrase_positions.begin(), phrase_positions.end());
  if (phrase_positions.empty() || term_length == 0) return m;

  const double n = static_cast<double>(phrase_length);
  const double k = static_cast<double>(phrase_positions.size());
  m.centrality = std::binary_search(phrase_positions.begin(),
                                    phrase_positions.end(),
                                    HeadIndex(phrase_length, head))
                     ? 1.0
                     : 0.0;
  m.variation = variation_sum / k;
  m.coverage = (k / n + term_matched / term_length) / 2.0;
  m.cohesiveness = (SquaredRuns(phrase_positions) / (n * n) +
                    term_runs / (term_length * term_length)) /
                   2.0;
  return m;
}

Candidate EvaluateCandidate(Candidate candidate, std::size_t phrase_length,
                            const MatchOptions& options) {
  candidate.metrics = ComputeMetrics({&candidate}, phrase_length, options.head);
  candidate.score = ScoreFromMetrics(candidate.metrics);
  return candidate;
}

// ---------------------------------------------------------------------------
// Retrieval

namespace {

struct Option {
  std::size_t term_pos;
  int distance;
};

// Depth-first search for the best word alignment of one term against the
// phrase. The node budget bounds pathological inputs (long runs of a
// repeated word); the first leaf reached is the greedy alignment.
class Aligner {
 public:
  Aligner(const std::vector<std::vector<Option>>& options, std::size_t term_length,
          bool ordered, HeadPosition head)
      : options_(options),
        term_length_(term_length),
        ordered_(ordered),
        head_(head),
        used_(term_length, false) {
    reachable_.assign(options_.size() + 1, 0);
    for (std::size_t p = options_.size(); p-- > 0;) {
      reachable_[p] = reachable_[p + 1] + (options_[p].empty() ? 0 : 1);
    }
  }

  std::vector<WordMatch> Run() {
    Search(0, 0);
    return best_;
  }

 private:
  static constexpr std::size_t kNodeBudget = 200000;

  void Search(std::size_t p, std::size_t next_term_pos) {
    if (++nodes_ > kNodeBudget && have_best_) return;
    if (have_best_ && current_.size() + reachable_[p] < best_.size()) return;
    if (p == options_.size()) {
      Consider();
      return;
    }
    for (const Option& o : options_[p]) {
      if (used_[o.term_pos] || (ordered_ && o.term_pos < next_term_pos)) continue;
      used_[o.term_pos] = true;
      current_.push_back({p, o.term_pos, o.distance});
      current_distance_ += o.distance;
      Search(p + 1, o.term_pos + 1);
      current_distance_ -= o.distance;
      current_.pop_back();
      used_[o.term_pos] = false;
    }
    Search(p + 1, next_term_pos);
  }

  void Consider() {
    if (current_.empty()) return;
    Candidate probe;
    probe.term_length = term_length_;
    probe.matches = current_;
    const int score = ScoreFromMetrics(
        ComputeMetrics({&probe}, options_.size(), head_));
    const auto key = std::make_tuple(current_.size(), -current_distance_, score);
    const auto best_key = std::make_tuple(best_.size(), -best_distance_, best_score_);
    if (!have_best_ || key > best_key || (key == best_key && current_ < best_)) {
      best_ = current_;
      best_distance_ = current_distance_;
      best_score_ = score;
      have_best_ = true;
    }
  }

  const std::vector<std::vector<Option>>& options_;
  std::size_t term_length_;
  bool ordered_;
  HeadPosition head_;
  std::vector<bool> used_;
  std::vector<std::size_t> reachable_;
  std::vector<WordMatch> current_;
  int current_distance_ = 0;
  std::vector<WordMatch> best_;
  int best_distance_ = 0;
  int best_score_ = 0;
  bool have_best_ = false;
  std::size_t nodes_ = 0;
};

}  // namespace

std::vector<Candidate> RetrieveCandidates(
    const KnowledgeSource& ks, const std::vector<std::string>& phrase_words,
    const std::vector<std::vector<Variant>>& variants,
    const MatchOptions& options) {
  const std::size_t n = phrase_words.size();
  if (variants.size() != n) {
    throw ContractError("variant sets must align with phrase words");
  }
  if (n == 0) return {};

  std::vector<std::map<std::string, int, std::less<>>> by_text(n);
  std::set<StringId> ids;
  for (std::size_t p = 0; p < n; ++p) {
    for (const Variant& v : variants[p]) {
      auto [it, inserted] = by_text[p].emplace(v.text, v.distance);
      if (!inserted) it->second = std::min(it->second, v.distance);
      for (StringId id : ks.LookupWord(v.text)) ids.insert(id);
    }
  }

  std::vector<Candidate> out;
  for (StringId id : ids) {
    const KsString& s = ks.string(id);
    std::vector<std::vector<Option>> opts(n);
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = 0; q < s.words.size(); ++q) {
        const auto it = by_text[p].find(s.words[q]);
        if (it != by_text[p].end()) opts[p].push_back({q, it->second});
      }
      std::stable_sort(opts[p].begin(), opts[p].end(),
                       [](const Option& a, const Option& b) {
                         return a.distance < b.distance;
                       });
    }
    Aligner aligner(opts, s.words.size(), !options.ignore_word_order, options.head);
    Candidate c;
    c.string_id = id;
    c.cui = s.cui;
    c.term_length = s.words.size();
    c.matches = aligner.Run();
    if (!c.matches.empty()) out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mapping construction

namespace {

using Mask = std::uint64_t;

Mask PositionMask(const Candidate& c) {
  Mask m = 0;
  for (const WordMatch& w : c.matches) m |= Mask{1} << w.phrase_pos;
  return m;
}

Mapping MakeMapping(const std::vector<const Candidate*>& members,
                    std::size_t phrase_length, HeadPosition head) {
  Mapping mapping;
  mapping.metrics = ComputeMetrics(members, phrase_length, head);
  mapping.aggregate_score = ScoreFromMetrics(mapping.metrics);
  for (const Candidate* c : members) mapping.candidates.push_back(*c);
  std::sort(mapping.candidates.begin(), mapping.candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              return std::make_tuple(a.matches.front().phrase_pos, a.string_id) <
                     std::make_tuple(b.matches.front().phrase_pos, b.string_id);
            });
  return mapping;
}

std::vector<StringId> SortedIds(const Mapping& m) {
  std::vector<StringId> ids;
  for (const Candidate& c : m.candidates) ids.push_back(c.string_id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool RanksBefore(const Mapping& a, const Mapping& b) {
  if (a.aggregate_score != b.aggregate_score) {
    return a.aggregate_score > b.aggregate_score;
  }
  if (a.positions_covered() != b.positions_covered()) {
    return a.positions_covered() > b.positions_covered();
  }
  const auto ca = a.cuis();
  const auto cb = b.cuis();
  if (ca != cb) return ca < cb;
  return SortedIds(a) < SortedIds(b);
}

// Member index sets, each ascending.
using Selection = std::vector<std::size_t>;

void EnumerateExact(const std::vector<Mask>& masks, std::size_t index,
                    Mask used, Selection* current, std::vector<Selection>* out) {
  if (index == masks.size()) {
    for (std::size_t i = 0; i < masks.size(); ++i) {
      if ((used & masks[i]) == 0) return;  // could still add i: not maximal
    }
    out->push_back(*current);
    return;
  }
  if ((used & masks[index]) == 0) {
    current->push_back(index);
    EnumerateExact(masks, index + 1, used | masks[index], current, out);
    current->pop_back();
  }
  EnumerateExact(masks, index + 1, used, current, out);
}

std::vector<Selection> EnumerateBeam(const std::vector<Candidate>& cands,
                                     const std::vector<Mask>& masks,
                                     std::size_t phrase_length,
                                     const MatchOptions& options) {
  // Visit candidates best first; ties by string id (the input order).
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cands[a].score > cands[b].score;
  });

  auto to_mapping = [&](const Selection& sel) {
    std::vector<const Candidate*> members;
    for (std::size_t i : sel) members.push_back(&cands[i]);
    return MakeMapping(members, phrase_length, options.head);
  };

  std::vector<std::pair<Selection, Mask>> beam = {{{}, 0}};
  for (std::size_t idx : order) {
    std::vector<std::pair<Selection, Mask>> next = beam;
    for (const auto& [sel, used] : beam) {
      if ((used & masks[idx]) != 0) continue;
      Selection grown = sel;
      grown.insert(std::upper_bound(grown.begin(), grown.end(), idx), idx);
      next.emplace_back(std::move(grown), used | masks[idx]);
    }
    if (next.size() > options.beam_width) {
      std::vector<std::pair<Mapping, std::size_t>> ranked;
      for (std::size_t i = 0; i < next.size(); ++i) {
        ranked.emplace_back(to_mapping(next[i].first), i);
      }
      std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return RanksBefore(a.first, b.first);
      });
      std::vector<std::pair<Selection, Mask>> kept;
      for (std::size_t i = 0; i < options.beam_width; ++i) {
        kept.push_back(std::move(next[ranked[i].second]));
      }
      next = std::move(kept);
    }
    beam = std::move(next);
  }

  // Complete each survivor greedily so that every output is maximal.
  std::set<Selection> unique;
  for (auto& [sel, used] : beam) {
    for (std::size_t idx : order) {
      if ((used & masks[idx]) == 0) {
        sel.insert(std::upper_bound(sel.begin(), sel.end(), idx), idx);
        used |= masks[idx];
      }
    }
    unique.insert(sel);
  }
  return {unique.begin(), unique.end()};
}

}  // namespace

std::vector<Mapping> ConstructMappings(const std::vector<Candidate>& candidates,
                                       std::size_t phrase_length,
                                       const MatchOptions& options) {
  if (candidates.empty()) return {};
  if (phrase_length == 0 || phrase_length > 64) {
    throw ContractError("phrase length must be in [1, 64]");
  }
  std::vector<Candidate> cands = candidates;
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return a.string_id < b.string_id;
  });
  std::vector<Mask> masks;
  for (const Candidate& c : cands) {
    if (c.matches.empty()) throw ContractError("candidate without matched words");
    for (const WordMatch& w : c.matches) {
      if (w.phrase_pos >= phrase_length) {
        throw ContractError("candidate position outside the phrase");
      }
    }
    masks.push_back(PositionMask(c));
  }

  std::vector<Selection> selections;
  if (cands.size() <= options.exact_enumeration_limit) {
    Selection current;
    EnumerateExact(masks, 0, 0, &current, &selections);
  } else {
    selections = EnumerateBeam(cands, masks, phrase_length, options);
  }

  std::vector<Mapping> mappings;
  const int threshold = options.threshold();
  for (const Selection& sel : selections) {
    std::vector<const Candidate*> members;
    for (std::size_t i : sel) members.push_back(&cands[i]);
    Mapping m = MakeMapping(members, phrase_length, options.head);
    if (m.aggregate_score >= threshold) mappings.push_back(std::move(m));
  }
  std::sort(mappings.begin(), mappings.end(), RanksBefore);
  return mappings;
}

std::vector<Mapping> MapPhrase(const KnowledgeSource& ks,
                               const std::vector<std::string>& words,
                               const VariantGenerator& gen,
                               const MatchOptions& options) {
  if (words.empty()) return {};
  std::vector<std::string> normalized;
  for (const std::string& w : words) normalized.push_back(ks.Normalize(w));
  const auto variants = ExpandPhrase(normalized, gen);
  auto candidates = RetrieveCandidates(ks, normalized, variants, options);
  for (Candidate& c : candidates) {
    c = EvaluateCandidate(std::move(c), normalized.size(), options);
  }
  return ConstructMappings(candidates, normalized.size(), options);
}

// ---------------------------------------------------------------------------
// Pipeline

void CheckLanguages(const KnowledgeSource& ks, const Document& doc,
                    const VariantGenerator& gen) {
  if (doc.language != ks.language() || gen.language() != ks.language()) {
    throw ConfigError("language mismatch: document " + doc.doc_id + " is '" +
                      doc.language + "', variant generator '" + gen.language() +
                      "', knowledge source '" + ks.language() + "'");
  }
}

std::vector<PhraseAnalysis> AnalyzeDocument(const KnowledgeSource& ks,
                                            const Document& doc,
                                            const VariantGenerator& gen,
                                            const MatchOptions& options,
                                            const ChunkerConfig& chunker) {
  options.Validate();
  CheckLanguages(ks, doc, gen);
  std::vector<PhraseAnalysis> out;
  for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
    for (Phrase& phrase : ChunkPhrases(doc.sentences[i], chunker)) {
      PhraseAnalysis a{i, std::move(phrase), {}};
      a.mappings = MapPhrase(ks, a.phrase.words, gen, options);
      out.push_back(std::move(a));
    }
  }
  return out;
}

std::vector<Annotation> Annotate(const KnowledgeSource& ks, const Document& doc,
                                 const VariantGenerator& gen,
                                 const MatchOptions& options,
                                 const ChunkerConfig& chunker) {
  std::vector<Annotation> out;
  for (const PhraseAnalysis& a : AnalyzeDocument(ks, doc, gen, options, chunker)) {
    if (a.mappings.empty()) continue;
    const Mapping& top = a.mappings.front();
    const std::string& sentence = doc.sentences[a.sentence];
    for (const Candidate& c : top.candidates) {
      const auto positions = c.matched_positions();
      const auto [lo, hi] = std::minmax_element(positions.begin(), positions.end());
      const Span span{a.phrase.spans[*lo].begin, a.phrase.spans[*hi].end};
      Annotation ann;
      ann.doc_id = doc.doc_id;
      ann.sentence = a.sentence;
      ann.span = span;
      ann.surface = sentence.substr(span.begin, span.size());
      ann.cui = c.cui;
      ann.score = c.score;
      ann.mapping_score = top.aggregate_score;
      ann.term = ks.string(c.string_id).display;
      ann.language = ks.language();
      out.push_back(std::move(ann));
    }
  }
  std::sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) {
    return std::tie(a.sentence, a.span, a.cui) < std::tie(b.sentence, b.span, b.cui);
  });
  return out;
}

std::vector<Annotation> Annotate(const KnowledgeSource& ks, const Document& doc,
                                 const VariantGenerator& gen,
                                 const MatchOptions& options) {
  return Annotate(ks, doc, gen, options, ChunkerConfig::ForLanguage(doc.language));
}

// ---------------------------------------------------------------------------
// Serialization

std::string AnnotationToJsonLine(const Annotation& a) {
  nlohmann::ordered_json j;
  j["doc_id"] = a.doc_id;
  j["sentence"] = a.sentence;
  j["start"] = a.span.begin;
  j["end"] = a.span.end;
  j["surface"] = a.surface;
  j["cui"] = a.cui;
  j["score"] = a.score;
  j["mapping_score"] = a.mapping_score;
  j["term"] = a.term;
  j["language"] = a.language;
  return j.dump();
}

std::vector<Annotation> ReadAnnotations(std::istream& in,
                                        const std::string& source_name) {
  std::vector<Annotation> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (TrimWhitespace(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Annotation a;
      a.doc_id = j.at("doc_id").get<std::string>();
      a.sentence = j.at("sentence").get<std::size_t>();
      a.span = {j.at("start").get<std::size_t>(), j.at("end").get<std::size_t>()};
      a.cui = j.at("cui").get<std::string>();
      a.surface = j.value("surface", std::string());
      a.score = j.value("score", 0);
      a.mapping_score = j.value("mapping_score", a.score);
      a.term = j.value("term", std::string());
      a.language = j.value("language", std::string());
      if (a.span.begin >= a.span.end) {
        throw RecordError(source_name, line_no, "empty or inverted span");
      }
      if (!IsWellFormedCui(a.cui)) {
        throw RecordError(source_name, line_no, "malformed CUI '" + a.cui + "'");
      }
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw RecordError(source_name, line_no, e.what());
    }
  }
  return out;
}

std::string MappingsToJsonLine(const std::string& doc_id,
                               const PhraseAnalysis& analysis,
                               const KnowledgeSource& ks) {
  nlohmann::ordered_json j;
  j["doc_id"] = doc_id;
  j["sentence"] = analysis.sentence;
  j["start"] = analysis.phrase.extent().begin;
  j["end"] = analysis.phrase.extent().end;
  j["words"] = analysis.phrase.words;
  auto mappings = nlohmann::ordered_json::array();
  for (const Mapping& m : analysis.mappings) {
    nlohmann::ordered_json jm;
    jm["score"] = m.aggregate_score;
    auto cands = nlohmann::ordered_json::array();
    for (const Candidate& c : m.candidates) {
      nlohmann::ordered_json jc;
      jc["cui"] = c.cui;
      jc["term"] = ks.string(c.string_id).display;
      jc["positions"] = c.matched_positions();
      jc["distances"] = c.variant_distances();
      jc["score"] = c.score;
      jc["metrics"] = {{"centrality", c.metrics.centrality},
                       {"variation", c.metrics.variation},
                       {"coverage", c.metrics.coverage},
                       {"cohesiveness", c.metrics.cohesiveness}};
      cands.push_back(std::move(jc));
    }
    jm["candidates"] = std::move(cands);
    mappings.push_back(std::move(jm));
  }
  j["mappings"] = std::move(mappings);
  return j.dump();
}

}  // namespace medmap
