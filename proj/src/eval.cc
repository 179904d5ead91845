#include "medmap/eval.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <sstream>
#include <tuple>

#include "json.hpp"
#include "medmap/unicode.h"

namespace medmap {

namespace {

std::size_t ParseIndex(const std::string& field, const std::string& source,
                       std::size_t line_no, const char* what) {
  std::size_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw RecordError(source, line_no,
                      std::string("bad ") + what + " '" + field + "'");
  }
  return value;
}

bool ParseBool(const std::string& field, const std::string& source,
               std::size_t line_no) {
  if (field == "Y" || field == "1" || field == "true") return true;
  if (field == "N" || field == "0" || field == "false") return false;
  throw RecordError(source, line_no, "bad in_meta flag '" + field + "'");
}

// Gold span with surrounding whitespace of the surface removed.
Span TrimmedSpan(const GoldAnnotation& g) {
  const std::string_view trimmed = TrimWhitespace(g.surface);
  if (trimmed.empty() || g.surface.size() != g.span.size()) return g.span;
  const std::size_t lead =
      static_cast<std::size_t>(trimmed.data() - g.surface.data());
  return {g.span.begin + lead, g.span.begin + lead + trimmed.size()};
}

std::vector<std::string> WordsOf(std::string_view text) {
  std::vector<std::string> out;
  for (Token& t : Tokenize(text)) {
    if (t.kind != TokenKind::kPunctuation) out.push_back(std::move(t.surface));
  }
  return out;
}

}  // namespace

std::vector<GoldAnnotation> ReadGold(std::istream& in,
                                     const std::string& source_name) {
  std::vector<GoldAnnotation> gold;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;
    const auto f = SplitOn(line, '\t');
    if (f.size() != 8) throw RecordError(source_name, line_no, "expected 8 fields");
    GoldAnnotation g;
    g.doc_id = f[0];
    g.sentence = ParseIndex(f[1], source_name, line_no, "sentence index");
    g.span = {ParseIndex(f[2], source_name, line_no, "start"),
              ParseIndex(f[3], source_name, line_no, "end")};
    g.surface = f[4];
    g.cui = f[5];
    try {
      g.domain = ParseDomain(f[6]);
    } catch (const ContractError& e) {
      throw RecordError(source_name, line_no, e.what());
    }
    g.in_metathesaurus = ParseBool(f[7], source_name, line_no);
    if (!IsWellFormedCui(g.cui)) {
      throw RecordError(source_name, line_no, "malformed CUI '" + g.cui + "'");
    }
    if (g.span.begin >= g.span.end) {
      throw RecordError(source_name, line_no, "empty or inverted span");
    }
    if (g.span.size() != g.surface.size()) {
      throw RecordError(source_name, line_no,
                        "span length differs from the surface length");
    }
    gold.push_back(std::move(g));
  }
  return gold;
}

std::string FormatGoldLine(const GoldAnnotation& g) {
  std::ostringstream out;
  out << g.doc_id << '\t' << g.sentence << '\t' << g.span.begin << '\t'
      << g.span.end << '\t' << g.surface << '\t' << g.cui << '\t'
      << DomainName(g.domain) << '\t' << (g.in_metathesaurus ? 'Y' : 'N');
  return out.str();
}

void CheckGoldAgainstCorpus(const std::vector<GoldAnnotation>& gold,
                            const std::vector<Document>& corpus) {
  std::map<std::string, const Document*> docs;
  for (const Document& d : corpus) docs[d.doc_id] = &d;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const GoldAnnotation& g = gold[i];
    const std::string where = "gold row " + std::to_string(i) + " (" + g.doc_id +
                              ":" + std::to_string(g.sentence) + ")";
    const auto it = docs.find(g.doc_id);
    if (it == docs.end()) throw ContractError(where + ": unknown document");
    const Document& d = *it->second;
    if (g.sentence >= d.sentences.size()) {
      throw ContractError(where + ": no such sentence");
    }
    const std::string& s = d.sentences[g.sentence];
    if (g.span.end > s.size() ||
        s.compare(g.span.begin, g.span.size(), g.surface) != 0) {
      throw ContractError(where + ": span does not match surface '" +
                          g.surface + "'");
    }
    if (g.domain != d.domain) {
      throw ContractError(where + ": domain differs from the document's");
    }
  }
}

std::vector<CoverageInput> CoverageInputs(const std::vector<GoldAnnotation>& gold) {
  std::vector<CoverageInput> out;
  out.reserve(gold.size());
  for (const GoldAnnotation& g : gold) out.push_back({g.cui, g.domain});
  return out;
}

// ---------------------------------------------------------------------------

std::string_view VerdictName(Verdict v) {
  switch (v) {
    case Verdict::kExact:
      return "exact";
    case Verdict::kBoundary:
      return "boundary";
    case Verdict::kWordSenseAmbiguity:
      return "word_sense_ambiguity";
    case Verdict::kMissedTerm:
      return "missed_term";
  }
  return "?";
}

const std::vector<Verdict>& AllVerdicts() {
  static const std::vector<Verdict> kAll = {Verdict::kExact, Verdict::kBoundary,
                                            Verdict::kWordSenseAmbiguity,
                                            Verdict::kMissedTerm};
  return kAll;
}

MatchVerdict ClassifyMatch(const GoldAnnotation& gold,
                           const std::vector<Annotation>& system) {
  MatchVerdict out{gold, Verdict::kMissedTerm, {}};
  const Span span = TrimmedSpan(gold);
  bool full_span = false;
  bool full_span_cui = false;
  for (const Annotation& a : system) {
    if (a.doc_id != gold.doc_id || a.sentence != gold.sentence ||
        !a.span.Overlaps(span)) {
      continue;
    }
    out.system.push_back(a);
    if (a.span == span) {
      full_span = true;
      full_span_cui |= a.cui == gold.cui;
    }
  }
  if (full_span_cui) {
    out.verdict = Verdict::kExact;
  } else if (full_span) {
    out.verdict = Verdict::kWordSenseAmbiguity;
  } else if (!out.system.empty()) {
    out.verdict = Verdict::kBoundary;
  }
  return out;
}

std::vector<MatchVerdict> ClassifyAll(const std::vector<GoldAnnotation>& gold,
                                      const std::vector<Annotation>& system) {
  std::map<std::pair<std::string, std::size_t>, std::vector<Annotation>> by_sentence;
  for (const Annotation& a : system) by_sentence[{a.doc_id, a.sentence}].push_back(a);
  static const std::vector<Annotation> kNone;
  std::vector<MatchVerdict> out;
  out.reserve(gold.size());
  for (const GoldAnnotation& g : gold) {
    const auto it = by_sentence.find({g.doc_id, g.sentence});
    out.push_back(ClassifyMatch(g, it == by_sentence.end() ? kNone : it->second));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view RecallDenominatorName(RecallDenominator d) {
  return d == RecallDenominator::kAll ? "all" : "in-meta";
}

RecallDenominator ParseRecallDenominator(std::string_view name) {
  if (name == "all") return RecallDenominator::kAll;
  if (name == "in-meta") return RecallDenominator::kInMetathesaurus;
  throw ConfigError("recall denominator must be all or in-meta, got '" +
                    std::string(name) + "'");
}

std::optional<double> FMeasure(std::optional<double> precision,
                               std::optional<double> recall, double alpha) {
  if (!precision || !recall) return std::nullopt;
  if (*precision == 0 || *recall == 0) return 0.0;
  return 1.0 / (alpha / *precision + (1.0 - alpha) / *recall);
}

namespace {

void FinishRow(MetricsRow* row, double alpha) {
  if (row->gold_total > 0) {
    row->recall = static_cast<double>(row->exact) / static_cast<double>(row->gold_total);
  }
  if (row->parsed_total > 0) {
    row->precision =
        static_cast<double>(row->exact) / static_cast<double>(row->parsed_total);
  }
  row->f_measure = FMeasure(row->precision, row->recall, alpha);
}

}  // namespace

MetricsReport ComputeMetricsReport(
    const std::vector<MatchVerdict>& verdicts,
    const std::map<Domain, std::size_t>& system_counts,
    const MetricsOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw ContractError("alpha must lie in (0, 1)");
  }
  MetricsReport report;
  report.alpha = options.alpha;
  report.denominator = options.denominator;
  for (const MatchVerdict& v : verdicts) {
    if (options.denominator == RecallDenominator::kInMetathesaurus &&
        !v.gold.in_metathesaurus) {
      continue;
    }
    for (MetricsRow* row : {&report.by_domain[v.gold.domain], &report.overall}) {
      ++row->gold_total;
      if (v.verdict == Verdict::kExact) ++row->exact;
      if (v.verdict == Verdict::kExact ||
          v.verdict == Verdict::kWordSenseAmbiguity) {
        ++row->parsed_total;
      }
    }
  }
  for (const auto& [domain, count] : system_counts) {
    report.by_domain[domain].system_total += count;
    report.overall.system_total += count;
  }
  for (auto& [domain, row] : report.by_domain) FinishRow(&row, options.alpha);
  FinishRow(&report.overall, options.alpha);
  return report;
}

std::map<Domain, std::size_t> CountSystemAnnotations(
    const std::vector<Annotation>& system, const std::vector<Document>& corpus) {
  std::map<std::string, Domain> domains;
  for (const Document& d : corpus) domains[d.doc_id] = d.domain;
  std::map<Domain, std::size_t> counts;
  for (const Annotation& a : system) {
    const auto it = domains.find(a.doc_id);
    ++counts[it == domains.end() ? Domain::kOther : it->second];
  }
  return counts;
}

// ---------------------------------------------------------------------------

PreferredTermBreakdown ComputePreferredTermBreakdown(
    const std::vector<MatchVerdict>& verdicts, const KnowledgeSource& ks) {
  PreferredTermBreakdown out;
  for (const MatchVerdict& v : verdicts) {
    if (v.verdict != Verdict::kExact) continue;
    const auto preferred = ks.PreferredTerm(v.gold.cui);
    const bool is_preferred =
        preferred && *preferred == ks.Normalize(TrimWhitespace(v.gold.surface));
    for (PreferredTermRow* row : {&out.by_domain[v.gold.domain], &out.overall}) {
      ++(is_preferred ? row->preferred : row->other);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

std::optional<double> InterAnnotatorAgreement(
    const std::vector<GoldAnnotation>& a, const std::vector<GoldAnnotation>& b) {
  using Key = std::tuple<std::string, std::size_t, std::size_t, std::size_t>;
  auto index = [](const std::vector<GoldAnnotation>& rows, const char* who) {
    std::map<Key, std::string> out;
    for (const GoldAnnotation& g : rows) {
      if (!out.emplace(Key{g.doc_id, g.sentence, g.span.begin, g.span.end}, g.cui)
               .second) {
        throw ContractError(std::string("annotator ") + who +
                            " labels a mention twice: " + g.doc_id);
      }
    }
    return out;
  };
  const auto ia = index(a, "A");
  const auto ib = index(b, "B");
  std::vector<std::string> orphans;
  auto describe = [](const Key& k, const char* who) {
    return std::string(who) + ":" + std::get<0>(k) + ":" +
           std::to_string(std::get<1>(k)) + ":" + std::to_string(std::get<2>(k)) +
           "-" + std::to_string(std::get<3>(k));
  };
  for (const auto& [k, cui] : ia) {
    if (!ib.count(k)) orphans.push_back(describe(k, "A"));
  }
  for (const auto& [k, cui] : ib) {
    if (!ia.count(k)) orphans.push_back(describe(k, "B"));
  }
  if (!orphans.empty()) {
    throw AlignmentError("annotator mention sets differ (" +
                             std::to_string(orphans.size()) + " orphans, first " +
                             orphans.front() + ")",
                         orphans);
  }
  if (ia.empty()) return std::nullopt;
  std::size_t same = 0;
  for (const auto& [k, cui] : ia) same += ib.at(k) == cui ? 1 : 0;
  return static_cast<double>(same) / static_cast<double>(ia.size());
}

// ---------------------------------------------------------------------------

std::string_view FailureReasonName(FailureReasonKind r) {
  switch (r) {
    case FailureReasonKind::kNoVariantsGeneration:
      return "no_variants_generation";
    case FailureReasonKind::kBadTranslation:
      return "bad_translation";
    case FailureReasonKind::kMedicalSlang:
      return "medical_slang";
    case FailureReasonKind::kOther:
      return "other";
  }
  return "?";
}

const std::vector<FailureReasonKind>& AllFailureReasons() {
  static const std::vector<FailureReasonKind> kAll = {
      FailureReasonKind::kNoVariantsGeneration, FailureReasonKind::kBadTranslation,
      FailureReasonKind::kMedicalSlang, FailureReasonKind::kOther};
  return kAll;
}

FailureReasonKind ParseFailureReason(std::string_view name) {
  for (FailureReasonKind r : AllFailureReasons()) {
    if (FailureReasonName(r) == name) return r;
  }
  throw ContractError("unknown failure reason '" + std::string(name) + "'");
}

FailureReason SuggestFailureReason(const MatchVerdict& verdict,
                                   const ReasonContext& context) {
  if (verdict.verdict == Verdict::kExact) {
    throw ContractError("failure reasons apply to non-exact verdicts only");
  }
  if (!context.ks) throw ConfigError("failure reasons need a knowledge source");
  FailureReason out{verdict, FailureReasonKind::kOther, "", false};
  const GoldAnnotation& gold = verdict.gold;
  const std::vector<std::string> words = WordsOf(gold.surface);

  if (context.alt_generator && !words.empty()) {
    const auto mappings =
        MapPhrase(*context.ks, words, *context.alt_generator, context.options);
    if (!mappings.empty()) {
      const Mapping& top = mappings.front();
      const bool exact = top.candidates.size() == 1 &&
                         top.candidates[0].cui == gold.cui &&
                         top.candidates[0].matches.size() == words.size();
      if (exact) {
        out.reason = FailureReasonKind::kNoVariantsGeneration;
        out.evidence = "variant re-run maps '" + gold.surface + "' to " +
                       gold.cui + " (score " +
                       std::to_string(top.candidates[0].score) + ")";
        return out;
      }
    }
  }

  if (context.back_glossary && context.source_ks) {
    const auto preferred = context.source_ks->PreferredTerm(gold.cui);
    if (preferred) {
      const std::string back = context.back_glossary->TranslateSentence(gold.surface);
      std::vector<std::string> back_words;
      for (const std::string& w : WordsOf(back)) {
        back_words.push_back(context.source_ks->Normalize(w));
      }
      const std::vector<std::string> pref_words = WordsOf(*preferred);
      const bool contains =
          !pref_words.empty() &&
          std::search(back_words.begin(), back_words.end(), pref_words.begin(),
                      pref_words.end()) != back_words.end();
      if (!contains) {
        out.reason = FailureReasonKind::kBadTranslation;
        out.evidence = "'" + gold.surface + "' back-translates to '" + back +
                       "', lacking '" + *preferred + "'";
        return out;
      }
    }
  }

  if (context.slang.count(NormalizeTerm(TrimWhitespace(gold.surface)))) {
    out.reason = FailureReasonKind::kMedicalSlang;
    out.evidence = "'" + gold.surface + "' is on the slang list";
    return out;
  }
  out.evidence = "no check explains the failure";
  return out;
}

ReasonOverrides ReadReasonOverrides(std::istream& in,
                                    const std::string& source_name) {
  ReasonOverrides out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;
    const auto f = SplitOn(line, '\t');
    if (f.size() != 5) throw RecordError(source_name, line_no, "expected 5 fields");
    try {
      out[{f[0], ParseIndex(f[1], source_name, line_no, "sentence"),
           ParseIndex(f[2], source_name, line_no, "start"),
           ParseIndex(f[3], source_name, line_no, "end")}] = ParseFailureReason(f[4]);
    } catch (const RecordError&) {
      throw;
    } catch (const ContractError& e) {
      throw RecordError(source_name, line_no, e.what());
    }
  }
  return out;
}

void ApplyOverrides(const ReasonOverrides& overrides,
                    std::vector<FailureReason>* reasons) {
  for (FailureReason& r : *reasons) {
    const GoldAnnotation& g = r.verdict.gold;
    const auto it = overrides.find({g.doc_id, g.sentence, g.span.begin, g.span.end});
    if (it == overrides.end()) continue;
    r.reason = it->second;
    r.overridden = true;
    r.evidence = "manual override";
  }
}

FailureProfile ComputeFailureProfile(const std::vector<FailureReason>& reasons) {
  FailureProfile profile;
  for (const FailureReason& r : reasons) {
    const Verdict v = r.verdict.verdict;
    for (FailureProfileRow* row :
         {&profile.by_domain[r.verdict.gold.domain], &profile.overall}) {
      ++row->failures;
      ++row->by_verdict[v].count;
      ++row->by_reason[r.reason].count;
      ++row->cross[{v, r.reason}].count;
    }
  }
  auto finish = [](FailureProfileRow& row) {
    for (auto& [k, cell] : row.by_verdict) cell.percent = RoundedPercent(cell.count, row.failures);
    for (auto& [k, cell] : row.by_reason) cell.percent = RoundedPercent(cell.count, row.failures);
    for (auto& [k, cell] : row.cross) cell.percent = RoundedPercent(cell.count, row.failures);
  };
  for (auto& [d, row] : profile.by_domain) finish(row);
  finish(profile.overall);
  return profile;
}

// ---------------------------------------------------------------------------

std::string FormatMetric(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *value);
  return buf;
}

std::string FormatPercent(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", *value);
  return buf;
}

namespace {

using ojson = nlohmann::ordered_json;

ojson OptionalJson(std::optional<double> v) {
  return v ? ojson(*v) : ojson(nullptr);
}

ojson MetricsRowJson(const MetricsRow& r) {
  ojson j;
  j["exact"] = r.exact;
  j["gold_total"] = r.gold_total;
  j["parsed_total"] = r.parsed_total;
  j["system_total"] = r.system_total;
  j["recall"] = OptionalJson(r.recall);
  j["precision"] = OptionalJson(r.precision);
  j["f_measure"] = OptionalJson(r.f_measure);
  return j;
}

ojson ProfileRowJson(const FailureProfileRow& row) {
  ojson j;
  j["failures"] = row.failures;
  ojson by_verdict = ojson::object();
  for (Verdict v : AllVerdicts()) {
    const auto it = row.by_verdict.find(v);
    if (it == row.by_verdict.end()) continue;
    by_verdict[std::string(VerdictName(v))] = {
        {"count", it->second.count}, {"percent", OptionalJson(it->second.percent)}};
  }
  j["by_verdict"] = by_verdict;
  ojson by_reason = ojson::object();
  for (FailureReasonKind r : AllFailureReasons()) {
    const auto it = row.by_reason.find(r);
    if (it == row.by_reason.end()) continue;
    by_reason[std::string(FailureReasonName(r))] = {
        {"count", it->second.count}, {"percent", OptionalJson(it->second.percent)}};
  }
  j["by_reason"] = by_reason;
  ojson cross = ojson::array();
  for (const auto& [key, cell] : row.cross) {
    cross.push_back({{"verdict", std::string(VerdictName(key.first))},
                     {"reason", std::string(FailureReasonName(key.second))},
                     {"count", cell.count},
                     {"percent", OptionalJson(cell.percent)}});
  }
  j["cross"] = cross;
  return j;
}

ojson PreferredRowJson(const PreferredTermRow& r) {
  return {{"preferred", r.preferred},
          {"other", r.other},
          {"preferred_percent", OptionalJson(RoundedPercent(r.preferred, r.total()))},
          {"other_percent", OptionalJson(RoundedPercent(r.other, r.total()))}};
}

ojson CoverageRowJson(const CoverageRow& r) {
  return {{"found", r.found},
          {"missing", r.missing()},
          {"total", r.total},
          {"percent", OptionalJson(r.percent())}};
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string EvaluationReport::ToJson() const {
  ojson j;
  ojson m;
  m["alpha"] = metrics.alpha;
  m["recall_denominator"] = std::string(RecallDenominatorName(metrics.denominator));
  m["overall"] = MetricsRowJson(metrics.overall);
  ojson md = ojson::object();
  for (const auto& [d, row] : metrics.by_domain) {
    md[std::string(DomainName(d))] = MetricsRowJson(row);
  }
  m["by_domain"] = md;
  j["metrics"] = m;

  ojson vc = ojson::object();
  for (Verdict v : AllVerdicts()) {
    const auto it = verdict_counts.find(v);
    vc[std::string(VerdictName(v))] = it == verdict_counts.end() ? 0 : it->second;
  }
  j["verdicts"] = vc;

  ojson f;
  f["overall"] = ProfileRowJson(failures.overall);
  ojson fd = ojson::object();
  for (const auto& [d, row] : failures.by_domain) {
    fd[std::string(DomainName(d))] = ProfileRowJson(row);
  }
  f["by_domain"] = fd;
  j["failures"] = f;

  ojson rs = ojson::array();
  for (const FailureReason& r : reasons) {
    const GoldAnnotation& g = r.verdict.gold;
    ojson jr;
    jr["doc_id"] = g.doc_id;
    jr["sentence"] = g.sentence;
    jr["start"] = g.span.begin;
    jr["end"] = g.span.end;
    jr["surface"] = g.surface;
    jr["gold_cui"] = g.cui;
    jr["verdict"] = std::string(VerdictName(r.verdict.verdict));
    ojson sys = ojson::array();
    for (const Annotation& a : r.verdict.system) {
      sys.push_back({{"cui", a.cui}, {"start", a.span.begin}, {"end", a.span.end},
                     {"surface", a.surface}});
    }
    jr["system"] = sys;
    jr["reason"] = std::string(FailureReasonName(r.reason));
    jr["evidence"] = r.evidence;
    jr["override"] = r.overridden;
    rs.push_back(std::move(jr));
  }
  j["failure_reasons"] = rs;

  if (preferred) {
    ojson p;
    p["overall"] = PreferredRowJson(preferred->overall);
    ojson pd = ojson::object();
    for (const auto& [d, row] : preferred->by_domain) {
      pd[std::string(DomainName(d))] = PreferredRowJson(row);
    }
    p["by_domain"] = pd;
    j["preferred_terms"] = p;
  }
  if (coverage) {
    ojson c;
    c["overall"] = CoverageRowJson(coverage->overall);
    ojson cd = ojson::object();
    for (const auto& [d, row] : coverage->by_domain) {
      cd[std::string(DomainName(d))] = CoverageRowJson(row);
    }
    c["by_domain"] = cd;
    j["coverage"] = c;
  }
  return j.dump(2);
}

std::string EvaluationReport::ToTable() const {
  std::ostringstream out;
  out << "Metrics (alpha " << FormatMetric(metrics.alpha) << ", recall over "
      << RecallDenominatorName(metrics.denominator) << " gold)\n";
  out << Pad("domain", 13) << Pad("exact", 7) << Pad("gold", 7) << Pad("parsed", 8)
      << Pad("R", 6) << Pad("P", 6) << "F\n";
  auto metric_line = [&](const std::string& name, const MetricsRow& r) {
    out << Pad(name, 13) << Pad(std::to_string(r.exact), 7)
        << Pad(std::to_string(r.gold_total), 7)
        << Pad(std::to_string(r.parsed_total), 8) << Pad(FormatMetric(r.recall), 6)
        << Pad(FormatMetric(r.precision), 6) << FormatMetric(r.f_measure) << '\n';
  };
  for (const auto& [d, row] : metrics.by_domain) metric_line(std::string(DomainName(d)), row);
  metric_line("all", metrics.overall);

  out << "\nVerdicts\n";
  for (Verdict v : AllVerdicts()) {
    const auto it = verdict_counts.find(v);
    out << Pad(std::string(VerdictName(v)), 24)
        << (it == verdict_counts.end() ? 0 : it->second) << '\n';
  }

  out << "\nFailures (" << failures.overall.failures << ")\n";
  for (const auto& [v, cell] : failures.overall.by_verdict) {
    out << Pad(std::string(VerdictName(v)), 24) << Pad(std::to_string(cell.count), 6)
        << FormatPercent(cell.percent) << "%\n";
  }
  out << "\nFailure reasons\n";
  for (const auto& [r, cell] : failures.overall.by_reason) {
    out << Pad(std::string(FailureReasonName(r)), 24)
        << Pad(std::to_string(cell.count), 6) << FormatPercent(cell.percent) << "%\n";
  }

  if (preferred) {
    const auto& p = preferred->overall;
    out << "\nExact matches written as the preferred term\n"
        << Pad("preferred", 24) << Pad(std::to_string(p.preferred), 6)
        << FormatPercent(RoundedPercent(p.preferred, p.total())) << "%\n"
        << Pad("other", 24) << Pad(std::to_string(p.other), 6)
        << FormatPercent(RoundedPercent(p.other, p.total())) << "%\n";
  }
  if (coverage) {
    out << "\nKnowledge source coverage of gold concepts\n";
    for (const auto& [d, row] : coverage->by_domain) {
      out << Pad(std::string(DomainName(d)), 13) << row.found << "/" << row.total
          << " (" << row.PercentText() << ")\n";
    }
    out << Pad("all", 13) << coverage->overall.found << "/" << coverage->overall.total
        << " (" << coverage->overall.PercentText() << ")\n";
  }
  return out.str();
}

}  // namespace medmap
