#ifndef MEDMAP_EVAL_H_
#define MEDMAP_EVAL_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "medmap/errors.h"
#include "medmap/matcher.h"
#include "medmap/textprep.h"
#include "medmap/thesaurus.h"
#include "medmap/translation.h"
#include "medmap/variants.h"

namespace medmap {

struct GoldAnnotation {
  std::string doc_id;
  std::size_t sentence = 0;
  Span span;
  std::string surface;
  std::string cui;
  Domain domain = Domain::kOther;
  bool in_metathesaurus = true;

  bool operator==(const GoldAnnotation&) const = default;
};

// TSV: doc_id, sentence, start, end, surface, cui, domain, in_meta (Y/N,
// 1/0 or true/false). '#' lines are comments.
std::vector<GoldAnnotation> ReadGold(std::istream& in,
                                     const std::string& source_name = "gold");
std::string FormatGoldLine(const GoldAnnotation& g);

// Every gold span must name an existing sentence and match its text.
// Throws ContractError describing the first misaligned row.
void CheckGoldAgainstCorpus(const std::vector<GoldAnnotation>& gold,
                            const std::vector<Document>& corpus);

std::vector<CoverageInput> CoverageInputs(const std::vector<GoldAnnotation>& gold);

// ---------------------------------------------------------------------------
// Verdicts

enum class Verdict { kExact, kBoundary, kWordSenseAmbiguity, kMissedTerm };

std::string_view VerdictName(Verdict v);
const std::vector<Verdict>& AllVerdicts();

struct MatchVerdict {
  GoldAnnotation gold;
  Verdict verdict = Verdict::kMissedTerm;
  std::vector<Annotation> system;  // overlapping annotations considered
};

// `system` may hold any annotations; only those on the gold's document and
// sentence whose span overlaps the gold span are considered. Spans are
// compared after trimming whitespace from the gold surface.
MatchVerdict ClassifyMatch(const GoldAnnotation& gold,
                           const std::vector<Annotation>& system);

std::vector<MatchVerdict> ClassifyAll(const std::vector<GoldAnnotation>& gold,
                                      const std::vector<Annotation>& system);

// ---------------------------------------------------------------------------
// Metrics

enum class RecallDenominator { kAll, kInMetathesaurus };

std::string_view RecallDenominatorName(RecallDenominator d);
RecallDenominator ParseRecallDenominator(std::string_view name);

// 1 / (alpha / P + (1 - alpha) / R). nullopt if either input is undefined;
// 0 if either is 0.
std::optional<double> FMeasure(std::optional<double> precision,
                               std::optional<double> recall, double alpha);

struct MetricsRow {
  std::size_t exact = 0;
  std::size_t gold_total = 0;    // recall denominator
  std::size_t parsed_total = 0;  // gold phrases with a full-span annotation
  std::size_t system_total = 0;  // system annotations emitted
  std::optional<double> recall;
  std::optional<double> precision;
  std::optional<double> f_measure;
};

struct MetricsReport {
  double alpha = 0.5;
  RecallDenominator denominator = RecallDenominator::kAll;
  std::map<Domain, MetricsRow> by_domain;
  MetricsRow overall;
};

struct MetricsOptions {
  double alpha = 0.5;
  RecallDenominator denominator = RecallDenominator::kAll;
};

// Recall = exact / gold_total, precision = exact / parsed_total. With the
// in-metathesaurus policy, gold rows flagged as absent from the knowledge
// source are left out of every count. Throws ContractError unless alpha is
// in (0, 1).
MetricsReport ComputeMetricsReport(
    const std::vector<MatchVerdict>& verdicts,
    const std::map<Domain, std::size_t>& system_counts,
    const MetricsOptions& options = {});

// Annotations per domain, looking domains up through the corpus.
std::map<Domain, std::size_t> CountSystemAnnotations(
    const std::vector<Annotation>& system, const std::vector<Document>& corpus);

// ---------------------------------------------------------------------------
// Exact matches written as the preferred term

struct PreferredTermRow {
  std::size_t preferred = 0;
  std::size_t other = 0;
  std::size_t total() const { return preferred + other; }
};

struct PreferredTermBreakdown {
  std::map<Domain, PreferredTermRow> by_domain;
  PreferredTermRow overall;
};

// Only exact verdicts are counted. A gold surface counts as "preferred" when
// its normalized form equals the preferred term of the gold CUI in `ks`.
PreferredTermBreakdown ComputePreferredTermBreakdown(
    const std::vector<MatchVerdict>& verdicts, const KnowledgeSource& ks);

// ---------------------------------------------------------------------------
// Inter-annotator agreement

class AlignmentError : public ContractError {
 public:
  AlignmentError(const std::string& what, std::vector<std::string> orphans)
      : ContractError(what), orphans_(std::move(orphans)) {}
  const std::vector<std::string>& orphans() const { return orphans_; }

 private:
  std::vector<std::string> orphans_;
};

// Fraction of mentions (aligned by doc, sentence, span) given the same CUI
// by both annotators; nullopt for zero mentions.
std::optional<double> InterAnnotatorAgreement(
    const std::vector<GoldAnnotation>& a, const std::vector<GoldAnnotation>& b);

// ---------------------------------------------------------------------------
// Failure reasons

enum class FailureReasonKind {
  kNoVariantsGeneration,
  kBadTranslation,
  kMedicalSlang,
  kOther,
};

std::string_view FailureReasonName(FailureReasonKind r);
FailureReasonKind ParseFailureReason(std::string_view name);
const std::vector<FailureReasonKind>& AllFailureReasons();

struct FailureReason {
  MatchVerdict verdict;
  FailureReasonKind reason = FailureReasonKind::kOther;
  std::string evidence;
  bool overridden = false;
};

struct ReasonContext {
  const KnowledgeSource* ks = nullptr;                // knowledge source under test
  const VariantGenerator* alt_generator = nullptr;    // re-run generator
  MatchOptions options;
  const GlossaryTranslator* back_glossary = nullptr;  // target -> source
  const KnowledgeSource* source_ks = nullptr;         // source-language terms
  std::set<std::string> slang;                        // normalized surfaces
};

// Checks, in order: the alt generator recovers the gold CUI over the full
// gold phrase -> no_variants_generation; the back-translated surface lacks
// the source-language preferred term -> bad_translation; the surface is on
// the slang list -> medical_slang; otherwise other.
FailureReason SuggestFailureReason(const MatchVerdict& verdict,
                                   const ReasonContext& context);

// Keyed by (doc_id, sentence, start, end).
using ReasonOverrides =
    std::map<std::tuple<std::string, std::size_t, std::size_t, std::size_t>,
             FailureReasonKind>;

// TSV: doc_id, sentence, start, end, reason.
ReasonOverrides ReadReasonOverrides(std::istream& in,
                                    const std::string& source_name = "overrides");
void ApplyOverrides(const ReasonOverrides& overrides,
                    std::vector<FailureReason>* reasons);

struct ProfileCell {
  std::size_t count = 0;
  std::optional<double> percent;  // of the row's failures, one decimal
};

struct FailureProfileRow {
  std::size_t failures = 0;
  std::map<Verdict, ProfileCell> by_verdict;
  std::map<FailureReasonKind, ProfileCell> by_reason;
  std::map<std::pair<Verdict, FailureReasonKind>, ProfileCell> cross;
};

struct FailureProfile {
  std::map<Domain, FailureProfileRow> by_domain;
  FailureProfileRow overall;
};

FailureProfile ComputeFailureProfile(const std::vector<FailureReason>& reasons);

// ---------------------------------------------------------------------------
// Combined report

struct EvaluationReport {
  MetricsReport metrics;
  std::map<Verdict, std::size_t> verdict_counts;
  FailureProfile failures;
  std::vector<FailureReason> reasons;
  std::optional<PreferredTermBreakdown> preferred;
  std::optional<CoverageReport> coverage;

  std::string ToJson() const;   // full precision, stable key order
  std::string ToTable() const;  // metrics to two decimals, percents to one
};

std::string FormatMetric(std::optional<double> value);  // "0.69" or "n/a"
std::string FormatPercent(std::optional<double> value);  // "59.0" or "n/a"

}  // namespace medmap

#endif  // MEDMAP_EVAL_H_
