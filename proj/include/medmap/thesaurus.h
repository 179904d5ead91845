#ifndef MEDMAP_THESAURUS_H_
#define MEDMAP_THESAURUS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "medmap/textprep.h"

namespace medmap {

using StringId = std::uint32_t;

// One term row of a concept file: CUI|LANG|TERM|PREF|SEMTYPE|SOURCE.
struct ConceptRecord {
  std::string cui;
  std::string term;
  std::string language;
  bool is_preferred = false;
  std::string semantic_type;
  std::string source_vocabulary;
  std::size_t line = 0;  // 1-based position in the source file, 0 if none

  bool operator==(const ConceptRecord&) const = default;
};

bool IsWellFormedCui(std::string_view cui);

// Throws RecordError naming the line on a bad CUI, empty term or missing
// language.
void ValidateRecord(const ConceptRecord& record,
                    const std::string& source_name = "records");

std::vector<ConceptRecord> ReadConceptRecords(
    std::istream& in, const std::string& source_name = "records");
std::string FormatConceptRecord(const ConceptRecord& record);

struct SemanticGroupDef {
  std::string name;
  std::set<std::string> member_types;  // compared case-insensitively

  bool Contains(std::string_view semantic_type) const;

  // The twelve "Disorders" semantic types used for the annotation study.
  static const SemanticGroupDef& Disorders();
  // One semantic type per line; the group name is supplied by the caller.
  static SemanticGroupDef Load(std::istream& in, std::string name);
};

struct BuildOptions {
  bool fold_accents = false;
};

struct BuildManifest {
  int format_version = 1;
  std::string language;
  std::optional<std::string> group;
  bool fold_accents = false;
  std::size_t input_records = 0;
  std::size_t language_filtered = 0;  // dropped: other language
  std::size_t group_filtered = 0;     // dropped: semantic type not in group
  std::size_t duplicates = 0;         // dropped: repeated (cui, lang, term)
  std::size_t retained = 0;

  std::string ToJson() const;
  static BuildManifest FromJson(std::string_view json);
  bool operator==(const BuildManifest&) const = default;
};

struct KsString {
  StringId id = 0;
  std::string term;     // normalized
  std::string display;  // as first seen in the records
  std::string cui;
  bool is_preferred = false;
  std::string semantic_type;
  std::string source_vocabulary;
  std::vector<std::string> words;  // normalized word tokens of `term`
};

// Language-filtered concept store with a word -> string inverted index.
// Instances are immutable; build one with BuildKnowledgeSource or
// DeserializeKnowledgeSource.
class KnowledgeSource {
 public:
  const std::string& language() const { return manifest_.language; }
  bool fold_accents() const { return manifest_.fold_accents; }
  const BuildManifest& manifest() const { return manifest_; }
  const std::vector<KsString>& strings() const { return strings_; }
  const KsString& string(StringId id) const { return strings_.at(id); }
  std::size_t size() const { return strings_.size(); }

  // Sorted string ids whose term contains `word`; `word` must already be
  // normalized the way terms are.
  const std::vector<StringId>& LookupWord(std::string_view word) const;

  bool HasCui(std::string_view cui) const;
  // Sorted ids of every string for `cui`.
  const std::vector<StringId>& StringsForCui(std::string_view cui) const;
  // Normalized preferred term of `cui`, if the concept has one here.
  std::optional<std::string> PreferredTerm(std::string_view cui) const;

  // Normalization used for terms, for callers matching text against them.
  std::string Normalize(std::string_view text) const;

 private:
  friend KnowledgeSource BuildKnowledgeSource(
      const std::vector<ConceptRecord>&, const std::string&,
      const SemanticGroupDef*, const BuildOptions&);
  friend KnowledgeSource DeserializeKnowledgeSource(std::istream&);

  KnowledgeSource() = default;
  void BuildIndex();

  BuildManifest manifest_;
  std::vector<KsString> strings_;
  std::map<std::string, std::vector<StringId>, std::less<>> index_;
  std::map<std::string, std::vector<StringId>, std::less<>> by_cui_;
};

// Keeps the records in `language` (and, when `group` is non-null, whose
// semantic type belongs to it). Strings are ordered by (term, cui) so the
// result does not depend on input order.
KnowledgeSource BuildKnowledgeSource(const std::vector<ConceptRecord>& records,
                                     const std::string& language,
                                     const SemanticGroupDef* group = nullptr,
                                     const BuildOptions& options = {});

std::vector<StringId> LookupWord(const KnowledgeSource& ks,
                                 std::string_view word);

// Line-oriented, versioned text format with the manifest embedded.
void SerializeKnowledgeSource(const KnowledgeSource& ks, std::ostream& out);
KnowledgeSource DeserializeKnowledgeSource(std::istream& in);

// ---------------------------------------------------------------------------
// Coverage of gold concepts by a knowledge source.

struct CoverageInput {
  std::string cui;
  Domain domain = Domain::kOther;
};

struct CoverageRow {
  std::size_t found = 0;
  std::size_t total = 0;

  std::size_t missing() const { return total - found; }
  // Percentage rounded half-up to one decimal; nullopt when total == 0.
  std::optional<double> percent() const;
  std::string PercentText() const;  // "90.9", "100.0" or "n/a"
};

struct CoverageReport {
  std::map<Domain, CoverageRow> by_domain;
  CoverageRow overall;

  std::string ToJson() const;
};

// Throws ContractError naming the index of the first malformed CUI.
CoverageReport ComputeCoverage(const std::vector<CoverageInput>& gold,
                               const KnowledgeSource& ks);

// Percentage of found/total rounded half-up to one decimal, computed in
// integer arithmetic.
std::optional<double> RoundedPercent(std::size_t found, std::size_t total);

}  // namespace medmap

#endif  // MEDMAP_THESAURUS_H_
