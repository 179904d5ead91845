#ifndef MEDMAP_VARIANTS_H_
#define MEDMAP_VARIANTS_H_

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace medmap {

enum class Transform { kInflection, kDerivation, kSpelling, kSynonym, kAcronym };

std::string_view TransformName(Transform t);
Transform ParseTransform(std::string_view name);

// Conventional distance costs per transform kind.
int DefaultCost(Transform t);

struct Variant {
  std::string text;
  int distance = 0;
  std::vector<Transform> history;

  bool operator==(const Variant&) const = default;
};

struct SuffixRule {
  std::string suffix;       // matched at the end of the word
  std::string replacement;  // substituted for it
  int cost = 1;
  Transform tag = Transform::kInflection;
};

struct LexiconEntry {
  std::string variant;
  int cost = 2;
  Transform tag = Transform::kSynonym;
};

// Per-language variant expansion. Immutable once built; the default
// instance is the identity generator (no rules, no lexicon).
class VariantGenerator {
 public:
  explicit VariantGenerator(std::string language) : language_(std::move(language)) {}

  static VariantGenerator Identity(std::string language) {
    return VariantGenerator(std::move(language));
  }

  // TSV: suffix_pattern<TAB>replacement<TAB>cost<TAB>transform_tag
  static std::vector<SuffixRule> LoadRules(std::istream& in,
                                           const std::string& source_name);
  // TSV: word<TAB>variant<TAB>cost<TAB>tag
  static std::multimap<std::string, LexiconEntry> LoadLexicon(
      std::istream& in, const std::string& source_name);

  VariantGenerator WithRules(std::vector<SuffixRule> rules) const;
  VariantGenerator WithLexicon(std::multimap<std::string, LexiconEntry> lexicon) const;

  const std::string& language() const { return language_; }
  const std::vector<SuffixRule>& rules() const { return rules_; }
  const std::multimap<std::string, LexiconEntry>& lexicon() const {
    return lexicon_;
  }
  bool is_identity() const { return rules_.empty() && lexicon_.empty(); }

 private:
  std::string language_;
  std::vector<SuffixRule> rules_;
  std::multimap<std::string, LexiconEntry> lexicon_;
};

// The identity variant is always first. Remaining variants are unique by
// text (minimum distance kept) and sorted by (distance, text).
std::vector<Variant> GenerateVariants(std::string_view word,
                                      const VariantGenerator& gen);

std::vector<std::vector<Variant>> ExpandPhrase(
    const std::vector<std::string>& words, const VariantGenerator& gen);

}  // namespace medmap

#endif  // MEDMAP_VARIANTS_H_
