#include "medmap/variants.h"

#include <algorithm>
#include <charconv>
#include <istream>

#include "medmap/errors.h"
#include "medmap/unicode.h"

namespace medmap {

std::string_view TransformName(Transform t) {
  switch (t) {
    case Transform::kInflection:
      return "inflection";
    case Transform::kDerivation:
      return "derivation";
    case Transform::kSpelling:
      return "spelling";
    case Transform::kSynonym:
      return "synonym";
    case Transform::kAcronym:
      return "acronym";
  }
  return "?";
}

Transform ParseTransform(std::string_view name) {
  for (Transform t : {Transform::kInflection, Transform::kDerivation,
                      Transform::kSpelling, Transform::kSynonym,
                      Transform::kAcronym}) {
    if (TransformName(t) == name) return t;
  }
  throw ContractError("unknown transform '" + std::string(name) + "'");
}

int DefaultCost(Transform t) {
  switch (t) {
    case Transform::kInflection:
    case Transform::kSpelling:
      return 1;
    case Transform::kDerivation:
    case Transform::kSynonym:
    case Transform::kAcronym:
      return 2;
  }
  return 2;
}

namespace {

struct TsvRow {
  std::string a, b;
  int cost;
  Transform tag;
};

std::vector<TsvRow> ReadFourColumn(std::istream& in,
                                   const std::string& source_name,
                                   bool is_rule) {
  std::vector<TsvRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;
    const auto f = SplitOn(line, '\t');
    if (f.size() != 4) throw RecordError(source_name, line_no, "expected 4 fields");
    int cost = 0;
    const auto [ptr, ec] =
        std::from_chars(f[2].data(), f[2].data() + f[2].size(), cost);
    if (ec != std::errc() || ptr != f[2].data() + f[2].size()) {
      throw RecordError(source_name, line_no, "bad cost '" + f[2] + "'");
    }
    if (cost < 1) {
      throw RecordError(source_name, line_no,
                        "cost must be >= 1 (0 is reserved for the word itself)");
    }
    const bool empty_bad = is_rule ? f[0].empty() && f[1].empty()
                                   : f[0].empty() || f[1].empty();
    if (empty_bad) {
      throw RecordError(source_name, line_no, "empty pattern or replacement");
    }
    try {
      rows.push_back({NormalizeTerm(f[0]), NormalizeTerm(f[1]), cost,
                      ParseTransform(f[3])});
    } catch (const ContractError& e) {
      throw RecordError(source_name, line_no, e.what());
    }
  }
  return rows;
}

}  // namespace

std::vector<SuffixRule> VariantGenerator::LoadRules(
    std::istream& in, const std::string& source_name) {
  std::vector<SuffixRule> rules;
  for (auto& row : ReadFourColumn(in, source_name, true)) {
    rules.push_back({std::move(row.a), std::move(row.b), row.cost, row.tag});
  }
  return rules;
}

std::multimap<std::string, LexiconEntry> VariantGenerator::LoadLexicon(
    std::istream& in, const std::string& source_name) {
  std::multimap<std::string, LexiconEntry> lexicon;
  for (auto& row : ReadFourColumn(in, source_name, false)) {
    lexicon.emplace(std::move(row.a), LexiconEntry{std::move(row.b), row.cost, row.tag});
  }
  return lexicon;
}

VariantGenerator VariantGenerator::WithRules(std::vector<SuffixRule> rules) const {
  for (const SuffixRule& r : rules) {
    if (r.cost < 1) throw ContractError("suffix rule cost must be >= 1");
  }
  VariantGenerator g = *this;
  g.rules_.insert(g.rules_.end(), std::make_move_iterator(rules.begin()),
                  std::make_move_iterator(rules.end()));
  return g;
}

VariantGenerator VariantGenerator::WithLexicon(
    std::multimap<std::string, LexiconEntry> lexicon) const {
  for (const auto& [word, e] : lexicon) {
    if (e.cost < 1) throw ContractError("lexicon cost must be >= 1");
  }
  VariantGenerator g = *this;
  g.lexicon_.merge(lexicon);
  return g;
}

std::vector<Variant> GenerateVariants(std::string_view word,
                                      const VariantGenerator& gen) {
  std::map<std::string, Variant, std::less<>> best;
  auto offer = [&](std::string text, int cost, Transform tag) {
    if (text == word) return;
    auto it = best.find(text);
    if (it != best.end() && it->second.distance <= cost) return;
    Variant v{text, cost, {tag}};
    best.insert_or_assign(std::move(text), std::move(v));
  };

  for (const SuffixRule& rule : gen.rules()) {
    if (word.size() <= rule.suffix.size() ||
        word.substr(word.size() - rule.suffix.size()) != rule.suffix) {
      continue;
    }
    std::string text(word.substr(0, word.size() - rule.suffix.size()));
    text += rule.replacement;
    offer(std::move(text), rule.cost, rule.tag);
  }
  const auto [lo, hi] = gen.lexicon().equal_range(std::string(word));
  for (auto it = lo; it != hi; ++it) {
    offer(it->second.variant, it->second.cost, it->second.tag);
  }

  std::vector<Variant> out;
  out.reserve(best.size() + 1);
  out.push_back({std::string(word), 0, {}});
  for (auto& [text, v] : best) out.push_back(std::move(v));
  std::stable_sort(out.begin() + 1, out.end(),
                   [](const Variant& a, const Variant& b) {
                     return a.distance < b.distance;
                   });
  return out;
}

std::vector<std::vector<Variant>> ExpandPhrase(
    const std::vector<std::string>& words, const VariantGenerator& gen) {
  std::vector<std::vector<Variant>> out;
  out.reserve(words.size());
  for (const std::string& w : words) out.push_back(GenerateVariants(w, gen));
  return out;
}

}  // namespace medmap
