#include "medmap/thesaurus.h"

#include <algorithm>
#include <istream>
#include <ostream>
#include <tuple>

#include "json.hpp"
#include "medmap/errors.h"
#include "medmap/unicode.h"

namespace medmap {

namespace {

constexpr std::string_view kKsMagic = "#medmap-ks";
constexpr int kKsVersion = 1;

const std::vector<StringId>& EmptyIds() {
  static const std::vector<StringId> kEmpty;
  return kEmpty;
}

std::vector<std::string> TermWords(std::string_view normalized_term) {
  std::vector<std::string> words;
  for (Token& t : Tokenize(normalized_term)) {
    if (t.kind != TokenKind::kPunctuation) words.push_back(std::move(t.surface));
  }
  return words;
}

bool HasControl(std::string_view s) {
  return s.find_first_of("\t\r\n") != std::string_view::npos;
}

}  // namespace

bool IsWellFormedCui(std::string_view cui) {
  if (cui.size() != 8 || cui[0] != 'C') return false;
  return std::all_of(cui.begin() + 1, cui.end(),
                     [](char c) { return c >= '0' && c <= '9'; });
}

void ValidateRecord(const ConceptRecord& r, const std::string& source_name) {
  if (!IsWellFormedCui(r.cui)) {
    throw RecordError(source_name, r.line, "malformed CUI '" + r.cui + "'");
  }
  if (TrimWhitespace(r.term).empty()) {
    throw RecordError(source_name, r.line, "empty term for " + r.cui);
  }
  if (!IsValidUtf8(r.term)) {
    throw RecordError(source_name, r.line, "term is not valid UTF-8");
  }
  if (HasControl(r.term) || HasControl(r.semantic_type) ||
      HasControl(r.source_vocabulary)) {
    throw RecordError(source_name, r.line, "control character in field");
  }
  if (r.language.empty()) {
    throw RecordError(source_name, r.line, "missing language for " + r.cui);
  }
  if (TermWords(NormalizeTerm(r.term)).empty()) {
    throw RecordError(source_name, r.line, "term has no words: " + r.term);
  }
}

std::vector<ConceptRecord> ReadConceptRecords(std::istream& in,
                                              const std::string& source_name) {
  std::vector<ConceptRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;
    const auto f = SplitOn(line, '|');
    if (f.size() != 6) {
      throw RecordError(source_name, line_no,
                        "expected 6 '|'-separated fields, got " +
                            std::to_string(f.size()));
    }
    ConceptRecord r;
    r.cui = f[0];
    r.language = f[1];
    r.term = std::string(TrimWhitespace(f[2]));
    if (f[3] == "Y") {
      r.is_preferred = true;
    } else if (f[3] != "N") {
      throw RecordError(source_name, line_no,
                        "preferred flag must be Y or N, got '" + f[3] + "'");
    }
    r.semantic_type = f[4];
    r.source_vocabulary = f[5];
    r.line = line_no;
    ValidateRecord(r, source_name);
    records.push_back(std::move(r));
  }
  return records;
}

std::string FormatConceptRecord(const ConceptRecord& r) {
  return r.cui + "|" + r.language + "|" + r.term + "|" +
         (r.is_preferred ? "Y" : "N") + "|" + r.semantic_type + "|" +
         r.source_vocabulary;
}

// ---------------------------------------------------------------------------

bool SemanticGroupDef::Contains(std::string_view semantic_type) const {
  return member_types.count(NormalizeTerm(semantic_type)) > 0;
}

const SemanticGroupDef& SemanticGroupDef::Disorders() {
  static const SemanticGroupDef kDisorders{
      "Disorders",
      {"pathologic function", "disease or syndrome",
       "mental or behavioral dysfunction", "cell or molecular dysfunction",
       "congenital abnormality", "acquired abnormality", "injury or poisoning",
       "anatomical abnormality", "neoplastic process", "virus/bacterium",
       "sign or symptom", "finding"}};
  return kDisorders;
}

SemanticGroupDef SemanticGroupDef::Load(std::istream& in, std::string name) {
  SemanticGroupDef group{std::move(name), {}};
  group.member_types = LoadWordList(in);
  return group;
}

// ---------------------------------------------------------------------------

std::string BuildManifest::ToJson() const {
  nlohmann::json j;
  j["format_version"] = format_version;
  j["language"] = language;
  j["group"] = group ? nlohmann::json(*group) : nlohmann::json(nullptr);
  j["fold_accents"] = fold_accents;
  j["input_records"] = input_records;
  j["language_filtered"] = language_filtered;
  j["group_filtered"] = group_filtered;
  j["duplicates"] = duplicates;
  j["retained"] = retained;
  return j.dump();
}

BuildManifest BuildManifest::FromJson(std::string_view json) {
  const auto j = nlohmann::json::parse(json);
  BuildManifest m;
  m.format_version = j.at("format_version").get<int>();
  m.language = j.at("language").get<std::string>();
  if (!j.at("group").is_null()) m.group = j.at("group").get<std::string>();
  m.fold_accents = j.at("fold_accents").get<bool>();
  m.input_records = j.at("input_records").get<std::size_t>();
  m.language_filtered = j.at("language_filtered").get<std::size_t>();
  m.group_filtered = j.at("group_filtered").get<std::size_t>();
  m.duplicates = j.at("duplicates").get<std::size_t>();
  m.retained = j.at("retained").get<std::size_t>();
  return m;
}

// ---------------------------------------------------------------------------

const std::vector<StringId>& KnowledgeSource::LookupWord(
    std::string_view word) const {
  const auto it = index_.find(word);
  return it == index_.end() ? EmptyIds() : it->second;
}

bool KnowledgeSource::HasCui(std::string_view cui) const {
  return by_cui_.find(cui) != by_cui_.end();
}

const std::vector<StringId>& KnowledgeSource::StringsForCui(
    std::string_view cui) const {
  const auto it = by_cui_.find(cui);
  return it == by_cui_.end() ? EmptyIds() : it->second;
}

std::optional<std::string> KnowledgeSource::PreferredTerm(
    std::string_view cui) const {
  for (StringId id : StringsForCui(cui)) {
    if (strings_[id].is_preferred) return strings_[id].term;
  }
  return std::nullopt;
}

std::string KnowledgeSource::Normalize(std::string_view text) const {
  return NormalizeTerm(text, manifest_.fold_accents);
}

void KnowledgeSource::BuildIndex() {
  index_.clear();
  by_cui_.clear();
  for (const KsString& s : strings_) {
    for (const std::string& w : s.words) {
      auto& ids = index_[w];
      if (ids.empty() || ids.back() != s.id) ids.push_back(s.id);
    }
    by_cui_[s.cui].push_back(s.id);
  }
}

KnowledgeSource BuildKnowledgeSource(const std::vector<ConceptRecord>& records,
                                     const std::string& language,
                                     const SemanticGroupDef* group,
                                     const BuildOptions& options) {
  KnowledgeSource ks;
  BuildManifest& m = ks.manifest_;
  m.language = language;
  m.fold_accents = options.fold_accents;
  if (group) m.group = group->name;
  m.input_records = records.size();

  for (const ConceptRecord& r : records) ValidateRecord(r);

  // (cui, term) -> index into `kept`
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::map<std::string, const ConceptRecord*> preferred_by_cui;
  std::vector<KsString> kept;
  for (const ConceptRecord& r : records) {
    if (r.language != language) {
      ++m.language_filtered;
      continue;
    }
    const std::string term = NormalizeTerm(r.term, options.fold_accents);
    if (r.is_preferred) {
      auto [it, inserted] = preferred_by_cui.emplace(r.cui, &r);
      if (!inserted &&
          NormalizeTerm(it->second->term, options.fold_accents) != term) {
        throw RecordError("records", r.line,
                          "second preferred term for " + r.cui + " in '" +
                              language + "'");
      }
    }
    if (group && !group->Contains(r.semantic_type)) {
      ++m.group_filtered;
      continue;
    }
    auto [it, inserted] = seen.emplace(std::make_pair(r.cui, term), kept.size());
    if (!inserted) {
      ++m.duplicates;
      kept[it->second].is_preferred |= r.is_preferred;
      continue;
    }
    KsString s;
    s.term = term;
    s.display = r.term;
    s.cui = r.cui;
    s.is_preferred = r.is_preferred;
    s.semantic_type = r.semantic_type;
    s.source_vocabulary = r.source_vocabulary;
    s.words = TermWords(term);
    kept.push_back(std::move(s));
  }

  std::sort(kept.begin(), kept.end(), [](const KsString& a, const KsString& b) {
    return std::tie(a.term, a.cui) < std::tie(b.term, b.cui);
  });
  for (std::size_t i = 0; i < kept.size(); ++i) {
    kept[i].id = static_cast<StringId>(i);
  }
  m.retained = kept.size();
  ks.strings_ = std::move(kept);
  ks.BuildIndex();
  return ks;
}

std::vector<StringId> LookupWord(const KnowledgeSource& ks,
                                 std::string_view word) {
  return ks.LookupWord(word);
}

void SerializeKnowledgeSource(const KnowledgeSource& ks, std::ostream& out) {
  out << kKsMagic << ' ' << kKsVersion << '\n';
  out << "@manifest " << ks.manifest().ToJson() << '\n';
  for (const KsString& s : ks.strings()) {
    out << s.id << '\t' << s.cui << '\t' << (s.is_preferred ? 'P' : 'N')
        << '\t' << s.semantic_type << '\t' << s.source_vocabulary << '\t'
        << s.term << '\t' << s.display << '\n';
  }
}

KnowledgeSource DeserializeKnowledgeSource(std::istream& in) {
  const std::string source = "knowledge source";
  std::string line;
  if (!std::getline(in, line) ||
      line != std::string(kKsMagic) + " " + std::to_string(kKsVersion)) {
    throw RecordError(source, 1, "not a version 1 knowledge source file");
  }
  if (!std::getline(in, line) || line.rfind("@manifest ", 0) != 0) {
    throw RecordError(source, 2, "missing manifest line");
  }
  KnowledgeSource ks;
  try {
    ks.manifest_ = BuildManifest::FromJson(line.substr(10));
  } catch (const nlohmann::json::exception& e) {
    throw RecordError(source, 2, std::string("bad manifest: ") + e.what());
  }
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = SplitOn(line, '\t');
    if (f.size() != 7) throw RecordError(source, line_no, "expected 7 fields");
    KsString s;
    try {
      s.id = static_cast<StringId>(std::stoul(f[0]));
    } catch (const std::exception&) {
      throw RecordError(source, line_no, "bad string id");
    }
    if (s.id != ks.strings_.size()) {
      throw RecordError(source, line_no, "string ids must be dense");
    }
    s.cui = f[1];
    if (!IsWellFormedCui(s.cui)) {
      throw RecordError(source, line_no, "malformed CUI '" + s.cui + "'");
    }
    s.is_preferred = f[2] == "P";
    s.semantic_type = f[3];
    s.source_vocabulary = f[4];
    s.term = f[5];
    s.display = f[6];
    s.words = TermWords(s.term);
    ks.strings_.push_back(std::move(s));
  }
  if (ks.strings_.size() != ks.manifest_.retained) {
    throw RecordError(source, line_no, "string count disagrees with manifest");
  }
  ks.BuildIndex();
  return ks;
}

// ---------------------------------------------------------------------------

std::optional<double> RoundedPercent(std::size_t found, std::size_t total) {
  if (total == 0) return std::nullopt;
  // tenths of a percent, rounded half up: (found * 1000 / total) + 0.5
  const std::uint64_t tenths =
      (static_cast<std::uint64_t>(found) * 2000 + total) / (2 * total);
  return static_cast<double>(tenths) / 10.0;
}

std::optional<double> CoverageRow::percent() const {
  return RoundedPercent(found, total);
}

std::string CoverageRow::PercentText() const {
  const auto p = percent();
  if (!p) return "n/a";
  const auto tenths = static_cast<long long>(*p * 10.0 + 0.5);
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10);
}

namespace {

nlohmann::json RowJson(const CoverageRow& row) {
  nlohmann::json j;
  j["found"] = row.found;
  j["missing"] = row.missing();
  j["total"] = row.total;
  const auto p = row.percent();
  j["percent"] = p ? nlohmann::json(*p) : nlohmann::json(nullptr);
  return j;
}

}  // namespace

std::string CoverageReport::ToJson() const {
  nlohmann::json j;
  nlohmann::json domains = nlohmann::json::object();
  for (const auto& [domain, row] : by_domain) {
    domains[std::string(DomainName(domain))] = RowJson(row);
  }
  j["by_domain"] = domains;
  j["overall"] = RowJson(overall);
  return j.dump();
}

CoverageReport ComputeCoverage(const std::vector<CoverageInput>& gold,
                               const KnowledgeSource& ks) {
  CoverageReport report;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!IsWellFormedCui(gold[i].cui)) {
      throw ContractError("gold annotation " + std::to_string(i) +
                          " has malformed CUI '" + gold[i].cui + "'");
    }
    const bool found = ks.HasCui(gold[i].cui);
    CoverageRow& row = report.by_domain[gold[i].domain];
    ++row.total;
    ++report.overall.total;
    if (found) {
      ++row.found;
      ++report.overall.found;
    }
  }
  return report;
}

}  // namespace medmap
