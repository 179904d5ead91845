#include "medmap/cli.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "medmap/errors.h"
#include "medmap/eval.h"
#include "medmap/matcher.h"
#include "medmap/textprep.h"
#include "medmap/thesaurus.h"
#include "medmap/translation.h"
#include "medmap/unicode.h"
#include "medmap/variants.h"

#ifndef MEDMAP_DATA_DIR
#define MEDMAP_DATA_DIR "data"
#endif

namespace medmap::cli {

namespace fs = std::filesystem;

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return buf.str();
}

void WriteFileAtomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + tmp + "' for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw IoError("error writing '" + tmp + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into '" + path + "'");
  }
}

namespace {

void RequireInputs(std::initializer_list<std::pair<const char*, const std::string*>> inputs) {
  for (const auto& [flag, path] : inputs) {
    if (path->empty()) continue;
    std::error_code ec;
    if (!fs::is_regular_file(*path, ec)) {
      throw IoError(std::string("--") + flag + ": no such file '" + *path + "'");
    }
  }
}

void RequireSet(const char* flag, const std::string& value) {
  if (value.empty()) throw ConfigError(std::string("--") + flag + " is required");
}

std::istringstream OpenText(const std::string& path) {
  return std::istringstream(ReadFile(path));
}

KnowledgeSource LoadKs(const std::string& path) {
  auto in = OpenText(path);
  try {
    return DeserializeKnowledgeSource(in);
  } catch (const ContractError& e) {
    throw ContractError(path + ": " + e.what());
  }
}

std::vector<Document> LoadCorpus(const std::string& path) {
  auto in = OpenText(path);
  return ReadCorpus(in, path);
}

VariantGenerator LoadGenerator(const std::string& language,
                               const std::string& rules,
                               const std::string& lexicon) {
  VariantGenerator gen = VariantGenerator::Identity(language);
  if (!rules.empty()) {
    auto in = OpenText(rules);
    gen = gen.WithRules(VariantGenerator::LoadRules(in, rules));
  }
  if (!lexicon.empty()) {
    auto in = OpenText(lexicon);
    gen = gen.WithLexicon(VariantGenerator::LoadLexicon(in, lexicon));
  }
  return gen;
}

std::string JoinLines(const std::vector<std::string>& lines) {
  std::string out;
  for (const std::string& l : lines) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace

void RunConfig::Validate() const {
  match.Validate();
  if (!(metrics.alpha > 0.0 && metrics.alpha < 1.0)) {
    throw ConfigError("--alpha must lie in (0, 1)");
  }
  if (group != "disorders" && group != "none") {
    throw ConfigError("--group must be disorders or none");
  }
  if (language.empty() || target_language.empty()) {
    throw ConfigError("language codes must not be empty");
  }
  if (timeout_ms <= 0) throw ConfigError("--timeout-ms must be positive");
  if (batch_size == 0) throw ConfigError("--batch-size must be at least 1");
  if (retries < 0) throw ConfigError("--retries must not be negative");
}

// ---------------------------------------------------------------------------

void CmdBuildKs(const RunConfig& config, std::ostream& out, std::ostream& err) {
  config.Validate();
  RequireSet("records", config.records);
  RequireSet("out", config.output);
  RequireInputs({{"records", &config.records}, {"group-file", &config.group_file}});

  auto in = OpenText(config.records);
  const auto records = ReadConceptRecords(in, config.records);
  if (records.empty()) err << "warning: " << config.records << " holds no records\n";

  std::optional<SemanticGroupDef> custom;
  const SemanticGroupDef* group = nullptr;
  if (!config.group_file.empty()) {
    auto gin = OpenText(config.group_file);
    custom = SemanticGroupDef::Load(gin, fs::path(config.group_file).stem().string());
    group = &*custom;
  } else if (config.group == "disorders") {
    group = &SemanticGroupDef::Disorders();
  }
  BuildOptions options;
  options.fold_accents = config.fold_accents;
  const KnowledgeSource ks =
      BuildKnowledgeSource(records, config.language, group, options);

  std::ostringstream text;
  SerializeKnowledgeSource(ks, text);
  WriteFileAtomic(config.output, text.str());
  out << ks.manifest().ToJson() << '\n';
}

void CmdAnnotate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  config.Validate();
  RequireSet("ks", config.ks);
  RequireSet("corpus", config.corpus);
  RequireSet("out", config.output);
  RequireInputs({{"ks", &config.ks},
                 {"corpus", &config.corpus},
                 {"normalization", &config.normalization},
                 {"rules", &config.rules},
                 {"lexicon", &config.lexicon},
                 {"stopwords", &config.stopwords}});

  const KnowledgeSource ks = LoadKs(config.ks);
  const std::vector<Document> corpus = LoadCorpus(config.corpus);
  const VariantGenerator gen = LoadGenerator(ks.language(), config.rules, config.lexicon);
  std::optional<NormalizationTable> table;
  if (!config.normalization.empty()) {
    auto in = OpenText(config.normalization);
    table = NormalizationTable::Load(in, config.normalization);
  }
  ChunkerConfig chunker = ChunkerConfig::ForLanguage(ks.language());
  if (!config.stopwords.empty()) {
    auto in = OpenText(config.stopwords);
    chunker.stopwords = LoadWordList(in);
  }
  // Languages are checked for every document before any work is done.
  for (const Document& doc : corpus) CheckLanguages(ks, doc, gen);

  std::vector<std::string> annotation_lines;
  std::vector<std::string> audit_lines;
  std::vector<std::string> mapping_lines;
  std::vector<Document> normalized;
  for (const Document& original : corpus) {
    Document doc = original;
    if (table) {
      NormalizationResult result = Normalize(original, *table);
      for (const NormalizationEdit& e : result.log) {
        nlohmann::ordered_json j;
        j["doc_id"] = doc.doc_id;
        j["sentence"] = e.sentence;
        j["start"] = e.span.begin;
        j["end"] = e.span.end;
        j["before"] = e.before;
        j["after"] = e.after;
        j["tag"] = std::string(NormalizationTagName(e.tag));
        audit_lines.push_back(j.dump());
      }
      doc = std::move(result.document);
    }
    for (const Annotation& a : Annotate(ks, doc, gen, config.match, chunker)) {
      annotation_lines.push_back(AnnotationToJsonLine(a));
    }
    if (!config.all_mappings.empty()) {
      for (const PhraseAnalysis& p :
           AnalyzeDocument(ks, doc, gen, config.match, chunker)) {
        mapping_lines.push_back(MappingsToJsonLine(doc.doc_id, p, ks));
      }
    }
    normalized.push_back(std::move(doc));
  }

  WriteFileAtomic(config.output, JoinLines(annotation_lines));
  if (!config.audit_log.empty()) WriteFileAtomic(config.audit_log, JoinLines(audit_lines));
  if (!config.all_mappings.empty()) {
    WriteFileAtomic(config.all_mappings, JoinLines(mapping_lines));
  }
  if (!config.normalized_corpus.empty()) {
    std::ostringstream text;
    WriteCorpus(text, normalized);
    WriteFileAtomic(config.normalized_corpus, text.str());
  }
  if (corpus.empty()) err << "warning: " << config.corpus << " holds no documents\n";
  out << "annotated " << corpus.size() << " documents, "
      << annotation_lines.size() << " annotations";
  if (table) out << ", " << audit_lines.size() << " normalization edits";
  out << '\n';
}

void CmdTranslate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  config.Validate();
  RequireSet("corpus", config.corpus);
  RequireSet("out", config.output);
  if (config.glossary.empty() == config.endpoint.empty()) {
    throw ConfigError("give exactly one of --glossary and --endpoint");
  }
  RequireInputs({{"corpus", &config.corpus}, {"glossary", &config.glossary}});

  const std::vector<Document> corpus = LoadCorpus(config.corpus);
  std::unique_ptr<Translator> translator;
  if (!config.glossary.empty()) {
    auto in = OpenText(config.glossary);
    auto glossary = std::make_unique<GlossaryTranslator>(GlossaryTranslator::Load(
        in, config.language, config.target_language, config.glossary));
    if (glossary->size() == 0) {
      err << "warning: " << config.glossary << " is empty; text passes through\n";
    }
    translator = std::move(glossary);
  } else {
    ExternalTranslatorConfig ext;
    ext.endpoint = config.endpoint;
    ext.timeout = std::chrono::milliseconds(config.timeout_ms);
    ext.batch_size = config.batch_size;
    ext.retries = config.retries;
    translator = std::make_unique<ExternalTranslator>(ext, config.language,
                                                      config.target_language);
  }

  std::vector<Document> translated;
  std::vector<std::string> log_lines;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    TranslationResult result;
    try {
      result = TranslateDocument(corpus[i], *translator, config.seed + i);
    } catch (const TranslationError& e) {
      throw TranslationError(e.sentence(), "document " + corpus[i].doc_id + ": " +
                                               e.what());
    }
    for (const TranslationLogEntry& e : result.log) {
      nlohmann::ordered_json j;
      j["doc_id"] = corpus[i].doc_id;
      j["sentence"] = e.sentence;
      j["source"] = e.source;
      j["target"] = e.target;
      log_lines.push_back(j.dump());
    }
    translated.push_back(std::move(result.document));
  }
  std::ostringstream text;
  WriteCorpus(text, translated);
  WriteFileAtomic(config.output, text.str());
  if (!config.translation_log.empty()) {
    WriteFileAtomic(config.translation_log, JoinLines(log_lines));
  }
  out << "translated " << corpus.size() << " documents, " << log_lines.size()
      << " sentences\n";
}

void CmdEvaluate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  config.Validate();
  RequireSet("annotations", config.annotations);
  RequireSet("gold", config.gold);
  RequireSet("corpus", config.corpus);
  RequireSet("ks", config.ks);
  RequireSet("out", config.output);
  if (config.back_glossary.empty() != config.source_ks.empty()) {
    throw ConfigError("--back-glossary and --source-ks go together");
  }
  RequireInputs({{"annotations", &config.annotations},
                 {"gold", &config.gold},
                 {"corpus", &config.corpus},
                 {"ks", &config.ks},
                 {"alt-rules", &config.alt_rules},
                 {"back-glossary", &config.back_glossary},
                 {"source-ks", &config.source_ks},
                 {"slang", &config.slang},
                 {"overrides", &config.overrides}});

  auto ain = OpenText(config.annotations);
  const std::vector<Annotation> system = ReadAnnotations(ain, config.annotations);
  auto gin = OpenText(config.gold);
  const std::vector<GoldAnnotation> gold = ReadGold(gin, config.gold);
  const std::vector<Document> corpus = LoadCorpus(config.corpus);
  const KnowledgeSource ks = LoadKs(config.ks);
  CheckGoldAgainstCorpus(gold, corpus);

  std::optional<VariantGenerator> alt;
  if (!config.alt_rules.empty()) alt = LoadGenerator(ks.language(), config.alt_rules, "");
  std::optional<KnowledgeSource> source_ks;
  std::optional<GlossaryTranslator> back;
  if (!config.source_ks.empty()) {
    source_ks = LoadKs(config.source_ks);
    auto in = OpenText(config.back_glossary);
    back = GlossaryTranslator::Load(in, ks.language(), source_ks->language(),
                                    config.back_glossary);
  }
  ReasonContext context;
  context.ks = &ks;
  context.alt_generator = alt ? &*alt : nullptr;
  context.options = config.match;
  context.back_glossary = back ? &*back : nullptr;
  context.source_ks = source_ks ? &*source_ks : nullptr;
  if (!config.slang.empty()) {
    auto in = OpenText(config.slang);
    context.slang = LoadWordList(in);
  }
  ReasonOverrides overrides;
  if (!config.overrides.empty()) {
    auto in = OpenText(config.overrides);
    overrides = ReadReasonOverrides(in, config.overrides);
  }

  const std::vector<MatchVerdict> verdicts = ClassifyAll(gold, system);
  EvaluationReport report;
  report.metrics = ComputeMetricsReport(
      verdicts, CountSystemAnnotations(system, corpus), config.metrics);
  for (Verdict v : AllVerdicts()) report.verdict_counts[v] = 0;
  for (const MatchVerdict& v : verdicts) {
    ++report.verdict_counts[v.verdict];
    if (v.verdict != Verdict::kExact) {
      report.reasons.push_back(SuggestFailureReason(v, context));
    }
  }
  ApplyOverrides(overrides, &report.reasons);
  report.failures = ComputeFailureProfile(report.reasons);
  report.preferred = ComputePreferredTermBreakdown(verdicts, ks);
  report.coverage = ComputeCoverage(CoverageInputs(gold), ks);

  const std::string table = report.ToTable();
  WriteFileAtomic(config.output, report.ToJson() + "\n");
  if (!config.table.empty()) WriteFileAtomic(config.table, table);
  if (system.empty()) err << "warning: no system annotations; precision undefined\n";
  out << table;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> CompareOrUpdate(const fs::path& out_dir,
                                         const fs::path& expected_dir,
                                         const std::vector<std::string>& files,
                                         bool update, std::ostream& out) {
  std::vector<std::string> differing;
  if (update) fs::create_directories(expected_dir);
  for (const std::string& name : files) {
    const std::string produced = ReadFile((out_dir / name).string());
    const fs::path expected = expected_dir / name;
    if (update) {
      WriteFileAtomic(expected.string(), produced);
      out << "updated  " << name << '\n';
      continue;
    }
    std::error_code ec;
    const bool same = fs::is_regular_file(expected, ec) &&
                      ReadFile(expected.string()) == produced;
    out << (same ? "match    " : "DIFFERS  ") << name << '\n';
    if (!same) differing.push_back(name);
  }
  return differing;
}

RunConfig FixtureRunConfig() {
  RunConfig c;
  c.match.filter_mode = FilterMode::kRelaxed;
  c.match.ignore_word_order = true;
  return c;
}

class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

}  // namespace

std::vector<std::string> ReproExp2(const ReproConfig& config, std::ostream& out,
                                   std::ostream& err) {
  const fs::path fixtures = fs::path(config.data_dir) / "fixtures" / "exp2";
  const fs::path rules = fs::path(config.data_dir) / "rules";
  const fs::path o = config.out_dir;
  fs::create_directories(o);
  NullBuffer null_buf;
  std::ostream quiet(&null_buf);

  RunConfig build;
  build.records = (fixtures / "records.psv").string();
  build.language = "it";
  build.group = "disorders";
  build.output = (o / "ks.txt").string();
  std::ostringstream manifest;
  CmdBuildKs(build, manifest, err);
  WriteFileAtomic((o / "manifest.json").string(), manifest.str());

  RunConfig annotate = FixtureRunConfig();
  annotate.ks = build.output;
  annotate.corpus = (fixtures / "corpus.jsonl").string();
  annotate.normalization = (fixtures / "normalization.tsv").string();
  annotate.audit_log = (o / "normalization_log.jsonl").string();
  annotate.normalized_corpus = (o / "corpus_normalized.jsonl").string();
  annotate.output = (o / "annotations.jsonl").string();
  CmdAnnotate(annotate, quiet, err);

  RunConfig evaluate = FixtureRunConfig();
  evaluate.annotations = annotate.output;
  evaluate.gold = (fixtures / "gold.tsv").string();
  evaluate.corpus = annotate.normalized_corpus;
  evaluate.ks = build.output;
  evaluate.alt_rules = (rules / "it.tsv").string();
  evaluate.output = (o / "report.json").string();
  evaluate.table = (o / "report.txt").string();
  CmdEvaluate(evaluate, out, err);

  return CompareOrUpdate(o, fixtures / "expected",
                         {"manifest.json", "ks.txt", "normalization_log.jsonl",
                          "corpus_normalized.jsonl", "annotations.jsonl",
                          "report.json", "report.txt"},
                         config.update, out);
}

std::vector<std::string> ReproExp3(const ReproConfig& config, std::ostream& out,
                                   std::ostream& err) {
  const fs::path fixtures = fs::path(config.data_dir) / "fixtures" / "exp3";
  const fs::path rules = fs::path(config.data_dir) / "rules";
  const fs::path o = config.out_dir;
  fs::create_directories(o);
  NullBuffer null_buf;
  std::ostream quiet(&null_buf);

  RunConfig translate;
  translate.corpus = (fixtures / "corpus_it.jsonl").string();
  translate.glossary = (fixtures / "glossary_it_en.tsv").string();
  translate.language = "it";
  translate.target_language = "en";
  translate.seed = 2017;
  translate.output = (o / "corpus_en.jsonl").string();
  translate.translation_log = (o / "translation_log.jsonl").string();
  CmdTranslate(translate, quiet, err);

  // The English source is not restricted to one semantic group, as the
  // sub-term hits (CHRONIC, Heart) in the boundary example show.
  RunConfig build_en;
  build_en.records = (fixtures / "records_en.psv").string();
  build_en.language = "en";
  build_en.group = "none";
  build_en.output = (o / "ks_en.txt").string();
  CmdBuildKs(build_en, quiet, err);

  RunConfig build_it;
  build_it.records = (fixtures / "records_it.psv").string();
  build_it.language = "it";
  build_it.group = "none";
  build_it.output = (o / "ks_it.txt").string();
  CmdBuildKs(build_it, quiet, err);

  RunConfig annotate = FixtureRunConfig();
  annotate.ks = build_en.output;
  annotate.corpus = translate.output;
  annotate.output = (o / "annotations.jsonl").string();
  CmdAnnotate(annotate, quiet, err);

  RunConfig evaluate = FixtureRunConfig();
  evaluate.annotations = annotate.output;
  evaluate.gold = (fixtures / "gold_en.tsv").string();
  evaluate.corpus = translate.output;
  evaluate.ks = build_en.output;
  evaluate.alt_rules = (rules / "en.tsv").string();
  evaluate.back_glossary = (fixtures / "glossary_en_it.tsv").string();
  evaluate.source_ks = build_it.output;
  evaluate.slang = (fixtures / "slang.txt").string();
  evaluate.output = (o / "report.json").string();
  evaluate.table = (o / "report.txt").string();
  CmdEvaluate(evaluate, out, err);

  return CompareOrUpdate(o, fixtures / "expected",
                         {"corpus_en.jsonl", "translation_log.jsonl", "ks_en.txt",
                          "ks_it.txt", "annotations.jsonl", "report.json",
                          "report.txt"},
                         config.update, out);
}

// ---------------------------------------------------------------------------

namespace {

void AddMatchOptions(CLI::App* cmd, RunConfig* c, std::string* filter_mode,
                     std::string* head) {
  cmd->add_flag("--ignore-word-order", c->match.ignore_word_order,
                "Let phrase words match term words in any order");
  cmd->add_option("--filter-mode", *filter_mode, "relaxed or strict")
      ->capture_default_str();
  cmd->add_option("--strict-threshold", c->match.strict_threshold,
                  "Lowest mapping score kept in strict mode")
      ->capture_default_str();
  cmd->add_option("--relaxed-threshold", c->match.relaxed_threshold,
                  "Lowest mapping score kept in relaxed mode")
      ->capture_default_str();
  cmd->add_option("--head", *head, "Head word of a phrase: first or last")
      ->capture_default_str();
  cmd->add_option("--beam-width", c->match.beam_width,
                  "Beam used when a phrase has many candidates")
      ->capture_default_str();
}

void ApplyMatchStrings(RunConfig* c, const std::string& filter_mode,
                       const std::string& head) {
  c->match.filter_mode = ParseFilterMode(filter_mode);
  if (head == "first") {
    c->match.head = HeadPosition::kFirst;
  } else if (head == "last") {
    c->match.head = HeadPosition::kLast;
  } else {
    throw ConfigError("--head must be first or last");
  }
}

// Expands `--config FILE` into --key=value tokens placed right after the
// subcommand name, so anything given on the command line comes later and
// wins. CLI11 ignores config files attached to subcommands, hence this.
std::vector<std::string> ExpandConfig(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (file.empty() || out.empty()) return args;
  std::istringstream in(ReadFile(file));
  std::vector<std::string> injected;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t(TrimWhitespace(line));
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw RecordError(file, line_no, "expected key=value");
    std::string key(TrimWhitespace(t.substr(0, eq)));
    std::string value(TrimWhitespace(t.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty() || key == "config") {
      throw RecordError(file, line_no, "bad key '" + key + "'");
    }
    injected.push_back("--" + key + "=" + value);
  }
  out.insert(out.begin() + 1, injected.begin(), injected.end());
  return out;
}

int ReportError(std::ostream& err, const std::exception& e, int code) {
  err << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Concept annotation of clinical notes against a terminology subset"};
  app.name("medmap");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  RunConfig c;
  std::string filter_mode = "strict";
  std::string head = "last";
  std::string denominator = "all";
  ReproConfig repro;
  repro.data_dir = MEDMAP_DATA_DIR;

  std::string config_file;  // consumed by ExpandConfig; declared for --help
  auto with_config = [&config_file](CLI::App* cmd) {
    cmd->add_option("--config", config_file,
                    "key=value file (keys are long flag names); command-line flags win");
  };

  CLI::App* build = app.add_subcommand("build-ks", "Build a knowledge source from concept records");
  with_config(build);
  build->add_option("--records", c.records, "Concept records CUI|LANG|TERM|PREF|SEMTYPE|SOURCE");
  build->add_option("--language", c.language, "Language to keep")->capture_default_str();
  build->add_option("--group", c.group, "Semantic group filter: disorders or none")
      ->capture_default_str();
  build->add_option("--group-file", c.group_file, "Semantic types to keep, one per line");
  build->add_flag("--fold-accents", c.fold_accents, "Strip diacritics when normalizing");
  build->add_option("--out", c.output, "Knowledge source file to write");

  CLI::App* annotate = app.add_subcommand("annotate", "Annotate a corpus with concepts");
  with_config(annotate);
  annotate->add_option("--ks", c.ks, "Knowledge source file");
  annotate->add_option("--corpus", c.corpus, "Corpus, JSON Lines");
  annotate->add_option("--normalization", c.normalization,
                       "Acronym/abbreviation/misspelling table applied first");
  annotate->add_option("--audit-log", c.audit_log, "Where to log normalization edits");
  annotate->add_option("--normalized-corpus", c.normalized_corpus,
                       "Where to write the corpus after normalization");
  annotate->add_option("--rules", c.rules, "Suffix rules for variant generation");
  annotate->add_option("--lexicon", c.lexicon, "Variant lexicon");
  annotate->add_option("--stopwords", c.stopwords, "Stopword list replacing the built-in one");
  annotate->add_option("--all-mappings", c.all_mappings,
                       "Dump every ranked mapping per phrase to this file");
  annotate->add_option("--out", c.output, "Annotations file to write");
  AddMatchOptions(annotate, &c, &filter_mode, &head);

  CLI::App* translate = app.add_subcommand("translate", "Translate a corpus sentence by sentence");
  with_config(translate);
  translate->add_option("--corpus", c.corpus, "Corpus, JSON Lines");
  translate->add_option("--glossary", c.glossary, "Phrase glossary source<TAB>target");
  translate->add_option("--endpoint", c.endpoint, "HTTP translation service URL");
  translate->add_option("--timeout-ms", c.timeout_ms, "Per-request timeout")
      ->capture_default_str();
  translate->add_option("--batch-size", c.batch_size, "Sentences per request")
      ->capture_default_str();
  translate->add_option("--retries", c.retries, "Retries per failed request")
      ->capture_default_str();
  translate->add_option("--source-language", c.language, "Corpus language")
      ->capture_default_str();
  translate->add_option("--target-language", c.target_language, "Output language")
      ->capture_default_str();
  translate->add_option("--seed", c.seed, "Seed for the submission order")
      ->capture_default_str();
  translate->add_option("--log", c.translation_log, "Where to write source/target pairs");
  translate->add_option("--out", c.output, "Translated corpus to write");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Score annotations against a gold standard");
  with_config(evaluate);
  evaluate->add_option("--annotations", c.annotations, "System annotations, JSON Lines");
  evaluate->add_option("--gold", c.gold, "Gold standard TSV");
  evaluate->add_option("--corpus", c.corpus, "Corpus the annotations were made on");
  evaluate->add_option("--ks", c.ks, "Knowledge source used for annotation");
  evaluate->add_option("--recall-denominator", denominator, "all or in-meta")
      ->capture_default_str();
  evaluate->add_option("--alpha", c.metrics.alpha, "F-measure weight in (0, 1)")
      ->capture_default_str();
  evaluate->add_option("--alt-rules", c.alt_rules,
                       "Suffix rules for re-running failed phrases");
  evaluate->add_option("--back-glossary", c.back_glossary,
                       "Glossary back into the source language");
  evaluate->add_option("--source-ks", c.source_ks, "Source-language knowledge source");
  evaluate->add_option("--slang", c.slang, "Slang surfaces, one per line");
  evaluate->add_option("--overrides", c.overrides,
                       "Manual failure reasons doc<TAB>sentence<TAB>start<TAB>end<TAB>reason");
  evaluate->add_option("--table", c.table, "Also write the table report here");
  evaluate->add_option("--out", c.output, "JSON report to write");
  AddMatchOptions(evaluate, &c, &filter_mode, &head);

  CLI::App* exp2 = app.add_subcommand("repro-exp2", "Run the Italian fixture pipeline and diff it");
  CLI::App* exp3 = app.add_subcommand("repro-exp3", "Run the translated fixture pipeline and diff it");
  for (CLI::App* cmd : {exp2, exp3}) {
    cmd->add_option("--data", repro.data_dir, "Directory holding fixtures/ and rules/")
        ->capture_default_str();
    cmd->add_option("--out", repro.out_dir, "Output directory")->required();
    cmd->add_flag("--update", repro.update, "Rewrite the expected outputs");
  }

  std::vector<std::string> expanded;
  try {
    expanded = ExpandConfig(args);
  } catch (const IoError& e) {
    return ReportError(err, e, kIoFailure);
  } catch (const std::exception& e) {
    return ReportError(err, e, kContractViolation);
  }
  std::vector<std::string> argv(expanded.rbegin(), expanded.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return kOk;
    err << "error: " << e.what() << '\n';
    return kContractViolation;
  }

  try {
    if (annotate->parsed() || evaluate->parsed()) {
      ApplyMatchStrings(&c, filter_mode, head);
    }
    if (evaluate->parsed()) c.metrics.denominator = ParseRecallDenominator(denominator);

    if (build->parsed()) {
      CmdBuildKs(c, out, err);
    } else if (annotate->parsed()) {
      CmdAnnotate(c, out, err);
    } else if (translate->parsed()) {
      CmdTranslate(c, out, err);
    } else if (evaluate->parsed()) {
      CmdEvaluate(c, out, err);
    } else {
      const auto differing =
          exp2->parsed() ? ReproExp2(repro, out, err) : ReproExp3(repro, out, err);
      if (!differing.empty()) {
        err << "error: " << differing.size() << " output(s) differ from expected\n";
        return kContractViolation;
      }
    }
  } catch (const TranslationError& e) {
    return ReportError(err, e, kIoFailure);
  } catch (const IoError& e) {
    return ReportError(err, e, kIoFailure);
  } catch (const fs::filesystem_error& e) {
    return ReportError(err, e, kIoFailure);
  } catch (const std::exception& e) {
    return ReportError(err, e, kContractViolation);
  }
  return kOk;
}

}  // namespace medmap::cli
