#ifndef MEDMAP_CLI_H_
#define MEDMAP_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "medmap/eval.h"
#include "medmap/matcher.h"

namespace medmap::cli {

enum ExitCode { kOk = 0, kContractViolation = 1, kIoFailure = 2 };

// Everything a command may read. Empty paths mean "not given".
struct RunConfig {
  // inputs
  std::string records;
  std::string ks;
  std::string corpus;
  std::string gold;
  std::string annotations;
  std::string normalization;
  std::string rules;
  std::string lexicon;
  std::string alt_rules;
  std::string glossary;
  std::string back_glossary;
  std::string source_ks;
  std::string slang;
  std::string overrides;
  std::string group_file;
  std::string stopwords;

  // outputs
  std::string output;
  std::string audit_log;
  std::string normalized_corpus;
  std::string all_mappings;
  std::string translation_log;
  std::string table;

  std::string language = "it";
  std::string target_language = "en";
  std::string group = "disorders";
  bool fold_accents = false;

  MatchOptions match;
  MetricsOptions metrics;
  std::uint64_t seed = 0;

  std::string endpoint;
  int timeout_ms = 10000;
  std::size_t batch_size = 16;
  int retries = 2;

  // Throws ConfigError on out-of-range values.
  void Validate() const;
};

// Every command reads its inputs first and writes each output through a
// temporary file renamed into place, so a failed run leaves no partial
// files behind. Each throws on failure; RunCli maps errors to exit codes.
void CmdBuildKs(const RunConfig& config, std::ostream& out, std::ostream& err);
void CmdAnnotate(const RunConfig& config, std::ostream& out, std::ostream& err);
void CmdTranslate(const RunConfig& config, std::ostream& out, std::ostream& err);
void CmdEvaluate(const RunConfig& config, std::ostream& out, std::ostream& err);

struct ReproConfig {
  std::string data_dir;  // holds fixtures/ and rules/
  std::string out_dir;
  bool update = false;   // rewrite the expected files instead of comparing
};

// Full fixture pipelines. Outputs land in out_dir and are compared byte for
// byte with <data_dir>/fixtures/<exp>/expected. Returns the names of the
// files that differ.
std::vector<std::string> ReproExp2(const ReproConfig& config, std::ostream& out,
                                   std::ostream& err);
std::vector<std::string> ReproExp3(const ReproConfig& config, std::ostream& out,
                                   std::ostream& err);

// Reads `path` whole; throws IoError.
std::string ReadFile(const std::string& path);
// Writes through `path`.tmp and renames; throws IoError.
void WriteFileAtomic(const std::string& path, const std::string& content);

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace medmap::cli

#endif  // MEDMAP_CLI_H_
