#ifndef MEDMAP_TRANSLATION_H_
#define MEDMAP_TRANSLATION_H_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "medmap/errors.h"
#include "medmap/textprep.h"

namespace medmap {

// Raised when an external translation request keeps failing; carries the
// index of the first sentence of the failed batch.
class TranslationError : public Error {
 public:
  TranslationError(std::size_t sentence, const std::string& what)
      : Error("translation failed at sentence " + std::to_string(sentence) +
              ": " + what),
        sentence_(sentence) {}
  std::size_t sentence() const { return sentence_; }

 private:
  std::size_t sentence_;
};

class Translator {
 public:
  virtual ~Translator() = default;
  virtual const std::string& source_language() const = 0;
  virtual const std::string& target_language() const = 0;
  // Batch size the caller should use when submitting sentences.
  virtual std::size_t batch_size() const { return 1; }
  // Returns exactly one translation per input sentence, in order.
  virtual std::vector<std::string> TranslateBatch(
      const std::vector<std::string>& sentences) const = 0;
};

// Longest-match phrase glossary. Source phrases match case-insensitively on
// word tokens; text outside a match is copied through unchanged.
class GlossaryTranslator : public Translator {
 public:
  GlossaryTranslator(std::string source_language, std::string target_language)
      : source_(std::move(source_language)), target_(std::move(target_language)) {}

  void Add(std::string_view source_phrase, std::string target_phrase);
  // TSV: source_phrase<TAB>target_phrase
  static GlossaryTranslator Load(std::istream& in, std::string source_language,
                                 std::string target_language,
                                 const std::string& source_name = "glossary");

  const std::string& source_language() const override { return source_; }
  const std::string& target_language() const override { return target_; }
  std::size_t size() const { return entries_.size(); }

  std::string TranslateSentence(std::string_view sentence) const;
  std::vector<std::string> TranslateBatch(
      const std::vector<std::string>& sentences) const override;

 private:
  std::string source_;
  std::string target_;
  // normalized token keys -> target phrase
  std::map<std::vector<std::string>, std::string> entries_;
  std::size_t longest_key_ = 0;
};

struct ExternalTranslatorConfig {
  std::string endpoint;  // http://host[:port]/path
  std::chrono::milliseconds timeout{10000};
  std::size_t batch_size = 16;
  int retries = 2;

  void Validate() const;
};

// Client for an HTTP translation service. Each batch is a POST of
//   {"source": "it", "target": "en", "sentences": ["...", ...]}
// answered by a JSON array of strings of the same length.
class ExternalTranslator : public Translator {
 public:
  ExternalTranslator(ExternalTranslatorConfig config, std::string source_language,
                     std::string target_language);

  const std::string& source_language() const override { return source_; }
  const std::string& target_language() const override { return target_; }
  std::size_t batch_size() const override { return config_.batch_size; }
  std::vector<std::string> TranslateBatch(
      const std::vector<std::string>& sentences) const override;

 private:
  ExternalTranslatorConfig config_;
  std::string source_;
  std::string target_;
  std::string scheme_host_port_;
  std::string path_;
};

struct ShufflePlan {
  std::vector<std::size_t> order;    // order[k] = sentence submitted k-th
  std::vector<std::size_t> inverse;  // inverse[order[k]] = k
};

// Seeded Fisher-Yates over 0..n-1 driven by mt19937_64 with rejection
// sampling, so the permutation is identical on every platform.
ShufflePlan MakeShufflePlan(std::size_t n, std::uint64_t seed);

struct TranslationLogEntry {
  std::size_t sentence = 0;
  std::string source;
  std::string target;
};

struct TranslationResult {
  Document document;
  std::vector<TranslationLogEntry> log;  // in sentence order
};

// Submits sentences in shuffled order (batched per translator), then
// restores index order.
TranslationResult TranslateDocument(const Document& doc,
                                    const Translator& translator,
                                    std::uint64_t seed);

}  // namespace medmap

#endif  // MEDMAP_TRANSLATION_H_
