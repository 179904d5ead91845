#include "medmap/translation.h"

#include <algorithm>
#include <istream>
#include <limits>
#include <random>

#include "httplib.h"
#include "json.hpp"
#include "medmap/unicode.h"

namespace medmap {

namespace {

std::vector<std::string> KeyTokens(std::string_view phrase) {
  std::vector<std::string> out;
  for (const Token& t : Tokenize(phrase)) out.push_back(NormalizeTerm(t.surface));
  return out;
}

}  // namespace

void GlossaryTranslator::Add(std::string_view source_phrase,
                             std::string target_phrase) {
  auto key = KeyTokens(source_phrase);
  if (key.empty()) throw ContractError("empty glossary source phrase");
  if (TrimWhitespace(target_phrase).empty()) {
    throw ContractError("empty glossary translation for '" +
                        std::string(source_phrase) + "'");
  }
  longest_key_ = std::max(longest_key_, key.size());
  auto [it, inserted] = entries_.emplace(std::move(key), std::move(target_phrase));
  if (!inserted) {
    throw ContractError("duplicate glossary entry '" + std::string(source_phrase) + "'");
  }
}

GlossaryTranslator GlossaryTranslator::Load(std::istream& in,
                                            std::string source_language,
                                            std::string target_language,
                                            const std::string& source_name) {
  GlossaryTranslator g(std::move(source_language), std::move(target_language));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (TrimWhitespace(line).empty() || line.front() == '#') continue;
    const auto f = SplitOn(line, '\t');
    if (f.size() != 2) {
      throw RecordError(source_name, line_no,
                        "expected source_phrase<TAB>target_phrase");
    }
    try {
      g.Add(f[0], f[1]);
    } catch (const ContractError& e) {
      throw RecordError(source_name, line_no, e.what());
    }
  }
  return g;
}

std::string GlossaryTranslator::TranslateSentence(std::string_view sentence) const {
  const std::vector<Token> tokens = Tokenize(sentence);
  std::vector<std::string> keys;
  for (const Token& t : tokens) keys.push_back(NormalizeTerm(t.surface));

  std::string out;
  std::size_t cursor = 0;
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t matched = 0;
    const std::string* target = nullptr;
    const std::size_t max_len = std::min(longest_key_, tokens.size() - i);
    for (std::size_t len = max_len; len > 0 && !target; --len) {
      const std::vector<std::string> key(keys.begin() + i, keys.begin() + i + len);
      const auto it = entries_.find(key);
      if (it != entries_.end()) {
        target = &it->second;
        matched = len;
      }
    }
    if (!target) {
      ++i;
      continue;
    }
    const Span span{tokens[i].span.begin, tokens[i + matched - 1].span.end};
    out.append(sentence.substr(cursor, span.begin - cursor));
    out.append(*target);
    cursor = span.end;
    i += matched;
  }
  out.append(sentence.substr(cursor));
  return out;
}

std::vector<std::string> GlossaryTranslator::TranslateBatch(
    const std::vector<std::string>& sentences) const {
  std::vector<std::string> out;
  out.reserve(sentences.size());
  for (const std::string& s : sentences) out.push_back(TranslateSentence(s));
  return out;
}

// ---------------------------------------------------------------------------

void ExternalTranslatorConfig::Validate() const {
  if (timeout.count() <= 0) throw ConfigError("translator timeout must be > 0");
  if (batch_size < 1) throw ConfigError("translator batch size must be >= 1");
  if (retries < 0) throw ConfigError("translator retry count must be >= 0");
  if (endpoint.rfind("http://", 0) != 0) {
    throw ConfigError("translator endpoint must be an http:// URL");
  }
}

ExternalTranslator::ExternalTranslator(ExternalTranslatorConfig config,
                                       std::string source_language,
                                       std::string target_language)
    : config_(std::move(config)),
      source_(std::move(source_language)),
      target_(std::move(target_language)) {
  config_.Validate();
  const auto scheme_end = config_.endpoint.find("://") + 3;
  const auto path_start = config_.endpoint.find('/', scheme_end);
  if (path_start == std::string::npos) {
    scheme_host_port_ = config_.endpoint;
    path_ = "/";
  } else {
    scheme_host_port_ = config_.endpoint.substr(0, path_start);
    path_ = config_.endpoint.substr(path_start);
  }
}

std::vector<std::string> ExternalTranslator::TranslateBatch(
    const std::vector<std::string>& sentences) const {
  nlohmann::json body;
  body["source"] = source_;
  body["target"] = target_;
  body["sentences"] = sentences;
  const std::string payload = body.dump();

  httplib::Client client(scheme_host_port_);
  const auto seconds = config_.timeout.count() / 1000;
  const auto micros = (config_.timeout.count() % 1000) * 1000;
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    auto res = client.Post(path_, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    try {
      const auto reply = nlohmann::json::parse(res->body);
      auto out = reply.get<std::vector<std::string>>();
      if (out.size() != sentences.size()) {
        last_error = "response holds " + std::to_string(out.size()) +
                     " translations for " + std::to_string(sentences.size()) +
                     " sentences";
        continue;
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      last_error = std::string("bad response: ") + e.what();
    }
  }
  throw Error(last_error);
}

// ---------------------------------------------------------------------------

ShufflePlan MakeShufflePlan(std::size_t n, std::uint64_t seed) {
  ShufflePlan plan;
  plan.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) plan.order[i] = i;
  std::mt19937_64 rng(seed);
  // Uniform draw in [0, bound] without modulo bias.
  auto draw = [&rng](std::uint64_t bound) {
    const std::uint64_t range = bound + 1;
    if (range == 0) return rng();
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
      x = rng();
    } while (x >= limit);
    return x % range;
  };
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(draw(i - 1));
    std::swap(plan.order[i - 1], plan.order[j]);
  }
  plan.inverse.resize(n);
  for (std::size_t k = 0; k < n; ++k) plan.inverse[plan.order[k]] = k;
  return plan;
}

TranslationResult TranslateDocument(const Document& doc,
                                    const Translator& translator,
                                    std::uint64_t seed) {
  if (doc.language != translator.source_language()) {
    throw ConfigError("document " + doc.doc_id + " is '" + doc.language +
                      "' but the translator reads '" +
                      translator.source_language() + "'");
  }
  const std::size_t n = doc.sentences.size();
  const ShufflePlan plan = MakeShufflePlan(n, seed);
  const std::size_t batch = std::max<std::size_t>(1, translator.batch_size());

  std::vector<std::string> translated(n);
  for (std::size_t k = 0; k < n; k += batch) {
    const std::size_t end = std::min(n, k + batch);
    std::vector<std::string> submitted;
    for (std::size_t s = k; s < end; ++s) {
      submitted.push_back(doc.sentences[plan.order[s]]);
    }
    std::vector<std::string> got;
    try {
      got = translator.TranslateBatch(submitted);
    } catch (const TranslationError&) {
      throw;
    } catch (const Error& e) {
      throw TranslationError(plan.order[k], e.what());
    }
    if (got.size() != submitted.size()) {
      throw TranslationError(plan.order[k], "translator returned a short batch");
    }
    for (std::size_t s = k; s < end; ++s) {
      translated[plan.order[s]] = std::move(got[s - k]);
    }
  }

  TranslationResult result;
  result.document = doc;
  result.document.language = translator.target_language();
  result.document.sentences = translated;
  for (std::size_t i = 0; i < n; ++i) {
    result.log.push_back({i, doc.sentences[i], translated[i]});
  }
  return result;
}

}  // namespace medmap
