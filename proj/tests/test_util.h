#ifndef MEDMAP_TESTS_TEST_UTIL_H_
#define MEDMAP_TESTS_TEST_UTIL_H_

#include <sstream>
#include <string>
#include <vector>

#include "medmap/thesaurus.h"

namespace medmap::testing {

// Records in the pipe format, one per line.
inline std::vector<ConceptRecord> Records(const std::string& text) {
  std::istringstream in(text);
  return ReadConceptRecords(in, "test");
}

inline KnowledgeSource Ks(const std::string& text, const std::string& language = "it",
                          const SemanticGroupDef* group = nullptr) {
  return BuildKnowledgeSource(Records(text), language, group);
}

// One concept per term: {cui, term} pairs, none marked preferred.
inline KnowledgeSource KsOf(const std::vector<std::pair<std::string, std::string>>& terms,
                            const std::string& language = "it") {
  std::string text;
  for (const auto& [cui, term] : terms) {
    text += cui + "|" + language + "|" + term + "|N|Finding|TEST\n";
  }
  return Ks(text, language);
}

inline std::string DataDir() { return MEDMAP_DATA_DIR; }

}  // namespace medmap::testing

#endif  // MEDMAP_TESTS_TEST_UTIL_H_
