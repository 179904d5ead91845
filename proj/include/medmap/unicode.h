#ifndef MEDMAP_UNICODE_H_
#define MEDMAP_UNICODE_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace medmap {

enum class CharClass { kLetter, kDigit, kMark, kSpace, kOther };

// Decodes the code point starting at `*pos` and advances `*pos` past it.
// Ill-formed sequences consume a single byte and decode to U+FFFD.
char32_t DecodeUtf8(std::string_view text, std::size_t* pos);

CharClass Classify(char32_t cp);

bool IsValidUtf8(std::string_view text);

// Lowercase + NFC. With `fold_accents`, combining marks are stripped after
// canonical decomposition ("è" -> "e").
std::string NormalizeTerm(std::string_view text, bool fold_accents = false);

std::string_view TrimWhitespace(std::string_view text);

std::vector<std::string> SplitOn(std::string_view text, char sep);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace medmap

#endif  // MEDMAP_UNICODE_H_
