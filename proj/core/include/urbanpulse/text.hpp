#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace urbanpulse::text {

/// True when the bytes form well-formed UTF-8.
bool is_valid_utf8(std::string_view bytes);

/// Full Unicode simple lowercase mapping. Ill-formed sequences are dropped.
std::string casefold(std::string_view utf8);

/// Strips ASCII and Unicode whitespace from both ends.
std::string trim(std::string_view utf8);

/// Splits on every code point that is not a letter or digit and case-folds
/// each piece. Diacritics are kept. Never returns empty tokens.
std::vector<std::string> tokenize(std::string_view utf8);

/// Number of code points in well-formed UTF-8.
std::size_t codepoint_count(std::string_view utf8);

}  // namespace urbanpulse::text
