#include "urbanpulse/text.hpp"

#include <algorithm>
#include <clocale>
#include <cwctype>
#include <locale.h>
#include <optional>

#include "urbanpulse/error.hpp"

namespace urbanpulse::text {
namespace {

// Character classification comes from the C library's UTF-8 tables.
locale_t utf8_locale() {
    static const locale_t loc = [] {
        for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
            if (locale_t l = newlocale(LC_CTYPE_MASK, name, static_cast<locale_t>(nullptr))) {
                return l;
            }
        }
        throw InternalError("no UTF-8 locale available for character classification");
    }();
    return loc;
}

// Decodes one code point starting at pos; advances pos past it. nullopt on an
// ill-formed sequence (pos then skips one byte).
std::optional<char32_t> decode(std::string_view s, std::size_t& pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
        ++pos;
        return b0;
    } else if (b0 >= 0xC2 && b0 <= 0xDF) {
        len = 2;
        cp = b0 & 0x1F;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
        len = 3;
        cp = b0 & 0x0F;
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++pos;
        return std::nullopt;
    }
    if (pos + len > s.size()) {
        ++pos;
        return std::nullopt;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[pos + k]);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return std::nullopt;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates, and values past U+10FFFF.
    if ((len == 3 && cp < 0x800) || (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return std::nullopt;
    }
    pos += len;
    return cp;
}

void encode(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

char32_t lower(char32_t cp) {
    return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), utf8_locale()));
}

bool is_word_char(char32_t cp) {
    return iswalnum_l(static_cast<wint_t>(cp), utf8_locale()) != 0;
}

bool is_space(char32_t cp) {
    return iswspace_l(static_cast<wint_t>(cp), utf8_locale()) != 0 || cp == 0xA0;
}

}  // namespace

bool is_valid_utf8(std::string_view bytes) {
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        if (!decode(bytes, pos)) {
            return false;
        }
    }
    return true;
}

std::string casefold(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    std::size_t pos = 0;
    while (pos < utf8.size()) {
        if (const auto cp = decode(utf8, pos)) {
            encode(lower(*cp), out);
        }
    }
    return out;
}

std::string trim(std::string_view utf8) {
    std::size_t first = utf8.size();
    std::size_t last = 0;
    std::size_t pos = 0;
    while (pos < utf8.size()) {
        const std::size_t start = pos;
        const auto cp = decode(utf8, pos);
        if (!cp || !is_space(*cp)) {
            first = std::min(first, start);
            last = pos;
        }
    }
    return first >= last ? std::string{} : std::string(utf8.substr(first, last - first));
}

std::vector<std::string> tokenize(std::string_view utf8) {
    std::vector<std::string> tokens;
    std::string current;
    std::size_t pos = 0;
    while (pos < utf8.size()) {
        const auto cp = decode(utf8, pos);
        if (cp && is_word_char(*cp)) {
            encode(lower(*cp), current);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::size_t codepoint_count(std::string_view utf8) {
    std::size_t n = 0;
    std::size_t pos = 0;
    while (pos < utf8.size()) {
        decode(utf8, pos);
        ++n;
    }
    return n;
}

}  // namespace urbanpulse::text
