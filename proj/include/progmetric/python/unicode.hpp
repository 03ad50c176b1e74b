#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

// Minimal Unicode support for the Python front-end. There is no Unicode
// character database here; identifier and printability classes are
// approximated by block ranges. The approximation only affects which
// non-ASCII characters are accepted in identifiers and how unusual characters
// are spelled inside constant labels; labels stay injective either way.

namespace progmetric::python::unicode {

struct Decoded {
    char32_t cp;
    std::size_t length;
};

/// Decodes one UTF-8 sequence at `pos`; nullopt on malformed input.
inline std::optional<Decoded> decode_utf8(std::string_view s, std::size_t pos) {
    if (pos >= s.size()) return std::nullopt;
    auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return Decoded{b0, 1};
    std::size_t len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return std::nullopt;
    }
    if (pos + len > s.size()) return std::nullopt;
    for (std::size_t i = 1; i < len; ++i) {
        auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return std::nullopt;
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong forms, surrogates and out-of-range values are rejected.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        return std::nullopt;
    return Decoded{cp, len};
}

/// Encodes a code point; lone surrogates are encoded as-is (WTF-8 style).
inline void append_utf8(std::string& out, char32_t cp) {
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

inline bool in(char32_t c, char32_t lo, char32_t hi) { return c >= lo && c <= hi; }

/// Approximates XID_Start for non-ASCII code points.
inline bool is_identifier_start_nonascii(char32_t c) {
    if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
    if (in(c, 0xC0, 0x2C1) && c != 0xD7 && c != 0xF7) return true;
    if (in(c, 0x370, 0x3FF) && c != 0x37E && c != 0x387) return true;
    if (in(c, 0x400, 0x52F) && !in(c, 0x482, 0x489)) return true;
    if (in(c, 0x531, 0x1FFF)) return true;
    if (in(c, 0x2C00, 0x2DFF)) return true;
    if (in(c, 0x3041, 0x30FF) && c != 0x30FB) return true;
    if (in(c, 0x3400, 0x9FFF) || in(c, 0xA000, 0xA4CF) || in(c, 0xAC00, 0xD7A3)) return true;
    if (in(c, 0xF900, 0xFAFF)) return true;
    if (in(c, 0xFF21, 0xFF3A) || in(c, 0xFF41, 0xFF5A) || in(c, 0xFF66, 0xFFDC)) return true;
    if (in(c, 0x10000, 0x1EFFF)) return true;
    if (in(c, 0x20000, 0x3134A)) return true;
    return false;
}

/// Approximates XID_Continue for non-ASCII code points.
inline bool is_identifier_continue_nonascii(char32_t c) {
    if (is_identifier_start_nonascii(c)) return true;
    if (c == 0xB7 || in(c, 0x300, 0x36F) || in(c, 0x483, 0x487)) return true;
    if (in(c, 0xFF10, 0xFF19)) return true;
    return false;
}

/// Approximates str.isprintable() for a single code point.
inline bool is_printable(char32_t c) {
    if (c < 0x20 || c == 0x7F) return false;
    if (c < 0x7F) return true;
    if (in(c, 0x80, 0xA0) || c == 0xAD) return false;
    if (in(c, 0x600, 0x605) || c == 0x61C || c == 0x6DD || c == 0x70F || c == 0x180E) return false;
    if (c == 0x1680 || in(c, 0x2000, 0x200F) || in(c, 0x2028, 0x202F)) return false;
    if (in(c, 0x205F, 0x206F) || c == 0x3000 || c == 0xFEFF) return false;
    if (in(c, 0xD800, 0xF8FF)) return false;  // surrogates and private use
    if (in(c, 0xFDD0, 0xFDEF) || in(c, 0xFFF0, 0xFFFB)) return false;
    if ((c & 0xFFFE) == 0xFFFE) return false;
    if (in(c, 0xE0000, 0xE0FFF) || c >= 0xF0000) return false;
    return true;
}

}  // namespace progmetric::python::unicode
