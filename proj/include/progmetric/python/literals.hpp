#pragma once

// Literal decoding and Python-compatible repr() spelling for constants.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "progmetric/python/error.hpp"
#include "progmetric/python/unicode.hpp"

namespace progmetric::python {

struct Position {
    int line = 1;
    int column = 1;
};

inline bool is_hex_digit(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

inline int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return c - 'A' + 10;
}

/// Decodes the body of a (non-f) string literal into code points. Bytes
/// literals yield code points < 256. `\N{...}` escapes are kept verbatim since
/// no character-name database is available.
inline std::u32string decode_string_body(std::string_view body, bool raw, bool bytes, Position at) {
    std::u32string out;
    std::size_t i = 0;
    auto fail = [&](const std::string& msg) -> void { throw ParseError(msg, at.line, at.column); };
    while (i < body.size()) {
        auto c = static_cast<unsigned char>(body[i]);
        if (c >= 0x80) {
            if (bytes) fail("bytes can only contain ASCII literal characters");
            auto d = unicode::decode_utf8(body, i);
            if (!d) fail("invalid UTF-8 in string literal");
            out.push_back(d->cp);
            i += d->length;
            continue;
        }
        if (c != '\\' || raw) {
            out.push_back(c);
            ++i;
            continue;
        }
        if (i + 1 >= body.size()) {
            out.push_back('\\');
            ++i;
            continue;
        }
        char e = body[i + 1];
        i += 2;
        switch (e) {
            case '\n': break;
            case '\\': out.push_back('\\'); break;
            case '\'': out.push_back('\''); break;
            case '"': out.push_back('"'); break;
            case 'a': out.push_back(0x07); break;
            case 'b': out.push_back(0x08); break;
            case 'f': out.push_back(0x0C); break;
            case 'n': out.push_back('\n'); break;
            case 'r': out.push_back('\r'); break;
            case 't': out.push_back('\t'); break;
            case 'v': out.push_back(0x0B); break;
            case '0': case '1': case '2': case '3': case '4': case '5': case '6': case '7': {
                char32_t v = static_cast<char32_t>(e - '0');
                for (int k = 0; k < 2 && i < body.size() && body[i] >= '0' && body[i] <= '7'; ++k)
                    v = v * 8 + static_cast<char32_t>(body[i++] - '0');
                if (bytes) v &= 0xFF;
                out.push_back(v);
                break;
            }
            case 'x': {
                if (i + 2 > body.size() || !is_hex_digit(body[i]) || !is_hex_digit(body[i + 1]))
                    fail("truncated \\xXX escape");
                out.push_back(static_cast<char32_t>(hex_value(body[i]) * 16 + hex_value(body[i + 1])));
                i += 2;
                break;
            }
            case 'u':
            case 'U': {
                if (bytes) {
                    out.push_back('\\');
                    out.push_back(static_cast<char32_t>(e));
                    break;
                }
                std::size_t n = e == 'u' ? 4 : 8;
                char32_t v = 0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (i + k >= body.size() || !is_hex_digit(body[i + k]))
                        fail(e == 'u' ? "truncated \\uXXXX escape" : "truncated \\UXXXXXXXX escape");
                    v = v * 16 + static_cast<char32_t>(hex_value(body[i + k]));
                }
                if (v > 0x10FFFF) fail("illegal Unicode character");
                out.push_back(v);
                i += n;
                break;
            }
            case 'N': {
                out.push_back('\\');
                out.push_back('N');
                if (!bytes) {
                    if (i >= body.size() || body[i] != '{') fail("malformed \\N character escape");
                    auto close = body.find('}', i);
                    if (close == std::string_view::npos || close == i + 1)
                        fail("malformed \\N character escape");
                    for (; i <= close; ++i) out.push_back(static_cast<unsigned char>(body[i]));
                }
                break;
            }
            default:
                out.push_back('\\');
                --i;  // the escaped character is processed as ordinary text
                break;
        }
    }
    return out;
}

/// repr() of a str value.
inline std::string repr_str(const std::u32string& s) {
    bool has_single = false, has_double = false;
    for (char32_t c : s) {
        has_single |= c == '\'';
        has_double |= c == '"';
    }
    char quote = (has_single && !has_double) ? '"' : '\'';
    std::string out(1, quote);
    static const char* hex = "0123456789abcdef";
    auto hex_escape = [&](char32_t c, char kind, int digits) {
        out.push_back('\\');
        out.push_back(kind);
        for (int k = digits - 1; k >= 0; --k) out.push_back(hex[(c >> (4 * k)) & 0xF]);
    };
    for (char32_t c : s) {
        if (c == static_cast<char32_t>(quote) || c == '\\') {
            out.push_back('\\');
            out.push_back(static_cast<char>(c));
        } else if (c == '\t') {
            out += "\\t";
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c < 0x20 || c == 0x7F) {
            hex_escape(c, 'x', 2);
        } else if (c < 0x7F) {
            out.push_back(static_cast<char>(c));
        } else if (unicode::is_printable(c)) {
            unicode::append_utf8(out, c);
        } else if (c <= 0xFF) {
            hex_escape(c, 'x', 2);
        } else if (c <= 0xFFFF) {
            hex_escape(c, 'u', 4);
        } else {
            hex_escape(c, 'U', 8);
        }
    }
    out.push_back(quote);
    return out;
}

/// repr() of a bytes value (code points are < 256).
inline std::string repr_bytes(const std::u32string& s) {
    bool has_single = false, has_double = false;
    for (char32_t c : s) {
        has_single |= c == '\'';
        has_double |= c == '"';
    }
    char quote = (has_single && !has_double) ? '"' : '\'';
    std::string out = "b";
    out.push_back(quote);
    static const char* hex = "0123456789abcdef";
    for (char32_t c : s) {
        if (c == static_cast<char32_t>(quote) || c == '\\') {
            out.push_back('\\');
            out.push_back(static_cast<char>(c));
        } else if (c == '\t') {
            out += "\\t";
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c < 0x20 || c >= 0x7F) {
            out += "\\x";
            out.push_back(hex[(c >> 4) & 0xF]);
            out.push_back(hex[c & 0xF]);
        } else {
            out.push_back(static_cast<char>(c));
        }
    }
    out.push_back(quote);
    return out;
}

/// Decimal spelling of an integer literal of any base and size.
inline std::string int_literal_to_decimal(std::string_view text) {
    unsigned base = 10;
    std::size_t i = 0;
    if (text.size() > 1 && text[0] == '0') {
        char p = text[1];
        if (p == 'x' || p == 'X') base = 16, i = 2;
        else if (p == 'o' || p == 'O') base = 8, i = 2;
        else if (p == 'b' || p == 'B') base = 2, i = 2;
    }
    // little-endian limbs in base 1e9
    std::vector<std::uint32_t> limbs{0};
    constexpr std::uint64_t kLimb = 1000000000ULL;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '_') continue;
        std::uint64_t carry = static_cast<std::uint64_t>(hex_value(c));
        for (auto& limb : limbs) {
            std::uint64_t v = static_cast<std::uint64_t>(limb) * base + carry;
            limb = static_cast<std::uint32_t>(v % kLimb);
            carry = v / kLimb;
        }
        while (carry) {
            limbs.push_back(static_cast<std::uint32_t>(carry % kLimb));
            carry /= kLimb;
        }
    }
    std::string out = std::to_string(limbs.back());
    for (std::size_t k = limbs.size() - 1; k-- > 0;) {
        std::string part = std::to_string(limbs[k]);
        out += std::string(9 - part.size(), '0') + part;
    }
    return out;
}

/// Python's float repr ('r' format). Without `add_dot_0` the integral case
/// omits ".0", matching how complex numbers spell their components.
inline std::string float_repr(double v, bool add_dot_0 = true) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
    std::string sci(buf, res.ptr);
    std::string sign;
    if (!sci.empty() && sci[0] == '-') {
        sign = "-";
        sci.erase(0, 1);
    }
    auto epos = sci.find('e');
    std::string mant = sci.substr(0, epos);
    int exp10 = std::atoi(sci.c_str() + epos + 1);
    std::string digits;
    for (char c : mant)
        if (c != '.') digits.push_back(c);
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    int decpt = exp10 + 1;  // value = 0.DIGITS * 10^decpt
    std::string out;
    if (decpt <= -4 || decpt > 16) {
        out = digits.substr(0, 1);
        if (digits.size() > 1) out += "." + digits.substr(1);
        int e = decpt - 1;
        out += e < 0 ? "e-" : "e+";
        std::string es = std::to_string(e < 0 ? -e : e);
        if (es.size() < 2) es = "0" + es;
        out += es;
    } else if (decpt <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-decpt), '0') + digits;
    } else if (static_cast<std::size_t>(decpt) >= digits.size()) {
        out = digits + std::string(static_cast<std::size_t>(decpt) - digits.size(), '0');
        if (add_dot_0) out += ".0";
    } else {
        out = digits.substr(0, static_cast<std::size_t>(decpt)) + "." +
              digits.substr(static_cast<std::size_t>(decpt));
    }
    return sign + out;
}

/// repr() of the constant a NUMBER token denotes.
inline std::string number_constant_repr(std::string_view token) {
    std::string clean;
    for (char c : token)
        if (c != '_') clean.push_back(c);
    bool imaginary = !clean.empty() && (clean.back() == 'j' || clean.back() == 'J');
    if (imaginary) clean.pop_back();
    bool prefixed = clean.size() > 1 && clean[0] == '0' &&
                    std::string_view("xXoObB").find(clean[1]) != std::string_view::npos;
    bool is_float = !prefixed && clean.find_first_of(".eE") != std::string::npos;
    if (!imaginary && !is_float) return int_literal_to_decimal(clean);
    double v = std::strtod(clean.c_str(), nullptr);
    if (imaginary) return float_repr(v, false) + "j";
    return float_repr(v, true);
}

}  // namespace progmetric::python
