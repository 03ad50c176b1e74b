#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "progmetric/python/error.hpp"
#include "progmetric/python/literals.hpp"
#include "progmetric/python/unicode.hpp"

namespace progmetric::python {

enum class Tok { Name, Number, String, Op, Newline, Indent, Dedent, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int column;
};

namespace detail {

inline bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Tokenizer {
public:
    explicit Tokenizer(std::string source) : src_(std::move(source)) {}

    std::vector<Token> run() {
        prepare();
        indents_ = {0};
        alt_indents_ = {0};
        at_line_start_ = true;
        while (true) {
            if (at_line_start_ && depth_ == 0) {
                if (!handle_indentation()) break;
                continue;
            }
            if (pos_ >= src_.size()) break;
            scan_token();
        }
        if (depth_ > 0) fail("unexpected EOF while parsing", open_line_, open_col_);
        if (!toks_.empty() && toks_.back().kind != Tok::Newline && toks_.back().kind != Tok::Dedent &&
            toks_.back().kind != Tok::Indent)
            emit(Tok::Newline, "");
        while (indents_.size() > 1) {
            indents_.pop_back();
            emit(Tok::Dedent, "");
        }
        emit(Tok::End, "");
        return std::move(toks_);
    }

private:
    std::string src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    std::size_t line_start_ = 0;
    int depth_ = 0;
    std::vector<char> brackets_;
    int open_line_ = 0, open_col_ = 0;
    bool at_line_start_ = true;
    std::vector<int> indents_, alt_indents_;
    std::vector<Token> toks_;

    [[noreturn]] void fail(const std::string& msg) const { fail(msg, line_, column()); }
    [[noreturn]] static void fail(const std::string& msg, int line, int col) { throw ParseError(msg, line, col); }

    int column() const { return static_cast<int>(pos_ - line_start_) + 1; }
    char peek(std::size_t k = 0) const { return pos_ + k < src_.size() ? src_[pos_ + k] : '\0'; }

    void emit(Tok kind, std::string text) { toks_.push_back({kind, std::move(text), line_, column()}); }
    void emit_at(Tok kind, std::string text, int line, int col) { toks_.push_back({kind, std::move(text), line, col}); }

    void newline_advance() {
        ++pos_;
        ++line_;
        line_start_ = pos_;
    }

    // PEP 263 cookie on line 1, or on line 2 when line 1 is blank or a comment.
    static std::string coding_cookie(std::string_view s) {
        for (int line = 0; line < 2 && !s.empty(); ++line) {
            std::size_t eol = s.find_first_of("\r\n");
            std::string_view l = s.substr(0, eol);
            std::size_t i = l.find_first_not_of(" \t\f");
            bool comment = i != std::string_view::npos && l[i] == '#';
            if (comment) {
                for (std::size_t at = l.find("coding", i); at != std::string_view::npos;
                     at = l.find("coding", at + 1)) {
                    std::size_t k = at + 6;
                    if (k >= l.size() || (l[k] != ':' && l[k] != '=')) continue;
                    ++k;
                    while (k < l.size() && (l[k] == ' ' || l[k] == '\t')) ++k;
                    std::size_t b = k;
                    while (k < l.size() && (std::isalnum(static_cast<unsigned char>(l[k])) || l[k] == '-' ||
                                            l[k] == '_' || l[k] == '.'))
                        ++k;
                    if (k > b) return std::string(l.substr(b, k - b));
                }
            }
            if (!comment && i != std::string_view::npos) break;
            if (eol == std::string_view::npos) break;
            s.remove_prefix(eol + 1);
        }
        return {};
    }

    // Only the UTF-8, Latin-1 and ASCII families are supported.
    void apply_encoding(bool had_bom) {
        std::string name = coding_cookie(src_);
        if (name.empty()) return;
        std::string norm;
        for (char c : name) {
            if (c == '_' || c == '-') {
                if (!norm.empty() && norm.back() != '-') norm.push_back('-');
            } else {
                norm.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
            }
        }
        while (!norm.empty() && norm.back() == '-') norm.pop_back();
        name = std::move(norm);
        auto one_of = [&](std::initializer_list<std::string_view> xs) {
            for (auto x : xs)
                if (name == x) return true;
            return false;
        };
        if (one_of({"utf-8", "utf8", "u8", "utf", "utf-8-sig"}) || name.rfind("utf-8-", 0) == 0) return;
        if (had_bom) fail("encoding problem: " + name + " with BOM", 1, 1);
        if (one_of({"latin-1", "latin1", "iso-8859-1", "iso8859-1", "iso-latin-1", "l1", "latin", "8859",
                    "cp819", "iso-ir-100"}) ||
            name.rfind("latin-1-", 0) == 0 || name.rfind("iso-8859-1-", 0) == 0 ||
            name.rfind("iso-latin-1-", 0) == 0) {
            std::string out;
            for (char c : src_) unicode::append_utf8(out, static_cast<unsigned char>(c));
            src_ = std::move(out);
            return;
        }
        if (one_of({"ascii", "us-ascii", "646", "us"})) {
            for (char c : src_)
                if (static_cast<unsigned char>(c) >= 0x80) fail("'ascii' codec can't decode source", 1, 1);
            return;
        }
        fail("unknown or unsupported encoding: " + name, 1, 1);
    }

    // BOM removal, encoding cookie, UTF-8 validation, newline normalization.
    void prepare() {
        bool had_bom = src_.size() >= 3 && src_.compare(0, 3, "\xEF\xBB\xBF") == 0;
        if (had_bom) src_.erase(0, 3);
        apply_encoding(had_bom);
        std::string out;
        out.reserve(src_.size() + 1);
        int line = 1;
        for (std::size_t i = 0; i < src_.size();) {
            char c = src_[i];
            if (c == '\0') fail("source code cannot contain null bytes", line, 1);
            if (static_cast<unsigned char>(c) >= 0x80) {
                auto d = unicode::decode_utf8(src_, i);
                if (!d) fail("invalid UTF-8 in source", line, 1);
                out.append(src_, i, d->length);
                i += d->length;
                continue;
            }
            if (c == '\r') {
                out.push_back('\n');
                ++line;
                i += (i + 1 < src_.size() && src_[i + 1] == '\n') ? 2 : 1;
                continue;
            }
            if (c == '\n') ++line;
            out.push_back(c);
            ++i;
        }
        src_ = std::move(out);
    }

    // Measures leading whitespace of a logical line and emits INDENT/DEDENT.
    // Returns false at end of input.
    bool handle_indentation() {
        int col = 0, alt = 0;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ') {
                ++col;
                ++alt;
            } else if (c == '\t') {
                col = (col / 8 + 1) * 8;
                ++alt;
            } else if (c == '\f') {
                col = alt = 0;
            } else {
                break;
            }
            ++pos_;
        }
        if (pos_ >= src_.size()) return false;
        char c = src_[pos_];
        if (c == '#' || c == '\n') {
            // blank or comment-only line
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            if (pos_ < src_.size()) newline_advance();
            return true;
        }
        at_line_start_ = false;
        if (col == indents_.back()) {
            if (alt != alt_indents_.back()) fail("inconsistent use of tabs and spaces in indentation");
        } else if (col > indents_.back()) {
            if (alt <= alt_indents_.back()) fail("inconsistent use of tabs and spaces in indentation");
            if (indents_.size() >= 100) fail("too many levels of indentation");
            indents_.push_back(col);
            alt_indents_.push_back(alt);
            emit(Tok::Indent, "");
        } else {
            while (indents_.size() > 1 && col < indents_.back()) {
                indents_.pop_back();
                alt_indents_.pop_back();
                emit(Tok::Dedent, "");
            }
            if (col != indents_.back()) fail("unindent does not match any outer indentation level");
            if (alt != alt_indents_.back()) fail("inconsistent use of tabs and spaces in indentation");
        }
        return true;
    }

    bool starts_identifier(std::size_t at, std::size_t* len) const {
        char c = at < src_.size() ? src_[at] : '\0';
        if (is_ascii_alpha(c) || c == '_') {
            *len = 1;
            return true;
        }
        if (static_cast<unsigned char>(c) >= 0x80) {
            auto d = unicode::decode_utf8(src_, at);
            if (d && unicode::is_identifier_start_nonascii(d->cp)) {
                *len = d->length;
                return true;
            }
        }
        return false;
    }

    bool continues_identifier(std::size_t at, std::size_t* len) const {
        char c = at < src_.size() ? src_[at] : '\0';
        if (is_ascii_alpha(c) || c == '_' || is_digit(c)) {
            *len = 1;
            return true;
        }
        if (static_cast<unsigned char>(c) >= 0x80) {
            auto d = unicode::decode_utf8(src_, at);
            if (d && unicode::is_identifier_continue_nonascii(d->cp)) {
                *len = d->length;
                return true;
            }
        }
        return false;
    }

    void scan_token() {
        char c = src_[pos_];
        if (c == ' ' || c == '\t' || c == '\f') {
            ++pos_;
            return;
        }
        if (c == '#') {
            while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            return;
        }
        if (c == '\n') {
            if (depth_ == 0) {
                emit(Tok::Newline, "");
                at_line_start_ = true;
            }
            newline_advance();
            return;
        }
        if (c == '\\') {
            if (peek(1) != '\n') fail("unexpected character after line continuation character");
            ++pos_;
            newline_advance();
            if (pos_ >= src_.size()) fail("unexpected EOF while parsing");
            return;
        }
        std::size_t len = 0;
        if (starts_identifier(pos_, &len)) {
            scan_name_or_string();
            return;
        }
        if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
            scan_number();
            return;
        }
        if (c == '\'' || c == '"') {
            scan_string(pos_, pos_);
            return;
        }
        scan_operator();
    }

    void scan_name_or_string() {
        std::size_t start = pos_;
        int col = column();
        // String prefixes: r, u, b, f and the two-letter combinations.
        std::size_t k = 0;
        while (k < 2 && start + k < src_.size() && std::string_view("rRuUbBfF").find(src_[start + k]) !=
                                                         std::string_view::npos)
            ++k;
        for (std::size_t plen = k; plen >= 1; --plen) {
            char q = start + plen < src_.size() ? src_[start + plen] : '\0';
            if ((q == '\'' || q == '"') && valid_prefix(std::string_view(src_).substr(start, plen))) {
                scan_string(start, start + plen);
                return;
            }
        }
        std::size_t len = 0;
        starts_identifier(pos_, &len);
        pos_ += len;
        while (continues_identifier(pos_, &len)) pos_ += len;
        if (pos_ < src_.size() && static_cast<unsigned char>(src_[pos_]) >= 0x80)
            fail("invalid character in identifier");
        emit_at(Tok::Name, src_.substr(start, pos_ - start), line_, col);
    }

    static bool valid_prefix(std::string_view p) {
        std::string low;
        for (char c : p) low.push_back(static_cast<char>(c | 0x20));
        return low == "r" || low == "u" || low == "b" || low == "f" || low == "br" || low == "rb" ||
               low == "fr" || low == "rf";
    }

    void scan_string(std::size_t start, std::size_t quote_at) {
        int line = line_, col = static_cast<int>(start - line_start_) + 1;
        char q = src_[quote_at];
        bool triple = quote_at + 2 < src_.size() && src_[quote_at + 1] == q && src_[quote_at + 2] == q;
        pos_ = quote_at + (triple ? 3 : 1);
        while (true) {
            if (pos_ >= src_.size()) {
                fail(triple ? "unterminated triple-quoted string literal" : "unterminated string literal",
                     line, col);
            }
            char c = src_[pos_];
            if (c == '\\') {
                ++pos_;
                if (pos_ >= src_.size()) continue;
                if (src_[pos_] == '\n') newline_advance();
                else ++pos_;
                continue;
            }
            if (c == '\n') {
                if (!triple) fail("unterminated string literal", line, col);
                newline_advance();
                continue;
            }
            if (c == q) {
                if (!triple) {
                    ++pos_;
                    break;
                }
                if (peek(1) == q && peek(2) == q) {
                    pos_ += 3;
                    break;
                }
            }
            ++pos_;
        }
        emit_at(Tok::String, src_.substr(start, pos_ - start), line, col);
    }

    // Python 3.10 lets a number run directly into a handful of keywords.
    bool keyword_follows() const {
        for (std::string_view kw : {"and", "else", "for", "if", "in", "is", "not", "or"})
            if (std::string_view(src_).substr(pos_, kw.size()) == kw) return true;
        return false;
    }

    void end_of_number(const char* kind) {
        std::size_t len = 0;
        if (starts_identifier(pos_, &len) || is_digit(peek())) {
            if (keyword_follows()) return;
            fail(std::string("invalid ") + kind + " literal");
        }
    }

    // digits with single underscores between them; returns false if none read
    bool digit_run(bool (*ok)(char), const char* kind) {
        if (!ok(peek())) return false;
        while (true) {
            while (ok(peek())) ++pos_;
            if (peek() != '_') break;
            ++pos_;
            if (!ok(peek())) fail(std::string("invalid ") + kind + " literal");
        }
        return true;
    }

    void scan_number() {
        std::size_t start = pos_;
        int col = column();
        auto dec = [](char c) { return c >= '0' && c <= '9'; };
        auto finish = [&] { emit_at(Tok::Number, src_.substr(start, pos_ - start), line_, col); };
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'o' || peek(1) == 'O' ||
                              peek(1) == 'b' || peek(1) == 'B')) {
            char base = static_cast<char>(peek(1) | 0x20);
            pos_ += 2;
            if (peek() == '_') ++pos_;
            const char* kind = base == 'x' ? "hexadecimal" : base == 'o' ? "octal" : "binary";
            bool read;
            if (base == 'x') read = digit_run([](char c) { return is_hex_digit(c); }, kind);
            else if (base == 'o') read = digit_run([](char c) { return c >= '0' && c <= '7'; }, kind);
            else read = digit_run([](char c) { return c == '0' || c == '1'; }, kind);
            if (!read) fail(std::string("invalid ") + kind + " literal");
            if (is_digit(peek())) fail(std::string("invalid digit '") + peek() + "' in " + kind + " literal");
            end_of_number(kind);
            finish();
            return;
        }
        bool is_float = false;
        bool leading_zero_int = false;
        if (peek() != '.') {
            bool nonzero = false;
            std::size_t s = pos_;
            digit_run(dec, "decimal");
            for (std::size_t i = s; i < pos_; ++i)
                if (src_[i] != '0' && src_[i] != '_') nonzero = true;
            leading_zero_int = src_[s] == '0' && nonzero;
        }
        if (peek() == '.') {
            is_float = true;
            ++pos_;
            digit_run(dec, "decimal");
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t save = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') {
                ++pos_;
                if (!digit_run(dec, "decimal")) fail("invalid decimal literal");
                is_float = true;
            } else if (digit_run(dec, "decimal")) {
                is_float = true;
            } else {
                pos_ = save;
                if (!keyword_follows() || std::string_view(src_).substr(pos_, 4) != "else")
                    fail("invalid decimal literal");
                if (leading_zero_int) fail("leading zeros in decimal integer literals are not permitted");
                finish();
                return;
            }
        }
        if (peek() == 'j' || peek() == 'J') {
            ++pos_;
            end_of_number("imaginary");
            finish();
            return;
        }
        if (!is_float && leading_zero_int)
            fail("leading zeros in decimal integer literals are not permitted");
        end_of_number("decimal");
        finish();
    }

    void scan_operator() {
        static const char* three[] = {"**=", "//=", ">>=", "<<=", "..."};
        static const char* two[] = {"->", ":=", "!=", "==", "<=", ">=", "**", "//", "<<", ">>",
                                    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@="};
        int col = column();
        std::string_view rest = std::string_view(src_).substr(pos_);
        for (const char* op : three) {
            std::string_view o(op);
            if (rest.substr(0, 3) == o) {
                pos_ += 3;
                emit_at(Tok::Op, std::string(o), line_, col);
                return;
            }
        }
        for (const char* op : two) {
            if (rest.substr(0, 2) == op) {
                pos_ += 2;
                emit_at(Tok::Op, op, line_, col);
                return;
            }
        }
        char c = rest[0];
        if (std::string_view("+-*/%@&|^~<>()[]{},:.;=").find(c) == std::string_view::npos) {
            if (static_cast<unsigned char>(c) >= 0x80) fail("invalid character in source", line_, col);
            fail(std::string("invalid character '") + c + "'", line_, col);
        }
        ++pos_;
        if (c == '(' || c == '[' || c == '{') {
            if (depth_ == 0) {
                open_line_ = line_;
                open_col_ = col;
            }
            if (++depth_ > 200) fail("too many nested parentheses", line_, col);
            brackets_.push_back(c);
        } else if (c == ')' || c == ']' || c == '}') {
            if (depth_ == 0) fail(std::string("unmatched '") + c + "'", line_, col);
            char open = brackets_.back();
            if ((open == '(' && c != ')') || (open == '[' && c != ']') || (open == '{' && c != '}'))
                fail(std::string("closing parenthesis '") + c + "' does not match opening parenthesis '" +
                         open + "'",
                     line_, col);
            brackets_.pop_back();
            --depth_;
        }
        emit_at(Tok::Op, std::string(1, c), line_, col);
    }
};

}  // namespace detail

/// Splits Python source into tokens, including NEWLINE/INDENT/DEDENT.
/// Input may carry a UTF-8 BOM and any newline convention.
inline std::vector<Token> tokenize(std::string source) {
    return detail::Tokenizer(std::move(source)).run();
}

}  // namespace progmetric::python
