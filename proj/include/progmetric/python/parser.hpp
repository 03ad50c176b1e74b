#pragma once

// Recursive-descent parser for the Python 3.10 grammar. Produces the same
// node kinds and field layout as CPython's `ast` module; see parse.hpp for
// the conversion into labeled trees.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "progmetric/python/error.hpp"
#include "progmetric/python/literals.hpp"
#include "progmetric/python/tokenizer.hpp"

namespace progmetric::python {

/// Intermediate AST node. `attrs` holds the atomic fields in declaration
/// order; `kids` holds the node-valued fields, lists already flattened.
struct PyNode {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<PyNode> kids;
    bool parens = false;

    PyNode() = default;
    explicit PyNode(std::string k) : kind(std::move(k)) {}

    PyNode& set(const std::string& key, std::string value) {
        for (auto& a : attrs)
            if (a.first == key) {
                a.second = std::move(value);
                return *this;
            }
        attrs.emplace_back(key, std::move(value));
        return *this;
    }
    const std::string* get(std::string_view key) const {
        for (const auto& a : attrs)
            if (a.first == key) return &a.second;
        return nullptr;
    }
    PyNode& add(PyNode child) {
        kids.push_back(std::move(child));
        return *this;
    }
};

namespace detail {

inline bool is_hard_keyword(std::string_view s) {
    static constexpr std::array<std::string_view, 35> kws = {
        "False", "None",   "True",    "and",      "as",     "assert", "async", "await", "break",
        "class", "continue", "def",   "del",      "elif",   "else",   "except", "finally", "for",
        "from",  "global", "if",      "import",   "in",     "is",     "lambda", "nonlocal", "not",
        "or",    "pass",   "raise",   "return",   "try",    "while",  "with",  "yield"};
    for (auto k : kws)
        if (k == s) return true;
    return false;
}

inline PyNode make_name(const std::string& id, const char* ctx = "Load") {
    PyNode n("Name");
    n.set("id", id).set("ctx", ctx);
    return n;
}

inline PyNode make_constant(std::string repr) {
    PyNode n("Constant");
    n.set("value", std::move(repr));
    return n;
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : t_(std::move(toks)) {}

    PyNode parse_module() {
        PyNode mod("Module");
        while (cur().kind != Tok::End) parse_statement(mod.kids);
        return mod;
    }

    /// Parses the body of an f-string replacement field, already wrapped in
    /// parentheses by the caller.
    PyNode parse_fstring_expression() {
        PyNode e = parse_star_expressions();
        if (cur().kind == Tok::Newline) ++p_;
        if (cur().kind != Tok::End) error();
        return e;
    }

private:
    std::vector<Token> t_;
    std::size_t p_ = 0;
    int nesting_ = 0;

    static constexpr int kMaxNesting = 900;

    struct NestGuard {
        Parser& p;
        explicit NestGuard(Parser& parser) : p(parser) {
            if (++p.nesting_ > kMaxNesting) p.error("too many nested expressions");
        }
        ~NestGuard() { --p.nesting_; }
    };

    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return t_[p_]; }
    const Token& ahead(std::size_t k) const { return t_[std::min(p_ + k, t_.size() - 1)]; }

    [[noreturn]] void error(const std::string& msg = "invalid syntax") const {
        throw ParseError(msg, cur().line, cur().column);
    }

    bool at_op(std::string_view op) const { return cur().kind == Tok::Op && cur().text == op; }
    bool at_kw(std::string_view kw) const { return cur().kind == Tok::Name && cur().text == kw; }
    bool at_plain_name() const { return cur().kind == Tok::Name && !is_hard_keyword(cur().text); }

    bool accept_op(std::string_view op) {
        if (!at_op(op)) return false;
        ++p_;
        return true;
    }
    bool accept_kw(std::string_view kw) {
        if (!at_kw(kw)) return false;
        ++p_;
        return true;
    }
    void expect_op(std::string_view op) {
        if (!accept_op(op)) error();
    }
    void expect_kw(std::string_view kw) {
        if (!accept_kw(kw)) error();
    }
    std::string expect_name() {
        if (!at_plain_name()) error();
        return t_[p_++].text;
    }
    void expect_newline() {
        if (cur().kind != Tok::Newline) error();
        ++p_;
    }

    // ---- statements ----------------------------------------------------

    void parse_statement(std::vector<PyNode>& out) {
        const Token& tk = cur();
        if (tk.kind == Tok::Indent) error("unexpected indent");
        if (tk.kind == Tok::Name) {
            const std::string& w = tk.text;
            if (w == "def") return out.push_back(parse_funcdef({}, false));
            if (w == "class") return out.push_back(parse_classdef({}));
            if (w == "if") return out.push_back(parse_if());
            if (w == "while") return out.push_back(parse_while());
            if (w == "for") return out.push_back(parse_for(false));
            if (w == "with") return out.push_back(parse_with(false));
            if (w == "try") return out.push_back(parse_try());
            if (w == "async") {
                ++p_;
                if (at_kw("def")) return out.push_back(parse_funcdef({}, true));
                if (at_kw("for")) return out.push_back(parse_for(true));
                if (at_kw("with")) return out.push_back(parse_with(true));
                error();
            }
            if (w == "match") {
                if (auto m = try_parse_match()) return out.push_back(std::move(*m));
            }
        } else if (tk.kind == Tok::Op && tk.text == "@") {
            return out.push_back(parse_decorated());
        }
        parse_simple_statements(out);
    }

    void parse_simple_statements(std::vector<PyNode>& out) {
        while (true) {
            out.push_back(parse_simple_statement());
            if (accept_op(";")) {
                if (cur().kind == Tok::Newline) break;
                continue;
            }
            break;
        }
        expect_newline();
    }

    std::vector<PyNode> parse_block() {
        std::vector<PyNode> body;
        if (cur().kind == Tok::Newline) {
            ++p_;
            if (cur().kind != Tok::Indent) error("expected an indented block");
            ++p_;
            while (cur().kind != Tok::Dedent && cur().kind != Tok::End) parse_statement(body);
            if (cur().kind != Tok::Dedent) error();
            ++p_;
        } else {
            parse_simple_statements(body);
        }
        return body;
    }

    static void append(PyNode& n, std::vector<PyNode>&& xs) {
        for (auto& x : xs) n.kids.push_back(std::move(x));
    }

    PyNode parse_simple_statement() {
        const Token& tk = cur();
        if (tk.kind == Tok::Name) {
            const std::string& w = tk.text;
            if (w == "pass" || w == "break" || w == "continue") {
                ++p_;
                return PyNode(w == "pass" ? "Pass" : w == "break" ? "Break" : "Continue");
            }
            if (w == "return") {
                ++p_;
                PyNode n("Return");
                if (!at_stmt_end()) n.add(parse_star_expressions());
                return n;
            }
            if (w == "raise") {
                ++p_;
                PyNode n("Raise");
                if (!at_stmt_end()) {
                    n.add(parse_expression());
                    if (accept_kw("from")) n.add(parse_expression());
                }
                return n;
            }
            if (w == "global" || w == "nonlocal") {
                ++p_;
                std::string names = expect_name();
                while (accept_op(",")) names += "," + expect_name();
                PyNode n(w == "global" ? "Global" : "Nonlocal");
                n.set("names", names);
                return n;
            }
            if (w == "del") return parse_del();
            if (w == "assert") {
                ++p_;
                PyNode n("Assert");
                n.add(parse_expression());
                if (accept_op(",")) n.add(parse_expression());
                return n;
            }
            if (w == "import") return parse_import();
            if (w == "from") return parse_from_import();
        }
        return parse_expression_statement();
    }

    bool at_stmt_end() const { return cur().kind == Tok::Newline || at_op(";"); }

    static const char* augassign_op(std::string_view s) {
        static constexpr std::pair<std::string_view, const char*> ops[] = {
            {"+=", "Add"},     {"-=", "Sub"},    {"*=", "Mult"},   {"@=", "MatMult"}, {"/=", "Div"},
            {"%=", "Mod"},     {"&=", "BitAnd"}, {"|=", "BitOr"},  {"^=", "BitXor"},  {"<<=", "LShift"},
            {">>=", "RShift"}, {"**=", "Pow"},   {"//=", "FloorDiv"}};
        for (const auto& [tok, name] : ops)
            if (tok == s) return name;
        return nullptr;
    }

    PyNode parse_rhs() { return at_kw("yield") ? parse_yield() : parse_star_expressions(); }

    PyNode parse_expression_statement() {
        PyNode first = parse_rhs();
        if (at_op(":")) {
            ++p_;
            bool simple = first.kind == "Name" && !first.parens;
            if (first.kind != "Name" && first.kind != "Attribute" && first.kind != "Subscript")
                error("only single target (not " + describe(first) + ") can be annotated");
            to_target(first, "Store");
            PyNode n("AnnAssign");
            n.add(std::move(first));
            n.add(parse_expression());
            if (accept_op("=")) n.add(parse_rhs());
            n.set("simple", simple ? "1" : "0");
            return n;
        }
        if (cur().kind == Tok::Op) {
            if (const char* op = augassign_op(cur().text)) {
                if (first.kind != "Name" && first.kind != "Attribute" && first.kind != "Subscript")
                    error("'" + describe(first) + "' is an illegal expression for augmented assignment");
                ++p_;
                to_target(first, "Store");
                PyNode n("AugAssign");
                n.add(std::move(first));
                n.set("op", op);
                n.add(parse_rhs());
                return n;
            }
        }
        if (at_op("=")) {
            std::vector<PyNode> parts;
            parts.push_back(std::move(first));
            while (accept_op("=")) parts.push_back(parse_rhs());
            PyNode n("Assign");
            for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
                to_target(parts[i], "Store");
                n.add(std::move(parts[i]));
            }
            n.add(std::move(parts.back()));
            return n;
        }
        PyNode n("Expr");
        n.add(std::move(first));
        return n;
    }

    static std::string describe(const PyNode& n) {
        if (n.kind == "Tuple") return "tuple";
        if (n.kind == "List") return "list";
        if (n.kind == "Call") return "function call";
        if (n.kind == "Constant") return "literal";
        if (n.kind == "Compare") return "comparison";
        if (n.kind == "Yield" || n.kind == "YieldFrom") return "yield expression";
        if (n.kind == "NamedExpr") return "named expression";
        if (n.kind == "Starred") return "starred";
        if (n.kind == "Attribute") return "attribute";
        if (n.kind == "Subscript") return "subscript";
        return "expression";
    }

    /// Validates an assignment/deletion target and sets its context.
    void to_target(PyNode& n, const char* ctx) {
        bool del = std::string_view(ctx) == "Del";
        if (n.kind == "Name" || n.kind == "Attribute" || n.kind == "Subscript") {
            n.set("ctx", ctx);
            return;
        }
        if (n.kind == "Tuple" || n.kind == "List") {
            n.set("ctx", ctx);
            for (auto& k : n.kids) to_target(k, ctx);
            return;
        }
        if (n.kind == "Starred" && !del) {
            n.set("ctx", ctx);
            if (n.kids[0].kind == "Starred") error("cannot use starred expression here");
            to_target(n.kids[0], ctx);
            return;
        }
        error(std::string(del ? "cannot delete " : "cannot assign to ") + describe(n));
    }

    PyNode parse_del() {
        ++p_;
        PyNode n("Delete");
        while (true) {
            PyNode t = parse_primary();
            to_target(t, "Del");
            n.add(std::move(t));
            if (!accept_op(",")) break;
            if (at_stmt_end()) break;
        }
        if (!at_stmt_end()) error();
        return n;
    }

    std::string parse_dotted_name() {
        std::string name = expect_name();
        while (accept_op(".")) name += "." + expect_name();
        return name;
    }

    PyNode parse_import() {
        ++p_;
        PyNode n("Import");
        do {
            PyNode a("alias");
            a.set("name", parse_dotted_name());
            if (accept_kw("as")) a.set("asname", expect_name());
            n.add(std::move(a));
        } while (accept_op(","));
        return n;
    }

    PyNode parse_from_import() {
        ++p_;
        int level = 0;
        while (true) {
            if (accept_op(".")) ++level;
            else if (accept_op("...")) level += 3;
            else break;
        }
        PyNode n("ImportFrom");
        if (!at_kw("import")) n.set("module", parse_dotted_name());
        else if (level == 0) error();
        expect_kw("import");
        auto alias = [&] {
            PyNode a("alias");
            a.set("name", expect_name());
            if (accept_kw("as")) a.set("asname", expect_name());
            return a;
        };
        if (accept_op("*")) {
            PyNode a("alias");
            a.set("name", "*");
            n.add(std::move(a));
        } else if (accept_op("(")) {
            n.add(alias());
            while (accept_op(",")) {
                if (at_op(")")) break;
                n.add(alias());
            }
            expect_op(")");
        } else {
            n.add(alias());
            while (accept_op(",")) n.add(alias());
            if (at_op(",")) error("trailing comma not allowed without surrounding parentheses");
        }
        n.set("level", std::to_string(level));
        return n;
    }

    // ---- compound statements -------------------------------------------

    PyNode parse_decorated() {
        std::vector<PyNode> decorators;
        while (accept_op("@")) {
            decorators.push_back(parse_named_expression());
            expect_newline();
        }
        if (at_kw("def")) return parse_funcdef(std::move(decorators), false);
        if (at_kw("class")) return parse_classdef(std::move(decorators));
        if (accept_kw("async")) {
            if (at_kw("def")) return parse_funcdef(std::move(decorators), true);
        }
        error();
    }

    PyNode parse_funcdef(std::vector<PyNode> decorators, bool is_async) {
        expect_kw("def");
        PyNode n(is_async ? "AsyncFunctionDef" : "FunctionDef");
        n.set("name", expect_name());
        expect_op("(");
        PyNode args = parse_parameters(")", true);
        expect_op(")");
        std::optional<PyNode> returns;
        if (accept_op("->")) returns = parse_expression();
        expect_op(":");
        n.add(std::move(args));
        append(n, parse_block());
        append(n, std::move(decorators));
        if (returns) n.add(std::move(*returns));
        return n;
    }

    PyNode parse_classdef(std::vector<PyNode> decorators) {
        expect_kw("class");
        PyNode n("ClassDef");
        n.set("name", expect_name());
        std::vector<PyNode> bases, keywords;
        if (accept_op("(")) parse_call_arguments(bases, keywords, false);
        expect_op(":");
        append(n, std::move(bases));
        append(n, std::move(keywords));
        append(n, parse_block());
        append(n, std::move(decorators));
        return n;
    }

    /// Parameter list up to (not including) `close`.
    PyNode parse_parameters(std::string_view close, bool annotations) {
        std::vector<PyNode> posonly, args, kwonly, kw_defaults, defaults;
        std::optional<PyNode> vararg, kwarg;
        bool seen_default = false, seen_slash = false, seen_star = false, bare_star = false;
        auto param = [&] {
            PyNode a("arg");
            a.set("arg", expect_name());
            if (annotations && accept_op(":")) a.add(parse_expression());
            return a;
        };
        while (!at_op(close)) {
            if (accept_op("/")) {
                if (seen_slash || seen_star || args.empty()) error();
                seen_slash = true;
                posonly = std::move(args);
                args.clear();
            } else if (accept_op("*")) {
                if (seen_star) error();
                seen_star = true;
                if (at_op(",") || at_op(close)) bare_star = true;
                else vararg = param();
            } else if (accept_op("**")) {
                kwarg = param();
                accept_op(",");
                if (!at_op(close)) error("arguments cannot follow var-keyword argument");
                break;
            } else {
                PyNode a = param();
                std::optional<PyNode> def;
                if (accept_op("=")) def = parse_expression();
                if (seen_star) {
                    kwonly.push_back(std::move(a));
                    if (def) kw_defaults.push_back(std::move(*def));
                } else {
                    if (def) {
                        seen_default = true;
                        defaults.push_back(std::move(*def));
                    } else if (seen_default) {
                        error("non-default argument follows default argument");
                    }
                    args.push_back(std::move(a));
                }
            }
            if (!accept_op(",")) break;
        }
        if (!at_op(close)) error();
        if (bare_star && kwonly.empty()) error("named arguments must follow bare *");
        PyNode n("arguments");
        append(n, std::move(posonly));
        append(n, std::move(args));
        if (vararg) n.add(std::move(*vararg));
        append(n, std::move(kwonly));
        append(n, std::move(kw_defaults));
        if (kwarg) n.add(std::move(*kwarg));
        append(n, std::move(defaults));
        return n;
    }

    PyNode parse_if() {
        ++p_;  // 'if' or 'elif'
        PyNode n("If");
        n.add(parse_named_expression());
        expect_op(":");
        append(n, parse_block());
        if (at_kw("elif")) {
            n.add(parse_if());
        } else if (accept_kw("else")) {
            expect_op(":");
            append(n, parse_block());
        }
        return n;
    }

    PyNode parse_while() {
        ++p_;
        PyNode n("While");
        n.add(parse_named_expression());
        expect_op(":");
        append(n, parse_block());
        if (accept_kw("else")) {
            expect_op(":");
            append(n, parse_block());
        }
        return n;
    }

    PyNode parse_for(bool is_async) {
        expect_kw("for");
        PyNode n(is_async ? "AsyncFor" : "For");
        n.add(parse_star_targets());
        expect_kw("in");
        n.add(parse_star_expressions());
        expect_op(":");
        append(n, parse_block());
        if (accept_kw("else")) {
            expect_op(":");
            append(n, parse_block());
        }
        return n;
    }

    PyNode parse_with_item() {
        PyNode item("withitem");
        item.add(parse_expression());
        if (accept_kw("as")) {
            item.add(parse_star_target());
            if (!at_op(",") && !at_op(")") && !at_op(":")) error();
        }
        return item;
    }

    PyNode parse_with(bool is_async) {
        expect_kw("with");
        PyNode n(is_async ? "AsyncWith" : "With");
        if (at_op("(")) {
            // Parenthesized item list; falls back to an ordinary expression.
            std::size_t save = p_;
            try {
                ++p_;
                std::vector<PyNode> items;
                items.push_back(parse_with_item());
                while (accept_op(",")) {
                    if (at_op(")")) break;
                    items.push_back(parse_with_item());
                }
                expect_op(")");
                expect_op(":");
                append(n, std::move(items));
                append(n, parse_block());
                return n;
            } catch (const ParseError&) {
                p_ = save;
                n.kids.clear();
            }
        }
        n.add(parse_with_item());
        while (accept_op(",")) n.add(parse_with_item());
        expect_op(":");
        append(n, parse_block());
        return n;
    }

    PyNode parse_try() {
        ++p_;
        expect_op(":");
        PyNode n("Try");
        append(n, parse_block());
        bool handlers = false;
        while (at_kw("except")) {
            ++p_;
            handlers = true;
            PyNode h("ExceptHandler");
            if (!at_op(":")) {
                h.add(parse_expression());
                if (accept_kw("as")) h.set("name", expect_name());
                else if (at_op(",")) error("multiple exception types must be parenthesized");
            }
            expect_op(":");
            append(h, parse_block());
            n.add(std::move(h));
        }
        if (handlers && accept_kw("else")) {
            expect_op(":");
            append(n, parse_block());
        }
        bool final = false;
        if (accept_kw("finally")) {
            final = true;
            expect_op(":");
            append(n, parse_block());
        }
        if (!handlers && !final) error("expected 'except' or 'finally' block");
        return n;
    }

    // ---- match statement -------------------------------------------------

    std::optional<PyNode> try_parse_match() {
        std::size_t save = p_;
        PyNode subject;
        try {
            ++p_;
            subject = parse_subject();
            expect_op(":");
            expect_newline();
        } catch (const ParseError&) {
            p_ = save;
            return std::nullopt;
        }
        if (cur().kind != Tok::Indent) error("expected an indented block");
        ++p_;
        PyNode n("Match");
        n.add(std::move(subject));
        do {
            if (!at_kw("case")) error();
            ++p_;
            PyNode c("match_case");
            c.add(parse_patterns());
            if (accept_kw("if")) c.add(parse_named_expression());
            expect_op(":");
            append(c, parse_block());
            n.add(std::move(c));
        } while (cur().kind != Tok::Dedent && cur().kind != Tok::End);
        if (cur().kind != Tok::Dedent) error();
        ++p_;
        return n;
    }

    PyNode parse_subject() {
        PyNode first = parse_star_named_expression();
        if (!at_op(",")) {
            if (first.kind == "Starred") error();
            return first;
        }
        PyNode t("Tuple");
        t.add(std::move(first));
        while (accept_op(",")) {
            if (at_op(":")) break;
            t.add(parse_star_named_expression());
        }
        t.set("ctx", "Load");
        return t;
    }

    PyNode parse_patterns() {
        PyNode first = parse_maybe_star_pattern();
        if (!at_op(",")) {
            if (first.kind == "MatchStar") error();
            return first;
        }
        PyNode seq("MatchSequence");
        seq.add(std::move(first));
        while (accept_op(",")) {
            if (at_op(":") || at_kw("if")) break;
            seq.add(parse_maybe_star_pattern());
        }
        return seq;
    }

    PyNode parse_maybe_star_pattern() {
        if (accept_op("*")) {
            PyNode s("MatchStar");
            std::string name = expect_name();
            if (name != "_") s.set("name", name);
            return s;
        }
        return parse_pattern();
    }

    PyNode parse_pattern() {
        PyNode p = parse_or_pattern();
        if (accept_kw("as")) {
            std::string name = expect_name();
            if (name == "_") error("cannot use '_' as a target");
            PyNode as("MatchAs");
            as.add(std::move(p));
            as.set("name", name);
            return as;
        }
        return p;
    }

    PyNode parse_or_pattern() {
        PyNode first = parse_closed_pattern();
        if (!at_op("|")) return first;
        PyNode n("MatchOr");
        n.add(std::move(first));
        while (accept_op("|")) n.add(parse_closed_pattern());
        return n;
    }

    // signed_number, optionally extended to a complex literal
    PyNode parse_number_literal() {
        auto signed_number = [&](bool* imaginary) {
            bool neg = accept_op("-");
            if (cur().kind != Tok::Number) error();
            const std::string& text = cur().text;
            *imaginary = text.back() == 'j' || text.back() == 'J';
            PyNode c = make_constant(number_constant_repr(text));
            ++p_;
            if (!neg) return c;
            PyNode u("UnaryOp");
            u.set("op", "USub");
            u.add(std::move(c));
            return u;
        };
        bool imag = false;
        PyNode real = signed_number(&imag);
        if (!at_op("+") && !at_op("-")) return real;
        if (imag) error("real number required in complex literal");
        const char* op = at_op("+") ? "Add" : "Sub";
        ++p_;
        if (cur().kind != Tok::Number) error();
        const std::string& text = cur().text;
        if (text.back() != 'j' && text.back() != 'J') error("imaginary number required in complex literal");
        PyNode b("BinOp");
        b.add(std::move(real));
        b.set("op", op);
        b.add(make_constant(number_constant_repr(text)));
        ++p_;
        return b;
    }

    PyNode parse_name_or_attr(bool* dotted) {
        PyNode n = make_name(expect_name());
        *dotted = false;
        while (accept_op(".")) {
            *dotted = true;
            PyNode a("Attribute");
            a.add(std::move(n));
            a.set("attr", expect_name()).set("ctx", "Load");
            n = std::move(a);
        }
        return n;
    }

    PyNode parse_closed_pattern() {
        NestGuard guard(*this);
        const Token& tk = cur();
        if (tk.kind == Tok::Number || at_op("-")) {
            PyNode v("MatchValue");
            v.add(parse_number_literal());
            return v;
        }
        if (tk.kind == Tok::String) {
            PyNode v("MatchValue");
            v.add(parse_strings());
            return v;
        }
        if (tk.kind == Tok::Name && (tk.text == "None" || tk.text == "True" || tk.text == "False")) {
            PyNode s("MatchSingleton");
            s.set("value", tk.text);
            ++p_;
            return s;
        }
        if (at_plain_name()) {
            bool dotted = false;
            PyNode target = parse_name_or_attr(&dotted);
            if (at_op("(")) return parse_class_pattern(std::move(target));
            if (dotted) {
                PyNode v("MatchValue");
                v.add(std::move(target));
                return v;
            }
            if (at_op("=")) error();
            PyNode as("MatchAs");
            const std::string& id = *target.get("id");
            if (id != "_") as.set("name", id);
            return as;
        }
        if (accept_op("(")) {
            if (accept_op(")")) return PyNode("MatchSequence");
            PyNode first = parse_maybe_star_pattern();
            if (accept_op(")")) {
                if (first.kind == "MatchStar") error();
                return first;
            }
            PyNode seq("MatchSequence");
            seq.add(std::move(first));
            while (accept_op(",")) {
                if (at_op(")")) break;
                seq.add(parse_maybe_star_pattern());
            }
            expect_op(")");
            return seq;
        }
        if (accept_op("[")) {
            PyNode seq("MatchSequence");
            while (!at_op("]")) {
                seq.add(parse_maybe_star_pattern());
                if (!accept_op(",")) break;
            }
            expect_op("]");
            return seq;
        }
        if (accept_op("{")) return parse_mapping_pattern();
        error();
    }

    PyNode parse_mapping_pattern() {
        std::vector<PyNode> keys, patterns;
        std::optional<std::string> rest;
        while (!at_op("}")) {
            if (accept_op("**")) {
                std::string name = expect_name();
                if (name == "_") error();
                rest = name;
                accept_op(",");
                break;
            }
            const Token& tk = cur();
            if (tk.kind == Tok::Number || at_op("-")) {
                keys.push_back(parse_number_literal());
            } else if (tk.kind == Tok::String) {
                keys.push_back(parse_strings());
            } else if (tk.kind == Tok::Name &&
                       (tk.text == "None" || tk.text == "True" || tk.text == "False")) {
                keys.push_back(make_constant(tk.text));
                ++p_;
            } else {
                bool dotted = false;
                PyNode key = parse_name_or_attr(&dotted);
                if (!dotted) error();
                keys.push_back(std::move(key));
            }
            expect_op(":");
            patterns.push_back(parse_pattern());
            if (!accept_op(",")) break;
        }
        expect_op("}");
        PyNode n("MatchMapping");
        append(n, std::move(keys));
        append(n, std::move(patterns));
        if (rest) n.set("rest", *rest);
        return n;
    }

    PyNode parse_class_pattern(PyNode cls) {
        expect_op("(");
        std::vector<PyNode> patterns, kwd_patterns;
        std::string kwd_attrs;
        while (!at_op(")")) {
            if (at_plain_name() && ahead(1).kind == Tok::Op && ahead(1).text == "=") {
                if (!kwd_attrs.empty()) kwd_attrs += ",";
                kwd_attrs += t_[p_].text;
                p_ += 2;
                kwd_patterns.push_back(parse_pattern());
            } else {
                if (!kwd_patterns.empty()) error("positional patterns follow keyword patterns");
                patterns.push_back(parse_pattern());
            }
            if (!accept_op(",")) break;
        }
        expect_op(")");
        PyNode n("MatchClass");
        n.add(std::move(cls));
        append(n, std::move(patterns));
        if (!kwd_attrs.empty()) n.set("kwd_attrs", kwd_attrs);
        append(n, std::move(kwd_patterns));
        return n;
    }

    // ---- targets ---------------------------------------------------------

    bool at_target_start() const {
        return at_op("*") || at_op("(") || at_op("[") || at_plain_name();
    }

    PyNode parse_star_target() {
        if (accept_op("*")) {
            if (at_op("*")) error();
            PyNode s("Starred");
            s.add(parse_star_target());
            s.set("ctx", "Store");
            return s;
        }
        PyNode t = parse_primary();
        to_target(t, "Store");
        return t;
    }

    PyNode parse_star_targets() {
        PyNode first = parse_star_target();
        if (!at_op(",")) return first;
        PyNode t("Tuple");
        t.add(std::move(first));
        while (accept_op(",")) {
            if (!at_target_start()) break;
            t.add(parse_star_target());
        }
        t.set("ctx", "Store");
        return t;
    }

    // ---- expressions -------------------------------------------------------

    PyNode parse_yield() {
        expect_kw("yield");
        if (accept_kw("from")) {
            PyNode n("YieldFrom");
            n.add(parse_expression());
            return n;
        }
        PyNode n("Yield");
        if (at_expression_start() && !at_kw("yield")) n.add(parse_star_expressions());
        return n;
    }

    PyNode parse_star_expression() {
        if (accept_op("*")) {
            PyNode s("Starred");
            s.add(parse_bitwise_or());
            s.set("ctx", "Load");
            return s;
        }
        return parse_expression();
    }

    bool at_expression_start() const {
        const Token& tk = cur();
        if (tk.kind == Tok::Number || tk.kind == Tok::String) return true;
        if (tk.kind == Tok::Name) {
            static constexpr std::array<std::string_view, 8> ok = {"None", "True", "False", "not",
                                                                    "lambda", "await", "yield", ""};
            if (!is_hard_keyword(tk.text)) return true;
            for (auto k : ok)
                if (k == tk.text) return true;
            return false;
        }
        if (tk.kind == Tok::Op) {
            static constexpr std::array<std::string_view, 9> ok = {"(", "[", "{", "-", "+", "~", "*", "...", ""};
            for (auto k : ok)
                if (!k.empty() && k == tk.text) return true;
        }
        return false;
    }

    PyNode parse_star_expressions() {
        PyNode first = parse_star_expression();
        if (!at_op(",")) return first;
        PyNode t("Tuple");
        t.add(std::move(first));
        while (accept_op(",")) {
            if (!at_expression_start() || at_kw("yield")) break;
            t.add(parse_star_expression());
        }
        t.set("ctx", "Load");
        return t;
    }

    PyNode parse_star_named_expression() {
        if (accept_op("*")) {
            PyNode s("Starred");
            s.add(parse_bitwise_or());
            s.set("ctx", "Load");
            return s;
        }
        return parse_named_expression();
    }

    PyNode parse_named_expression() {
        if (at_plain_name() && ahead(1).kind == Tok::Op && ahead(1).text == ":=") {
            PyNode n("NamedExpr");
            n.add(make_name(t_[p_].text, "Store"));
            p_ += 2;
            n.add(parse_expression());
            return n;
        }
        PyNode e = parse_expression();
        if (at_op(":=")) error("cannot use assignment expressions with " + describe(e));
        return e;
    }

    PyNode parse_expression() {
        NestGuard guard(*this);
        if (at_kw("lambda")) return parse_lambda();
        PyNode body = parse_disjunction();
        if (!accept_kw("if")) return body;
        PyNode n("IfExp");
        n.add(parse_disjunction());
        if (!accept_kw("else")) error("expected 'else' after 'if' expression");
        n.add(std::move(body));
        n.add(parse_expression());
        return n;
    }

    PyNode parse_lambda() {
        expect_kw("lambda");
        PyNode n("Lambda");
        n.add(parse_parameters(":", false));
        expect_op(":");
        n.add(parse_expression());
        return n;
    }

    PyNode parse_disjunction() {
        PyNode first = parse_conjunction();
        if (!at_kw("or")) return first;
        PyNode n("BoolOp");
        n.set("op", "Or");
        n.add(std::move(first));
        while (accept_kw("or")) n.add(parse_conjunction());
        return n;
    }

    PyNode parse_conjunction() {
        PyNode first = parse_inversion();
        if (!at_kw("and")) return first;
        PyNode n("BoolOp");
        n.set("op", "And");
        n.add(std::move(first));
        while (accept_kw("and")) n.add(parse_inversion());
        return n;
    }

    PyNode parse_inversion() {
        NestGuard guard(*this);
        if (accept_kw("not")) {
            PyNode n("UnaryOp");
            n.set("op", "Not");
            n.add(parse_inversion());
            return n;
        }
        return parse_comparison();
    }

    const char* comparison_op() {
        const Token& tk = cur();
        if (tk.kind == Tok::Op) {
            static constexpr std::pair<std::string_view, const char*> ops[] = {
                {"==", "Eq"}, {"!=", "NotEq"}, {"<=", "LtE"}, {"<", "Lt"}, {">=", "GtE"}, {">", "Gt"}};
            for (const auto& [tok, name] : ops)
                if (tok == tk.text) {
                    ++p_;
                    return name;
                }
            return nullptr;
        }
        if (tk.kind != Tok::Name) return nullptr;
        if (tk.text == "in") {
            ++p_;
            return "In";
        }
        if (tk.text == "not" && ahead(1).kind == Tok::Name && ahead(1).text == "in") {
            p_ += 2;
            return "NotIn";
        }
        if (tk.text == "is") {
            ++p_;
            if (accept_kw("not")) return "IsNot";
            return "Is";
        }
        return nullptr;
    }

    PyNode parse_comparison() {
        PyNode left = parse_bitwise_or();
        const char* op = comparison_op();
        if (!op) return left;
        PyNode n("Compare");
        n.add(std::move(left));
        std::string ops = op;
        n.add(parse_bitwise_or());
        while ((op = comparison_op())) {
            ops += ",";
            ops += op;
            n.add(parse_bitwise_or());
        }
        n.set("ops", ops);
        return n;
    }

    template <typename Next>
    PyNode binary_level(std::initializer_list<std::pair<std::string_view, const char*>> ops, Next next) {
        PyNode left = (this->*next)();
        while (cur().kind == Tok::Op) {
            const char* name = nullptr;
            for (const auto& [tok, nm] : ops)
                if (tok == cur().text) name = nm;
            if (!name) break;
            ++p_;
            PyNode b("BinOp");
            b.add(std::move(left));
            b.set("op", name);
            b.add((this->*next)());
            left = std::move(b);
        }
        return left;
    }

    PyNode parse_bitwise_or() { return binary_level({{"|", "BitOr"}}, &Parser::parse_bitwise_xor); }
    PyNode parse_bitwise_xor() { return binary_level({{"^", "BitXor"}}, &Parser::parse_bitwise_and); }
    PyNode parse_bitwise_and() { return binary_level({{"&", "BitAnd"}}, &Parser::parse_shift); }
    PyNode parse_shift() { return binary_level({{"<<", "LShift"}, {">>", "RShift"}}, &Parser::parse_sum); }
    PyNode parse_sum() { return binary_level({{"+", "Add"}, {"-", "Sub"}}, &Parser::parse_term); }
    PyNode parse_term() {
        return binary_level(
            {{"*", "Mult"}, {"/", "Div"}, {"//", "FloorDiv"}, {"%", "Mod"}, {"@", "MatMult"}},
            &Parser::parse_factor);
    }

    PyNode parse_factor() {
        NestGuard guard(*this);
        const char* op = at_op("+") ? "UAdd" : at_op("-") ? "USub" : at_op("~") ? "Invert" : nullptr;
        if (op) {
            ++p_;
            PyNode n("UnaryOp");
            n.set("op", op);
            n.add(parse_factor());
            return n;
        }
        return parse_power();
    }

    PyNode parse_power() {
        PyNode base;
        if (accept_kw("await")) {
            base = PyNode("Await");
            base.add(parse_primary());
        } else {
            base = parse_primary();
        }
        if (!accept_op("**")) return base;
        PyNode b("BinOp");
        b.add(std::move(base));
        b.set("op", "Pow");
        b.add(parse_factor());
        return b;
    }

    PyNode parse_primary() {
        PyNode e = parse_atom();
        while (true) {
            if (accept_op(".")) {
                PyNode a("Attribute");
                a.add(std::move(e));
                a.set("attr", expect_name()).set("ctx", "Load");
                e = std::move(a);
            } else if (accept_op("(")) {
                PyNode c("Call");
                c.add(std::move(e));
                std::vector<PyNode> args, keywords;
                parse_call_arguments(args, keywords, true);
                append(c, std::move(args));
                append(c, std::move(keywords));
                e = std::move(c);
            } else if (accept_op("[")) {
                PyNode s("Subscript");
                s.add(std::move(e));
                s.add(parse_slices());
                expect_op("]");
                s.set("ctx", "Load");
                e = std::move(s);
            } else {
                break;
            }
        }
        return e;
    }

    bool at_comprehension() const {
        return at_kw("for") || (at_kw("async") && ahead(1).kind == Tok::Name && ahead(1).text == "for");
    }

    /// Arguments after '(' through the closing ')'.
    void parse_call_arguments(std::vector<PyNode>& args, std::vector<PyNode>& keywords, bool allow_genexp) {
        bool seen_keyword = false, seen_double_star = false;
        bool first = true;
        while (!at_op(")")) {
            if (accept_op("*")) {
                if (seen_double_star) error("iterable argument unpacking follows keyword argument unpacking");
                PyNode s("Starred");
                s.add(parse_expression());
                s.set("ctx", "Load");
                if (at_op("=")) error("cannot assign to iterable argument unpacking");
                args.push_back(std::move(s));
            } else if (accept_op("**")) {
                PyNode k("keyword");
                k.add(parse_expression());
                keywords.push_back(std::move(k));
                seen_keyword = seen_double_star = true;
            } else if (cur().kind == Tok::Name && ahead(1).kind == Tok::Op && ahead(1).text == "=") {
                if (is_hard_keyword(cur().text)) error("cannot assign to " + cur().text);
                PyNode k("keyword");
                k.set("arg", cur().text);
                p_ += 2;
                k.add(parse_expression());
                keywords.push_back(std::move(k));
                seen_keyword = true;
            } else {
                PyNode e = parse_named_expression();
                if (at_comprehension()) {
                    PyNode g("GeneratorExp");
                    g.add(std::move(e));
                    parse_comprehension_clauses(g);
                    if (!allow_genexp || !first || !at_op(")"))
                        error("Generator expression must be parenthesized");
                    args.push_back(std::move(g));
                    break;
                }
                if (at_op("=")) error("expression cannot contain assignment, perhaps you meant \"==\"?");
                if (seen_keyword)
                    error(seen_double_star ? "positional argument follows keyword argument unpacking"
                                           : "positional argument follows keyword argument");
                args.push_back(std::move(e));
            }
            first = false;
            if (!accept_op(",")) break;
        }
        expect_op(")");
    }

    PyNode parse_slice() {
        if (at_plain_name() && ahead(1).kind == Tok::Op && ahead(1).text == ":=") return parse_named_expression();
        std::optional<PyNode> lower;
        if (!at_op(":")) {
            PyNode e = parse_expression();
            if (!at_op(":")) {
                if (at_op(":=")) error("cannot use assignment expressions with " + describe(e));
                return e;
            }
            lower = std::move(e);
        }
        expect_op(":");
        PyNode s("Slice");
        if (lower) s.add(std::move(*lower));
        auto ends = [&] { return at_op(":") || at_op("]") || at_op(","); };
        if (!ends()) s.add(parse_expression());
        if (accept_op(":")) {
            if (!at_op("]") && !at_op(",")) s.add(parse_expression());
        }
        return s;
    }

    PyNode parse_slices() {
        PyNode first = parse_slice();
        if (!at_op(",")) return first;
        PyNode t("Tuple");
        t.add(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            t.add(parse_slice());
        }
        t.set("ctx", "Load");
        return t;
    }

    void parse_comprehension_clauses(PyNode& owner) {
        while (at_comprehension()) {
            bool is_async = accept_kw("async");
            expect_kw("for");
            PyNode c("comprehension");
            c.add(parse_star_targets());
            expect_kw("in");
            c.add(parse_disjunction());
            while (accept_kw("if")) c.add(parse_disjunction());
            c.set("is_async", is_async ? "1" : "0");
            owner.add(std::move(c));
        }
    }

    PyNode parse_atom() {
        NestGuard guard(*this);
        const Token& tk = cur();
        switch (tk.kind) {
            case Tok::Number: {
                PyNode c = make_constant(number_constant_repr(tk.text));
                ++p_;
                return c;
            }
            case Tok::String:
                return parse_strings();
            case Tok::Name: {
                if (tk.text == "None" || tk.text == "True" || tk.text == "False") {
                    PyNode c = make_constant(tk.text);
                    ++p_;
                    return c;
                }
                if (is_hard_keyword(tk.text)) error();
                PyNode n = make_name(tk.text);
                ++p_;
                return n;
            }
            case Tok::Op:
                if (accept_op("...")) return make_constant("Ellipsis");
                if (accept_op("(")) return parse_paren_atom();
                if (accept_op("[")) return parse_list_atom();
                if (accept_op("{")) return parse_brace_atom();
                error();
            default:
                error();
        }
    }

    PyNode parse_paren_atom() {
        if (accept_op(")")) {
            PyNode t("Tuple");
            t.set("ctx", "Load");
            t.parens = true;
            return t;
        }
        if (at_kw("yield")) {
            PyNode y = parse_yield();
            expect_op(")");
            y.parens = true;
            return y;
        }
        PyNode first = parse_star_named_expression();
        if (at_comprehension()) {
            if (first.kind == "Starred") error("iterable unpacking cannot be used in comprehension");
            PyNode g("GeneratorExp");
            g.add(std::move(first));
            parse_comprehension_clauses(g);
            expect_op(")");
            g.parens = true;
            return g;
        }
        if (at_op(",")) {
            PyNode t("Tuple");
            t.add(std::move(first));
            while (accept_op(",")) {
                if (at_op(")")) break;
                t.add(parse_star_named_expression());
            }
            expect_op(")");
            t.set("ctx", "Load");
            t.parens = true;
            return t;
        }
        if (first.kind == "Starred") error("cannot use starred expression here");
        expect_op(")");
        first.parens = true;
        return first;
    }

    PyNode parse_list_atom() {
        PyNode l("List");
        if (accept_op("]")) {
            l.set("ctx", "Load");
            return l;
        }
        PyNode first = parse_star_named_expression();
        if (at_comprehension()) {
            if (first.kind == "Starred") error("iterable unpacking cannot be used in comprehension");
            PyNode c("ListComp");
            c.add(std::move(first));
            parse_comprehension_clauses(c);
            expect_op("]");
            return c;
        }
        l.add(std::move(first));
        while (accept_op(",")) {
            if (at_op("]")) break;
            l.add(parse_star_named_expression());
        }
        expect_op("]");
        l.set("ctx", "Load");
        return l;
    }

    PyNode parse_brace_atom() {
        if (accept_op("}")) return PyNode("Dict");
        std::vector<PyNode> keys, values;
        auto finish_dict = [&] {
            while (accept_op(",")) {
                if (at_op("}")) break;
                if (accept_op("**")) {
                    values.push_back(parse_bitwise_or());
                    continue;
                }
                keys.push_back(parse_expression());
                expect_op(":");
                values.push_back(parse_expression());
            }
            expect_op("}");
            PyNode d("Dict");
            append(d, std::move(keys));
            append(d, std::move(values));
            return d;
        };
        if (accept_op("**")) {
            values.push_back(parse_bitwise_or());
            if (at_comprehension()) error("dict unpacking cannot be used in dict comprehension");
            return finish_dict();
        }
        PyNode first = parse_star_named_expression();
        if (accept_op(":")) {
            if (first.kind == "Starred" || (first.kind == "NamedExpr" && !first.parens)) error();
            PyNode value = parse_expression();
            if (at_comprehension()) {
                PyNode c("DictComp");
                c.add(std::move(first));
                c.add(std::move(value));
                parse_comprehension_clauses(c);
                expect_op("}");
                return c;
            }
            keys.push_back(std::move(first));
            values.push_back(std::move(value));
            return finish_dict();
        }
        if (at_comprehension()) {
            if (first.kind == "Starred") error("iterable unpacking cannot be used in comprehension");
            PyNode c("SetComp");
            c.add(std::move(first));
            parse_comprehension_clauses(c);
            expect_op("}");
            return c;
        }
        PyNode s("Set");
        s.add(std::move(first));
        while (accept_op(",")) {
            if (at_op("}")) break;
            s.add(parse_star_named_expression());
        }
        expect_op("}");
        return s;
    }

    // ---- string literals ---------------------------------------------------

    struct StringPiece {
        std::string_view prefix;
        std::string_view body;
        bool raw = false, bytes = false, fmt = false;
    };

    static StringPiece split_string_token(const std::string& text) {
        StringPiece s;
        std::size_t plen = 0;
        while (text[plen] != '\'' && text[plen] != '"') ++plen;
        s.prefix = std::string_view(text).substr(0, plen);
        for (char c : s.prefix) {
            char l = static_cast<char>(c | 0x20);
            s.raw |= l == 'r';
            s.bytes |= l == 'b';
            s.fmt |= l == 'f';
        }
        char q = text[plen];
        std::size_t qlen = (text.size() >= plen + 6 && text[plen + 1] == q && text[plen + 2] == q) ? 3 : 1;
        s.body = std::string_view(text).substr(plen + qlen, text.size() - plen - 2 * qlen);
        return s;
    }

    // Accumulates adjacent literal text and replacement fields.
    struct JoinedBuilder {
        std::u32string last;
        std::vector<PyNode> values;
        bool kind_u = false;

        PyNode str_constant(const std::u32string& s) const {
            PyNode c = make_constant(repr_str(s));
            if (kind_u) c.set("kind", "u");
            return c;
        }
        void flush() {
            if (last.empty()) return;
            values.push_back(str_constant(last));
            last.clear();
        }
        void add_value(PyNode n) {
            flush();
            values.push_back(std::move(n));
        }
        PyNode joined() {
            flush();
            PyNode j("JoinedStr");
            for (auto& v : values) j.add(std::move(v));
            return j;
        }
    };

    PyNode parse_strings() {
        const Token& first = cur();
        Position at{first.line, first.column};
        JoinedBuilder b;
        b.kind_u = first.text[0] == 'u';
        bool any_bytes = false, any_str = false, fmode = false;
        while (cur().kind == Tok::String) {
            StringPiece s = split_string_token(cur().text);
            Position here{cur().line, cur().column};
            (s.bytes ? any_bytes : any_str) = true;
            if (any_bytes && any_str) throw ParseError("cannot mix bytes and nonbytes literals", at.line, at.column);
            if (s.fmt) {
                fmode = true;
                std::size_t i = 0;
                parse_fstring(s.body, i, s.raw, 0, b, here);
            } else {
                b.last += decode_string_body(s.body, s.raw, s.bytes, here);
            }
            ++p_;
        }
        if (any_bytes) return make_constant(repr_bytes(b.last));
        if (!fmode) return b.str_constant(b.last);
        return b.joined();
    }

    static void parse_fstring(std::string_view s, std::size_t& i, bool raw, int level, JoinedBuilder& b,
                              Position at) {
        auto fail = [&](const std::string& msg) { throw ParseError("f-string: " + msg, at.line, at.column); };
        while (true) {
            std::size_t lit_start = i, lit_end = 0;
            bool doubled = false;
            while (i < s.size()) {
                char ch = s[i++];
                if (!raw && ch == '\\' && i < s.size()) {
                    ch = s[i++];
                    if (ch == 'N') {
                        if (i < s.size() && s[i++] == '{') {
                            while (i < s.size() && s[i++] != '}') {
                            }
                        }
                        continue;
                    }
                }
                if (ch == '{' || ch == '}') {
                    if (level == 0) {
                        if (i < s.size() && s[i] == ch) {
                            lit_end = i;
                            ++i;
                            doubled = true;
                            break;
                        }
                        if (ch == '}') fail("single '}' is not allowed");
                    }
                    --i;
                    break;
                }
            }
            if (!doubled) lit_end = i;
            std::string_view lit = s.substr(lit_start, lit_end - lit_start);
            if (!lit.empty()) b.last += decode_string_body(lit, raw, false, at);
            if (doubled) continue;
            if (i >= s.size() || s[i] == '}') break;
            parse_fstring_field(s, i, raw, level, b, at);
        }
        if (level != 0 && (i >= s.size() || s[i] != '}')) fail("expecting '}'");
    }

    static void parse_fstring_field(std::string_view s, std::size_t& i, bool raw, int level, JoinedBuilder& b,
                                    Position at) {
        auto fail = [&](const std::string& msg) { throw ParseError("f-string: " + msg, at.line, at.column); };
        if (level >= 2) fail("expressions nested too deeply");
        ++i;
        std::size_t expr_start = i;
        char quote = 0;
        int string_type = 0;
        std::string stack;
        for (; i < s.size(); ++i) {
            char ch = s[i];
            if (ch == '\\') throw ParseError("f-string expression part cannot include a backslash", at.line, at.column);
            if (quote) {
                if (ch == quote) {
                    if (string_type == 3) {
                        if (i + 2 < s.size() && s[i + 1] == ch && s[i + 2] == ch) {
                            i += 2;
                            quote = 0;
                        }
                    } else {
                        quote = 0;
                    }
                }
                continue;
            }
            if (ch == '\'' || ch == '"') {
                if (i + 2 < s.size() && s[i + 1] == ch && s[i + 2] == ch) {
                    string_type = 3;
                    i += 2;
                } else {
                    string_type = 1;
                }
                quote = ch;
            } else if (ch == '[' || ch == '{' || ch == '(') {
                if (stack.size() >= 200) fail("too many nested parenthesis");
                stack.push_back(ch);
            } else if (ch == '#') {
                throw ParseError("f-string expression part cannot include '#'", at.line, at.column);
            } else if (stack.empty() && (ch == '!' || ch == ':' || ch == '}' || ch == '=' || ch == '>' || ch == '<')) {
                if (i + 1 < s.size()) {
                    char next = s[i + 1];
                    if ((ch == '!' || ch == '=' || ch == '<' || ch == '>') && next == '=') {
                        ++i;
                        continue;
                    }
                }
                if (ch == '>' || ch == '<') continue;
                break;
            } else if (ch == ']' || ch == '}' || ch == ')') {
                if (stack.empty()) fail(std::string("unmatched '") + ch + "'");
                char open = stack.back();
                stack.pop_back();
                if (!((open == '(' && ch == ')') || (open == '[' && ch == ']') || (open == '{' && ch == '}')))
                    fail(std::string("closing parenthesis '") + ch + "' does not match opening parenthesis '" +
                         open + "'");
            }
        }
        std::size_t expr_end = i;
        if (quote) fail("unterminated string");
        if (!stack.empty()) fail(std::string("unmatched '") + stack.back() + "'");
        if (i >= s.size()) fail("expecting '}'");

        std::string_view expr_text = s.substr(expr_start, expr_end - expr_start);
        if (expr_text.find_first_not_of(" \t\n\f") == std::string_view::npos) fail("empty expression not allowed");
        PyNode value;
        try {
            Parser inner(tokenize("(" + std::string(expr_text) + ")"));
            value = inner.parse_fstring_expression();
        } catch (const ParseError& e) {
            throw ParseError("f-string: " + e.message(), at.line, at.column);
        }

        std::optional<std::string_view> debug_text;
        if (s[i] == '=') {
            ++i;
            while (i < s.size() && std::string_view(" \t\n\r\f\v").find(s[i]) != std::string_view::npos) ++i;
            if (i >= s.size()) fail("expecting '}'");
            debug_text = s.substr(expr_start, i - expr_start);
        }
        int conversion = -1;
        if (s[i] == '!') {
            ++i;
            if (i >= s.size()) fail("expecting '}'");
            char c = s[i++];
            if (c != 's' && c != 'r' && c != 'a') fail("invalid conversion character: expected 's', 'r', or 'a'");
            conversion = static_cast<unsigned char>(c);
        }
        std::optional<PyNode> spec;
        if (i < s.size() && s[i] == ':') {
            ++i;
            if (i >= s.size()) fail("expecting '}'");
            JoinedBuilder sb;
            sb.kind_u = b.kind_u;
            parse_fstring(s, i, raw, level + 1, sb, at);
            spec = sb.joined();
        }
        if (i >= s.size() || s[i] != '}') fail("expecting '}'");
        ++i;
        if (debug_text && !spec && conversion == -1) conversion = 'r';

        if (debug_text) b.last += decode_string_body(*debug_text, true, false, at);
        PyNode fv("FormattedValue");
        fv.add(std::move(value));
        fv.set("conversion", std::to_string(conversion));
        if (spec) fv.add(std::move(*spec));
        b.add_value(std::move(fv));
    }
};

}  // namespace detail

/// Parses a module; throws ParseError on invalid input.
inline PyNode parse_module(std::string source) {
    detail::Parser p(tokenize(std::move(source)));
    return p.parse_module();
}

}  // namespace progmetric::python
