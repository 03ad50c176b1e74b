#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace progmetric {

/// Ordered, labeled rooted tree. Children are kept in source order.
struct SyntaxTree {
    std::string label;
    std::vector<SyntaxTree> children;

    SyntaxTree() = default;
    explicit SyntaxTree(std::string l) : label(std::move(l)) {}
    SyntaxTree(std::string l, std::vector<SyntaxTree> c)
        : label(std::move(l)), children(std::move(c)) {}

    friend bool operator==(const SyntaxTree&, const SyntaxTree&) = default;
};

inline std::size_t tree_size(const SyntaxTree& t) {
    std::size_t n = 1;
    for (const auto& c : t.children) n += tree_size(c);
    return n;
}

inline std::size_t tree_depth(const SyntaxTree& t) {
    std::size_t d = 0;
    for (const auto& c : t.children) d = std::max(d, tree_depth(c));
    return d + 1;
}

class TreeFormatError : public std::runtime_error {
public:
    TreeFormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {

inline void serialize_into(const SyntaxTree& t, std::string& out) {
    out.push_back('{');
    for (char c : t.label) {
        if (c == '{' || c == '}' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    for (const auto& c : t.children) serialize_into(c, out);
    out.push_back('}');
}

}  // namespace detail

/// Bracket notation `{label{child}{child}}`; `{`, `}` and `\` in labels are
/// escaped with a backslash.
inline std::string serialize_tree(const SyntaxTree& t) {
    std::string out;
    detail::serialize_into(t, out);
    return out;
}

/// Inverse of serialize_tree. Iterative, so arbitrarily deep input is fine.
inline SyntaxTree deserialize_tree(std::string_view text) {
    std::size_t pos = 0;
    auto skip_ws = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\r' ||
                                     text[pos] == '\t'))
            ++pos;
    };
    skip_ws();
    if (pos >= text.size() || text[pos] != '{') throw TreeFormatError("expected '{'", pos);

    std::vector<SyntaxTree> stack;
    SyntaxTree result;
    bool done = false;
    while (pos < text.size() && !done) {
        char c = text[pos];
        if (c == '{') {
            ++pos;
            SyntaxTree node;
            while (pos < text.size() && text[pos] != '{' && text[pos] != '}') {
                if (text[pos] == '\\') {
                    if (pos + 1 >= text.size()) throw TreeFormatError("dangling escape", pos);
                    ++pos;
                }
                node.label.push_back(text[pos++]);
            }
            stack.push_back(std::move(node));
        } else if (c == '}') {
            ++pos;
            if (stack.empty()) throw TreeFormatError("unbalanced '}'", pos - 1);
            SyntaxTree node = std::move(stack.back());
            stack.pop_back();
            if (stack.empty()) {
                result = std::move(node);
                done = true;
            } else {
                stack.back().children.push_back(std::move(node));
            }
        } else {
            throw TreeFormatError("unexpected character between nodes", pos);
        }
    }
    if (!done) throw TreeFormatError("unbalanced '{'", text.size());
    skip_ws();
    if (pos != text.size()) throw TreeFormatError("trailing characters after tree", pos);
    return result;
}

}  // namespace progmetric
