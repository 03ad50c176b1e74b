#pragma once

#include <string>
#include <string_view>

#include "progmetric/python/error.hpp"
#include "progmetric/python/parser.hpp"
#include "progmetric/syntax_tree.hpp"

namespace progmetric {

/// Python grammar version the front-end implements.
inline constexpr std::string_view kPythonGrammar = "3.10";

namespace detail {

inline SyntaxTree to_syntax_tree(python::PyNode&& n) {
    SyntaxTree t;
    t.label = std::move(n.kind);
    for (const auto& [key, value] : n.attrs) {
        t.label += ':';
        t.label += key;
        t.label += '=';
        t.label += value;
    }
    t.children.reserve(n.kids.size());
    for (auto& k : n.kids) t.children.push_back(to_syntax_tree(std::move(k)));
    return t;
}

}  // namespace detail

/// Parses Python 3.10 source into a normalized syntax tree.
///
/// One node per grammar node. List-valued fields are flattened into the
/// children in field order; identifiers, constants, operators and contexts
/// are folded into labels such as `Name:id=a:ctx=Store`. Comments, layout and
/// positions are dropped. Throws ParseError on invalid input.
inline SyntaxTree parse_program(std::string_view source) {
    return detail::to_syntax_tree(python::parse_module(std::string(source)));
}

}  // namespace progmetric
