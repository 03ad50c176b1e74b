#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace progmetric {

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    if (lines.size() > 1 && lines.back().empty() && text.back() == '\n') lines.pop_back();
    return lines;
}

// Width of a backtick fence at the start of `line` after up to three spaces
// of indentation, or 0.
inline std::size_t fence_width(std::string_view line, std::size_t* indent) {
    std::size_t i = 0;
    while (i < line.size() && i < 3 && line[i] == ' ') ++i;
    std::size_t n = 0;
    while (i + n < line.size() && line[i + n] == '`') ++n;
    if (n < 3) return 0;
    *indent = i;
    return n;
}

}  // namespace detail

/// Concatenates the contents of all ``` fenced blocks in document order,
/// separated by "\n". The info string after the opening fence is ignored.
/// An unclosed fence runs to the end of the text. Returns "" if no fence.
inline std::string extract_code_blocks(std::string_view response_text) {
    auto lines = detail::split_lines(response_text);
    std::string out;
    bool any = false;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::size_t indent = 0;
        std::size_t width = detail::fence_width(lines[i], &indent);
        if (width == 0) continue;
        std::string_view info = lines[i].substr(indent + width);
        if (info.find('`') != std::string_view::npos) continue;  // inline code, not a fence

        std::string block;
        bool first = true;
        for (++i; i < lines.size(); ++i) {
            std::size_t close_indent = 0;
            std::size_t close = detail::fence_width(lines[i], &close_indent);
            if (close >= width &&
                lines[i].find_first_not_of(" \t", close_indent + close) == std::string_view::npos)
                break;
            std::string_view content = lines[i];
            for (std::size_t k = 0; k < indent && !content.empty() && content.front() == ' '; ++k)
                content.remove_prefix(1);
            if (!first) block.push_back('\n');
            block.append(content);
            first = false;
        }
        if (any) out.push_back('\n');
        out += block;
        any = true;
    }
    return out;
}

}  // namespace progmetric
