#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "progmetric/corpus.hpp"
#include "progmetric/parse.hpp"

namespace progmetric {

/// Assignment-target names of the rename-cycle programs, in fixture order.
/// The six permutations of (a,b,c) plus the twelve one-rename intermediates.
inline const std::array<std::string, 18>& rename_cycle_states() {
    static const std::array<std::string, 18> s{"abc", "aac", "bbc", "bac", "baa", "bcc", "bca", "bba", "cca",
                                               "cba", "caa", "cbb", "cab", "aab", "ccb", "acb", "abb", "acc"};
    return s;
}

/// Edges drawn in the cycle figure, as indices into rename_cycle_states().
/// Each joins a permutation to a state one rename away.
inline const std::vector<std::pair<int, int>>& rename_cycle_edges() {
    static const std::vector<std::pair<int, int>> edges = [] {
        const std::pair<const char*, const char*> named[] = {
            {"abc", "abb"}, {"abc", "acc"}, {"abc", "aac"}, {"abc", "bbc"}, {"bac", "aac"}, {"bac", "bbc"},
            {"bac", "bcc"}, {"bac", "baa"}, {"bca", "bcc"}, {"bca", "baa"}, {"bca", "cca"}, {"bca", "bba"},
            {"cba", "cca"}, {"cba", "bba"}, {"cba", "caa"}, {"cba", "cbb"}, {"cab", "cbb"}, {"cab", "caa"},
            {"cab", "ccb"}, {"cab", "aab"}, {"acb", "ccb"}, {"acb", "aab"}, {"acb", "abb"}, {"acb", "acc"},
        };
        auto index = [](const char* s) {
            const auto& st = rename_cycle_states();
            for (int i = 0; i < static_cast<int>(st.size()); ++i)
                if (st[i] == s) return i;
            return -1;
        };
        std::vector<std::pair<int, int>> out;
        for (auto [a, b] : named) out.emplace_back(index(a), index(b));
        return out;
    }();
    return edges;
}

inline std::string rename_cycle_source(const std::string& names) {
    return std::string(1, names[0]) + " = 1\n" + names[1] + " = 2\n" + names[2] + " = 3\nprint(a+b+c)\n";
}

/// The 18 programs as a single-question corpus (question 0, repetition = index).
inline Corpus rename_cycle_fixture() {
    Corpus c;
    const auto& states = rename_cycle_states();
    for (int i = 0; i < static_cast<int>(states.size()); ++i) {
        Program p;
        p.program_id = i;
        p.question_id = 0;
        p.repetition = i;
        p.source = rename_cycle_source(states[i]);
        p.source_path = "q0_r" + std::to_string(i) + ".py";
        p.tree = parse_program(p.source);
        c.programs.push_back(std::move(p));
    }
    return c;
}

}  // namespace progmetric
