// Parses two Python programs and prints their syntax trees and tree edit
// distance.
//
//   sample_tree_distance a.py b.py
//   sample_tree_distance            (uses two built-in snippets)

#include <iostream>

#include "progmetric/progmetric.hpp"

int main(int argc, char** argv) {
    namespace pm = progmetric;
    std::string a = "a = 'Hello World'\nprint(a)\n", b = "a = 'Goodbye World'\nprint(a)\n";
    if (argc == 3) {
        a = pm::read_file(argv[1]);
        b = pm::read_file(argv[2]);
    } else if (argc != 1) {
        std::cerr << "usage: " << argv[0] << " [a.py b.py]\n";
        return 2;
    }
    try {
        auto ta = pm::parse_program(a), tb = pm::parse_program(b);
        std::cout << "A (" << pm::tree_size(ta) << " nodes): " << pm::serialize_tree(ta) << "\n";
        std::cout << "B (" << pm::tree_size(tb) << " nodes): " << pm::serialize_tree(tb) << "\n";
        std::cout << "ted(A, B) = " << pm::ted(ta, tb) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
