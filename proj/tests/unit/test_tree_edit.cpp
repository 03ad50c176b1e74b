#include <gtest/gtest.h>

#include <random>

#include "progmetric/fixtures.hpp"
#include "progmetric/parse.hpp"
#include "progmetric/ted_oracle.hpp"
#include "progmetric/tree_edit.hpp"
#include "support/oracles.hpp"

using namespace progmetric;

namespace {

SyntaxTree T(const char* bracket) { return deserialize_tree(bracket); }

}  // namespace

TEST(TreeEdit, WorkedExamples) {
    EXPECT_EQ(ted(parse_program("a='Hello World'; print(a)"), parse_program("a='Goodbye World'; print(a)")), 1);
    EXPECT_EQ(ted(parse_program("a=1;b=2;c=3;print(a+b+c)"), parse_program("b=1;a=2;c=3;print(a+b+c)")), 2);
}

TEST(TreeEdit, SmallCases) {
    EXPECT_EQ(ted(T("{a}"), T("{a}")), 0);
    EXPECT_EQ(ted(T("{a}"), T("{b}")), 1);
    EXPECT_EQ(ted(T("{a}"), T("{a{b}}")), 1);
    EXPECT_EQ(ted(T("{a{b}{c}}"), T("{a{c}{b}}")), 2);
    EXPECT_EQ(ted(T("{f{d{a}{c{b}}}{e}}"), T("{f{c{d{a}{b}}}{e}}")), 2);  // classic Zhang-Shasha pair
}

TEST(TreeEdit, OracleSmallCases) {
    EXPECT_EQ(ted_oracle(T("{a}"), T("{b}")), 1);
    EXPECT_EQ(ted_oracle(T("{a}"), T("{a{b}}")), 1);
    EXPECT_EQ(ted_oracle(T("{a{b}{c}}"), T("{a{c}{b}}")), 2);
    EXPECT_THROW(ted_oracle(T("{a{b}{c}{d}{e}{f}{g}{h}{i}}"), T("{a}")), TreeTooLarge);
}

TEST(TreeEdit, OracleAgreesWithEditScriptSearch) {
    // Checks the mapping-based oracle itself against breadth-first search over
    // concrete edit operations, on trees small enough for the search.
    std::mt19937_64 rng(3);
    for (int k = 0; k < 120; ++k) {
        SyntaxTree a = oracle::random_tree(rng, 1 + k % 4, 2);
        SyntaxTree b = oracle::random_tree(rng, 1 + (k / 4) % 4, 2);
        EXPECT_EQ(ted_oracle(a, b), oracle::edit_script_search(a, b))
            << serialize_tree(a) << " vs " << serialize_tree(b);
    }
}

TEST(TreeEdit, MatchesOracleOnRandomPairs) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> size(1, 8);
    for (int k = 0; k < 400; ++k) {
        SyntaxTree a = oracle::random_tree(rng, size(rng), 3);
        SyntaxTree b = oracle::random_tree(rng, size(rng), 3);
        EXPECT_EQ(ted(a, b), ted_oracle(a, b)) << serialize_tree(a) << " vs " << serialize_tree(b);
    }
}

TEST(TreeEdit, WeightedCostsMatchOracle) {
    std::mt19937_64 rng(5);
    const EditCosts costs{2, 3, 1};
    for (int k = 0; k < 150; ++k) {
        SyntaxTree a = oracle::random_tree(rng, 1 + k % 6, 2);
        SyntaxTree b = oracle::random_tree(rng, 1 + (k / 6) % 6, 2);
        EXPECT_EQ(ted(a, b, costs), ted_oracle(a, b, costs));
    }
}

TEST(TreeEdit, MetricAxiomsAndBounds) {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> size(1, 30);
    for (int k = 0; k < 200; ++k) {
        SyntaxTree x = oracle::random_tree(rng, size(rng), 3);
        SyntaxTree y = oracle::random_tree(rng, size(rng), 3);
        SyntaxTree z = oracle::random_tree(rng, size(rng), 3);
        const auto dxy = ted(x, y), dyx = ted(y, x), dxz = ted(x, z), dyz = ted(y, z);
        EXPECT_EQ(ted(x, x), 0);
        EXPECT_EQ(dxy, dyx);
        EXPECT_LE(dxz, dxy + dyz);
        if (dxy == 0) {
            EXPECT_EQ(x, y);
        }
        const auto nx = static_cast<std::int64_t>(tree_size(x)), ny = static_cast<std::int64_t>(tree_size(y));
        EXPECT_GE(dxy, std::abs(nx - ny));
        EXPECT_LE(dxy, nx + ny);
    }
}

TEST(TreeEdit, RenameCycleAdjacency) {
    Corpus c = rename_cycle_fixture();
    ASSERT_EQ(c.programs.size(), 18u);
    for (auto [i, j] : rename_cycle_edges()) EXPECT_EQ(ted(c.programs[i].tree, c.programs[j].tree), 1);
    EXPECT_EQ(ted(c.programs[0].tree, c.programs[3].tree), 2);  // abc vs bac
}

TEST(TreeEdit, SizeGuard) {
    SyntaxTree big("r");
    for (int i = 0; i < 20; ++i) big.children.emplace_back("c");
    EXPECT_THROW(ted(big, big, EditCosts{}, 10), TreeTooLarge);
    EXPECT_EQ(ted(big, big, EditCosts{}, 21), 0);
}

TEST(TreeEdit, InvalidCostsRejected) {
    EXPECT_THROW(ted(T("{a}"), T("{b}"), EditCosts{3, 1, 1}), std::invalid_argument);
    EXPECT_THROW(ted(T("{a}"), T("{b}"), EditCosts{-1, 1, 1}), std::invalid_argument);
}

TEST(TreeEdit, DeepTreesDoNotOverflow) {
    SyntaxTree chain("x");
    for (int i = 0; i < 3000; ++i) chain = SyntaxTree("y", {std::move(chain)});
    LabelTable labels;
    PreparedTree p = prepare_tree(chain, labels);
    EXPECT_EQ(p.size(), 3001u);
    EXPECT_EQ(p.keyroots.size(), 1u);
}
