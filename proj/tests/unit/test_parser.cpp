#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "progmetric/io.hpp"
#include "progmetric/parse.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace progmetric;

namespace {

const fs::path kPython = fs::path(PROGMETRIC_TEST_DATA) / "python";

std::vector<fs::path> files_in(const fs::path& dir, const std::string& ext) {
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ext) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

std::string trimmed(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
    return s;
}

}  // namespace

TEST(Parser, MatchesFrozenCPythonTrees) {
    auto files = files_in(kPython / "valid", ".py");
    ASSERT_GE(files.size(), 20u);
    for (const auto& f : files) {
        SCOPED_TRACE(f.filename().string());
        auto golden = trimmed(read_file(f.string() + ".tree"));
        EXPECT_EQ(serialize_tree(parse_program(read_file(f))), golden);
    }
}

TEST(Parser, RejectsInvalidCorpus) {
    auto files = files_in(kPython / "invalid", ".py");
    ASSERT_GE(files.size(), 90u);
    for (const auto& f : files) {
        SCOPED_TRACE(f.filename().string());
        EXPECT_THROW(parse_program(read_file(f)), ParseError);
    }
}

TEST(Parser, HelloWorldTreeHasEightNodes) {
    SyntaxTree expected(
        "Module",
        {SyntaxTree("Assign", {SyntaxTree("Name:id=a:ctx=Store"), SyntaxTree("Constant:value='Hello World'")}),
         SyntaxTree("Expr", {SyntaxTree("Call", {SyntaxTree("Name:id=print:ctx=Load"),
                                                 SyntaxTree("Name:id=a:ctx=Load")})})});
    SyntaxTree t = parse_program("a = 'Hello World'\nprint(a)");
    EXPECT_EQ(t, expected);
    EXPECT_EQ(tree_size(t), 8u);
}

TEST(Parser, EmptyProgramIsBareModule) {
    SyntaxTree t = parse_program("");
    EXPECT_EQ(t.label, "Module");
    EXPECT_TRUE(t.children.empty());
}

TEST(Parser, UnbalancedParenReportsPosition) {
    try {
        parse_program("a = (");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_GE(e.column(), 1);
    }
}

TEST(Parser, CommentsAndBlankLinesDoNotChangeTheTree) {
    const std::string plain = "def f(x):\n    y = x + 1\n    return y\nprint(f(2))\n";
    const std::string noisy =
        "# header\n\n\ndef f(x):  # trailing\n\n    # inside\n    y = x + 1\n\n    return y\n\n\nprint(f(2))  # end\n";
    EXPECT_EQ(parse_program(plain), parse_program(noisy));
    EXPECT_EQ(parse_program(plain), parse_program("def f(x):\r\n  y = x + 1\r\n  return y\r\nprint(f(2))"));
}

TEST(Parser, IsDeterministic) {
    const std::string src = read_file(kPython / "valid" / "comprehensive_llm.py");
    EXPECT_EQ(parse_program(src), parse_program(src));
}

TEST(Parser, PipInstallSnippetIsRejected) { EXPECT_THROW(parse_program("pip install opencv"), ParseError); }

TEST(TreeFormat, SpecExamples) {
    EXPECT_EQ(serialize_tree(SyntaxTree("x")), "{x}");
    EXPECT_EQ(serialize_tree(SyntaxTree("a", {SyntaxTree("b"), SyntaxTree("c")})), "{a{b}{c}}");
    EXPECT_EQ(serialize_tree(SyntaxTree("a{b")), "{a\\{b}");
}

TEST(TreeFormat, RoundTripsRandomTreesWithAwkwardLabels) {
    std::mt19937_64 rng(7);
    const std::string alphabet = "ab{}\\ :='\"";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    for (int k = 0; k < 300; ++k) {
        SyntaxTree t = oracle::random_tree(rng, 1 + k % 25, 3);
        std::function<void(SyntaxTree&)> scramble = [&](SyntaxTree& n) {
            n.label.clear();
            for (int c = 0; c < 4; ++c) n.label.push_back(alphabet[pick(rng)]);
            for (auto& ch : n.children) scramble(ch);
        };
        scramble(t);
        EXPECT_EQ(deserialize_tree(serialize_tree(t)), t);
    }
}

TEST(TreeFormat, RoundTripsParsedPrograms) {
    for (const auto& f : files_in(kPython / "valid", ".py")) {
        SyntaxTree t = parse_program(read_file(f));
        EXPECT_EQ(deserialize_tree(serialize_tree(t)), t) << f;
    }
}

TEST(TreeFormat, RejectsUnbalancedInput) {
    EXPECT_THROW(deserialize_tree("{a{b}"), TreeFormatError);
    EXPECT_THROW(deserialize_tree("{a}}"), TreeFormatError);
    EXPECT_THROW(deserialize_tree("a"), TreeFormatError);
    EXPECT_THROW(deserialize_tree(""), TreeFormatError);
    EXPECT_THROW(deserialize_tree("{a\\"), TreeFormatError);
}
