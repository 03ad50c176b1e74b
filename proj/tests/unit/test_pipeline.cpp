#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "progmetric/io.hpp"
#include "progmetric/pipeline.hpp"

using namespace progmetric;

namespace {

struct Run {
    int code;
    std::string err;
};

Run cli(const std::string& args, const fs::path& work) {
    const fs::path err = work / "stderr.txt";
    const std::string cmd = std::string(PROGMETRIC_CLI) + " " + args + " > " + (work / "stdout.txt").string() +
                            " 2> " + err.string();
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, fs::exists(err) ? read_file(err) : ""};
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("progmetric_pipeline_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

// Full pipeline over the grouped test corpus into `dir`.
void run_all(const fs::path& dir) {
    const fs::path input = fs::path(PROGMETRIC_TEST_DATA) / "corpus" / "groups";
    ASSERT_EQ(cli("ingest " + q(input) + " --out-dir " + q(dir / "corpus"), dir).code, 0);
    ASSERT_EQ(cli("distmat " + q(dir / "corpus" / "corpus.jsonl") + " --out " + q(dir / "d.csv") + " --workers 2",
                  dir)
                  .code,
              0);
    std::string report_args;
    for (std::string g : {"all", "0", "1", "2"}) {
        auto out = dir / ("analysis_" + g);
        ASSERT_EQ(cli("analyze " + q(dir / "d.csv") + " --group " + g + " --out-dir " + q(out), dir).code, 0);
        report_args += " " + q(out);
    }
    ASSERT_EQ(cli("report" + report_args + " --out-dir " + q(dir / "report"), dir).code, 0);
}

}  // namespace

TEST(Pipeline, GroupedCorpusEndToEnd) {
    auto dir = scratch("groups");
    run_all(dir);

    auto errors = read_lines(dir / "corpus" / "errors.jsonl");
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_NE(errors[0].find("syntax error"), std::string::npos);
    EXPECT_EQ(read_lines(dir / "corpus" / "corpus.jsonl").size(), 9u);

    auto d = load_matrix<std::int64_t>(dir / "d.csv");
    EXPECT_EQ(d.size(), 9u);

    auto report = json::parse(read_file(dir / "report" / "report.json"));
    ASSERT_EQ(report["groups"].size(), 4u);
    EXPECT_EQ(report["groups"][0]["group"], "all");
    // Question 2 is three copies of one program: zero dispersion, the minimum.
    EXPECT_EQ(report["minima"]["avg_dispersion"], json::array({2}));
    EXPECT_EQ(report["minima"]["median_dispersion"], json::array({2}));
    EXPECT_EQ(report["groups"][3]["avg_dispersion"], 0.0);

    std::string md = read_file(dir / "report" / "report.md");
    EXPECT_EQ(md.rfind("# Summary statistics", 0), 0u);
    EXPECT_NE(md.find("| Statistic | all | 0 | 1 | 2 |"), std::string::npos);
    EXPECT_NE(md.find("Mid Prg Idx"), std::string::npos);
    EXPECT_NE(md.find("**0.0**"), std::string::npos);

    for (auto f : {"stats.json", "kfunction.csv", "persistence.csv", "betti.csv", "logdiagram.csv",
                   "logdiagram_hist.csv", "embedding.csv", "embedding.meta.json", "analysis.meta.json"})
        EXPECT_TRUE(fs::exists(dir / "analysis_all" / f)) << f;
    EXPECT_EQ(read_lines(dir / "analysis_all" / "kfunction.csv")[0], "r,K");
    EXPECT_EQ(read_lines(dir / "analysis_all" / "embedding.csv").size(), 10u);
}

TEST(Pipeline, RerunIsByteIdentical) {
    auto a = scratch("rerun_a"), b = scratch("rerun_b");
    run_all(a);
    run_all(b);
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
        if (!entry.is_regular_file()) continue;
        auto rel = fs::relative(entry.path(), a);
        if (rel == "stdout.txt" || rel == "stderr.txt") continue;
        EXPECT_EQ(read_file(entry.path()), read_file(b / rel)) << rel;
    }
}

TEST(Pipeline, UnknownGroupFails) {
    auto dir = scratch("badgroup");
    run_all(dir);
    for (std::string g : {"9", "5", "x"}) {
        auto r = cli("analyze " + q(dir / "d.csv") + " --group " + g + " --out-dir " + q(dir / "bad"), dir);
        EXPECT_EQ(r.code, 1);
        EXPECT_NE(r.err.find("error: analyze: unknown group " + g), std::string::npos) << r.err;
    }
}

TEST(Pipeline, MissingInputReportsCleanly) {
    auto dir = scratch("missing");
    auto r = cli("ingest " + q(dir / "nope") + " --out-dir " + q(dir / "c"), dir);
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.err.rfind("error: ingest: ", 0), 0u) << r.err;
}

TEST(Pipeline, InterruptedDistmatExitsThreeThenResumes) {
    auto dir = scratch("distmat_resume");
    const fs::path input = fs::path(PROGMETRIC_TEST_DATA) / "corpus" / "groups";
    ASSERT_EQ(cli("ingest " + q(input) + " --out-dir " + q(dir / "c"), dir).code, 0);
    const std::string base = "distmat " + q(dir / "c" / "corpus.jsonl") + " --block-size 2 --checkpoint " +
                             q(dir / "ck.jsonl") + " --out " + q(dir / "d.csv");
    EXPECT_EQ(cli(base + " --max-blocks 3", dir).code, 3);
    EXPECT_FALSE(fs::exists(dir / "d.csv"));
    EXPECT_EQ(cli(base, dir).code, 0);
    ASSERT_EQ(cli("distmat " + q(dir / "c" / "corpus.jsonl") + " --out " + q(dir / "ref.csv"), dir).code, 0);
    EXPECT_EQ(read_file(dir / "d.csv"), read_file(dir / "ref.csv"));
}

TEST(Pipeline, RenameCycleFixture) {
    auto dir = scratch("fixture");
    ASSERT_EQ(cli("fixture rename-cycle --out-dir " + q(dir / "fx"), dir).code, 0);
    ASSERT_EQ(cli("ingest " + q(dir / "fx") + " --out-dir " + q(dir / "c"), dir).code, 0);
    ASSERT_EQ(cli("distmat " + q(dir / "c" / "corpus.jsonl") + " --out " + q(dir / "d.csv"), dir).code, 0);
    ASSERT_EQ(cli("analyze " + q(dir / "d.csv") + " --out-dir " + q(dir / "a"), dir).code, 0);
    auto rows = read_lines(dir / "a" / "persistence.csv");
    EXPECT_NE(std::find_if(rows.begin(), rows.end(), [](const std::string& r) { return r.rfind("1,1,", 0) == 0; }),
              rows.end());
}
