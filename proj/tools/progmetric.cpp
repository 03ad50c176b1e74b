// progmetric command-line driver. Each subcommand is one pipeline stage;
// failures exit non-zero with a single "error: <command>: <reason>" line.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "progmetric/harness.hpp"
#include "progmetric/pipeline.hpp"

namespace pm = progmetric;

namespace {

std::vector<double> parse_radii(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad radius '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty radii list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Metric-space analysis of program corpora under tree edit distance"};
    app.set_version_flag("--version", std::string(pm::kVersion));
    app.require_subcommand(1);

    // collect
    pm::SessionConfig session;
    std::string collect_out = "responses.jsonl";
    std::optional<double> temperature;
    std::optional<std::size_t> max_requests;
    auto* collect = app.add_subcommand("collect", "Query a chat-completions endpoint with the seven questions");
    collect->add_option("--endpoint", session.endpoint_url, "Base URL of the endpoint")->required();
    collect->add_option("--model", session.model_name, "Model name sent with each request")->required();
    collect->add_option("--api-key-env", session.api_key_env, "Environment variable holding the API key");
    collect->add_option("--repetitions", session.repetitions, "Repetitions per question")->capture_default_str();
    collect->add_option("--temperature", temperature, "Sampling temperature; endpoint default when unset");
    collect->add_option("--timeout", session.request_timeout, "Per-request timeout in seconds")->capture_default_str();
    collect->add_option("--max-retries", session.max_retries, "Retries per request")->capture_default_str();
    collect->add_option("--backoff", session.backoff_initial, "Initial retry delay in seconds")->capture_default_str();
    collect->add_option("--concurrency", session.concurrency, "Requests in flight")->capture_default_str();
    collect->add_option("--session-id", session.session_id, "Session id (generated when empty)");
    collect->add_option("--max-requests", max_requests, "Stop after this many requests");
    collect->add_option("--out", collect_out, "Output JSONL")->capture_default_str();

    // ingest
    std::string ingest_in, ingest_out = "corpus";
    auto* ingest = app.add_subcommand("ingest", "Extract and parse programs into a corpus manifest");
    ingest->add_option("input", ingest_in, "Responses JSONL or directory of q<q>_r<r>.py files")->required();
    ingest->add_option("--out-dir", ingest_out, "Output directory")->capture_default_str();

    // distmat
    std::string dm_manifest, dm_out = "corpus.dmat.csv";
    std::optional<std::string> dm_ckpt;
    std::optional<std::size_t> dm_max_blocks;
    pm::DistmatOptions dm_opt;
    auto* distmat = app.add_subcommand("distmat", "Compute the pairwise tree edit distance matrix");
    distmat->add_option("manifest", dm_manifest, "Corpus manifest (corpus.jsonl)")->required();
    distmat->add_option("--out", dm_out, "Matrix CSV path")->capture_default_str();
    distmat->add_option("--workers", dm_opt.workers, "Worker threads")->capture_default_str();
    distmat->add_option("--block-size", dm_opt.block_size, "Tile edge length")->capture_default_str();
    distmat->add_option("--checkpoint", dm_ckpt, "Checkpoint file; resumed when present");
    distmat->add_option("--max-blocks", dm_max_blocks, "Stop after computing this many blocks");
    distmat->add_option("--max-nodes", dm_opt.max_nodes, "Tree size guard")->capture_default_str();

    // analyze
    std::string an_dmat, an_out = "analysis";
    pm::AnalyzeOptions an_opt;
    std::optional<double> r_max;
    std::optional<std::string> radii;
    auto* analyze = app.add_subcommand("analyze", "Dispersion, K-function, persistence and embedding of one group");
    analyze->add_option("dmat", an_dmat, "Matrix CSV")->required();
    analyze->add_option("--group", an_opt.group, "all or a question id 0..6")->capture_default_str();
    analyze->add_option("--out-dir", an_out, "Output directory")->capture_default_str();
    analyze->add_option("--seed", an_opt.seed, "MDS seed")->capture_default_str();
    analyze->add_option("--restarts", an_opt.restarts, "MDS restarts")->capture_default_str();
    analyze->add_option("--r-max", r_max, "Filtration cut-off (default: largest distance)");
    analyze->add_option("--radii", radii, "Comma-separated radii (default: 0..max distance)");

    // report
    std::vector<std::string> rep_dirs;
    std::string rep_out = "report";
    auto* report = app.add_subcommand("report", "Summary table over analysis directories");
    report->add_option("dirs", rep_dirs, "Analysis directories")->required();
    report->add_option("--out-dir", rep_out, "Output directory")->capture_default_str();

    // fixture
    std::string fx_name, fx_out = "fixture";
    auto* fixture = app.add_subcommand("fixture", "Write a built-in test corpus");
    fixture->add_option("name", fx_name, "Fixture name")->required()->check(CLI::IsMember({"rename-cycle"}));
    fixture->add_option("--out-dir", fx_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (*collect) {
            session.temperature = temperature;
            session.max_requests = max_requests;
            auto s = pm::run_session(session, collect_out);
            std::cout << "collected " << s.requested << " responses (" << s.failed << " failed, " << s.total_retries
                      << " retries), " << s.records_in_file << "/" << s.expected_records << " in " << collect_out
                      << "\n";
            if (!s.complete) {
                std::cerr << "error: collect: incomplete session, " << s.records_in_file << "/" << s.expected_records
                          << " records\n";
                return 3;
            }
        } else if (*ingest) {
            auto r = pm::run_ingest(ingest_in, ingest_out);
            std::cout << "ingested " << r.programs << " programs, " << r.errors << " errors -> " << ingest_out << "\n";
        } else if (*distmat) {
            if (dm_ckpt) dm_opt.checkpoint = *dm_ckpt;
            dm_opt.max_blocks = dm_max_blocks;
            auto r = pm::run_distmat(dm_manifest, dm_out, dm_opt);
            std::cout << "computed " << r.pairs_computed << " pairs in " << r.blocks_computed << " blocks ("
                      << r.blocks_resumed << " resumed, " << r.blocks_total << " total), "
                      << static_cast<long long>(r.pairs_per_second()) << " pairs/s\n";
            if (!r.complete) {
                std::cerr << "error: distmat: incomplete, " << r.blocks_resumed + r.blocks_computed << "/"
                          << r.blocks_total << " blocks done; rerun with the same --checkpoint to resume\n";
                return 3;
            }
        } else if (*analyze) {
            an_opt.r_max = r_max;
            if (radii) an_opt.radii = parse_radii(*radii);
            pm::run_analyze(an_dmat, an_out, an_opt);
            std::cout << "analyzed group " << an_opt.group << " (seed " << an_opt.seed << ") -> " << an_out << "\n";
        } else if (*report) {
            std::vector<pm::fs::path> dirs(rep_dirs.begin(), rep_dirs.end());
            pm::run_report(dirs, rep_out);
            std::cout << "report -> " << rep_out << "\n";
        } else if (*fixture) {
            pm::write_rename_cycle(fx_out);
            std::cout << "wrote " << pm::rename_cycle_states().size() << " programs -> " << fx_out << "\n";
        }
    } catch (const std::exception& e) {
        std::string reason = e.what();
        for (char& c : reason)
            if (c == '\n') c = ' ';
        std::cerr << "error: " << command << ": " << reason << "\n";
        return 1;
    }
    return 0;
}
