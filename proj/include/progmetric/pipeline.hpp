#pragma once

// File-to-file pipeline stages. Each stage reads only documented files,
// writes its outputs atomically, and records tool version plus input
// digests in a meta sidecar. Nothing time-dependent is written, so a re-run
// on the same inputs reproduces every byte.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "progmetric/corpus.hpp"
#include "progmetric/distance_matrix.hpp"
#include "progmetric/distmat_engine.hpp"
#include "progmetric/fixtures.hpp"
#include "progmetric/io.hpp"
#include "progmetric/mds.hpp"
#include "progmetric/parse.hpp"
#include "progmetric/spatial_stats.hpp"
#include "progmetric/tda.hpp"
#include "progmetric/version.hpp"

namespace progmetric {

namespace fs = std::filesystem;

class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline json tool_header() {
    json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    return j;
}

/// Digest of a file, or of a directory's q*_r*.py listing and contents.
inline std::string input_digest(const fs::path& p) {
    if (!fs::is_directory(p)) return sha256_file(p);
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".py") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.filename().string() + "\n" + sha256_file(f) + "\n";
    return sha256_hex(all);
}

}  // namespace detail

struct IngestOutputs {
    std::size_t programs = 0;
    std::size_t errors = 0;
};

/// corpus.jsonl (manifest), errors.jsonl, corpus.trees, ingest.meta.json.
inline IngestOutputs run_ingest(const fs::path& input, const fs::path& out_dir) {
    Corpus c = ingest_corpus(input);
    write_file_atomic(out_dir / "corpus.jsonl", manifest_jsonl(c));
    write_file_atomic(out_dir / "errors.jsonl", error_log_jsonl(c));
    write_file_atomic(out_dir / "corpus.trees", trees_text(c));
    json meta = detail::tool_header();
    meta["python_grammar"] = kPythonGrammar;
    meta["input"] = input.filename().string();
    meta["input_sha256"] = detail::input_digest(input);
    meta["programs"] = c.programs.size();
    meta["errors"] = c.error_log.size();
    meta["corpus_digest"] = corpus_digest(c);
    write_file_atomic(out_dir / "ingest.meta.json", dump_json(meta, 2) + "\n");
    return {c.programs.size(), c.error_log.size()};
}

/// Computes or resumes the matrix for a manifest and, once complete, writes
/// `out` plus its sidecar.
inline DistmatResult run_distmat(const fs::path& manifest, const fs::path& out, const DistmatOptions& opt) {
    Corpus c = load_manifest(manifest);
    DistmatResult r = compute_matrix(c, opt);
    if (r.complete) {
        json extra;
        extra["corpus_digest"] = corpus_digest(c);
        extra["manifest_sha256"] = sha256_file(manifest);
        extra["costs"] = {{"relabel", opt.costs.relabel}, {"insert", opt.costs.insert}, {"delete", opt.costs.remove}};
        save_matrix(r.matrix, out, extra);
    }
    return r;
}

struct AnalyzeOptions {
    std::string group = "all";  // "all" or a question id 0..6
    std::uint64_t seed = 0;
    int restarts = 4;
    std::optional<double> r_max;
    std::optional<std::vector<double>> radii;
    std::size_t histogram_bins = 20;
};

/// Parses "all" or 0..6; anything else, or a group absent from the matrix,
/// is "unknown group".
inline std::optional<int> parse_group(const std::string& g) {
    if (g == "all") return std::nullopt;
    if (g.size() == 1 && g[0] >= '0' && g[0] <= '6') return g[0] - '0';
    throw PipelineError("unknown group " + g);
}

inline std::string csv_real(double v) { return format_real(v); }

inline void run_analyze(const fs::path& dmat_path, const fs::path& out_dir, const AnalyzeOptions& opt) {
    std::optional<int> group = parse_group(opt.group);
    DistanceMatrix full = load_matrix<std::int64_t>(dmat_path);
    DistanceMatrix d;
    if (group) {
        try {
            d = submatrix(full, *group);
        } catch (const std::out_of_range&) {
            throw PipelineError("unknown group " + opt.group);
        }
    } else {
        d = full;
    }
    const std::size_t n = d.size();
    if (n == 0) throw PipelineError("empty matrix");

    // Spatial statistics.
    DispersionSummary disp = dispersion(d);
    json stats;
    stats["question_id"] = group ? json(*group) : json("all");
    stats["medoid_program_id"] = disp.medoid_program_id;
    stats["avg_dispersion"] = disp.avg_dispersion;
    stats["median_dispersion"] = disp.median_dispersion;
    stats["mad"] = disp.mad;
    stats["n"] = n;
    write_file_atomic(out_dir / "stats.json", dump_json(stats, 2) + "\n");

    std::vector<double> radii = opt.radii ? *opt.radii : default_radii(d);
    KFunctionCurve k = ripley_k(d, radii);
    std::string kcsv = "r,K\n";
    for (std::size_t i = 0; i < radii.size(); ++i) kcsv += csv_real(radii[i]) + "," + csv_real(k.values[i]) + "\n";
    write_file_atomic(out_dir / "kfunction.csv", kcsv);

    // Topology.
    FiltrationConfig fc;
    fc.r_max = opt.r_max;
    auto pairs = vr_persistence(d, fc);
    std::string pcsv = "dim,birth,death\n";
    for (const auto& p : pairs)
        pcsv += std::to_string(p.dim) + "," + csv_real(p.birth) + "," + csv_real(p.death) + "\n";
    write_file_atomic(out_dir / "persistence.csv", pcsv);

    std::string bcsv = "dim,r,count\n";
    for (int dim = 0; dim <= 1; ++dim) {
        BettiCurve b = betti_curve(pairs, radii, dim);
        for (std::size_t i = 0; i < radii.size(); ++i)
            bcsv += std::to_string(dim) + "," + csv_real(radii[i]) + "," + std::to_string(b.counts[i]) + "\n";
    }
    write_file_atomic(out_dir / "betti.csv", bcsv);

    LogDiagram ld = log_diagram(pairs, opt.histogram_bins);
    std::string lcsv = "dim,log_birth,log_death\n";
    for (const auto& q : ld.points)
        lcsv += std::to_string(q.dim) + "," + csv_real(q.log_birth) + "," + csv_real(q.log_death) + "\n";
    write_file_atomic(out_dir / "logdiagram.csv", lcsv);
    std::string hcsv = "dim,axis,bin_lo,bin_hi,count\n";
    for (const auto& h : ld.histogram)
        hcsv += std::to_string(h.dim) + "," + h.axis + "," + csv_real(h.lo) + "," + csv_real(h.hi) + "," +
                std::to_string(h.count) + "\n";
    write_file_atomic(out_dir / "logdiagram_hist.csv", hcsv);

    // Embedding. A single program sits at the origin with zero stress.
    Embedding e;
    if (n >= 2) {
        SmacofOptions so;
        so.seed = opt.seed;
        so.restarts = opt.restarts;
        e = mds_embed(d, so);
    } else {
        e.points = {{0.0, 0.0}};
        e.converged = true;
    }
    std::string ecsv = "program_id,question_id,x,y\n";
    for (std::size_t i = 0; i < n; ++i)
        ecsv += std::to_string(d.program_ids()[i]) + "," + std::to_string(d.groups()[i]) + "," +
                csv_real(e.points[i][0]) + "," + csv_real(e.points[i][1]) + "\n";
    write_file_atomic(out_dir / "embedding.csv", ecsv);
    json em = detail::tool_header();
    em["raw_stress"] = e.raw_stress;
    em["avg_stress"] = e.avg_stress;
    em["seed"] = opt.seed;
    em["restarts"] = opt.restarts;
    em["iterations"] = e.iterations;
    em["converged"] = e.converged;
    write_file_atomic(out_dir / "embedding.meta.json", dump_json(em, 2) + "\n");

    json meta = detail::tool_header();
    meta["input"] = dmat_path.filename().string();
    meta["input_sha256"] = sha256_file(dmat_path);
    auto sidecar = matrix_sidecar_path(dmat_path);
    if (fs::exists(sidecar)) meta["input_meta_sha256"] = sha256_file(sidecar);
    meta["group"] = opt.group;
    meta["n"] = n;
    meta["radii"] = radii;
    meta["r_max"] = opt.r_max ? json(*opt.r_max) : json("auto");
    meta["strict_k_inequality"] = true;
    meta["log_transform"] = "log10(1+x)";
    meta["n_infinite"] = ld.n_infinite;
    meta["histogram_bins"] = opt.histogram_bins;
    write_file_atomic(out_dir / "analysis.meta.json", dump_json(meta, 2) + "\n");
}

struct ReportRow {
    std::string group;
    int medoid_program_id = 0;
    double avg_dispersion = 0;
    double median_dispersion = 0;
    double avg_stress = 0;
    std::size_t n = 0;
};

namespace detail {

inline std::string fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

}  // namespace detail

/// report.json and report.md from analysis directories. Columns are "all"
/// followed by question ids; questions with fewer than two programs are
/// left out. In each statistic row the smallest per-question value is
/// flagged (ties all flagged); the "all" column and the medoid row are not
/// ranked.
inline void run_report(const std::vector<fs::path>& dirs, const fs::path& out_dir) {
    std::map<int, ReportRow> rows;  // -1 = all
    json inputs = json::array();
    for (const auto& dir : dirs) {
        json stats, em;
        try {
            stats = json::parse(read_file(dir / "stats.json"));
            em = json::parse(read_file(dir / "embedding.meta.json"));
        } catch (const std::exception& ex) {
            throw PipelineError(dir.string() + ": " + ex.what());
        }
        ReportRow r;
        int key = stats.at("question_id").is_string() ? -1 : stats.at("question_id").get<int>();
        r.group = key < 0 ? "all" : std::to_string(key);
        r.medoid_program_id = stats.at("medoid_program_id");
        r.avg_dispersion = stats.at("avg_dispersion");
        r.median_dispersion = stats.at("median_dispersion");
        r.avg_stress = em.at("avg_stress");
        r.n = stats.at("n");
        if (rows.count(key)) throw PipelineError("group " + r.group + " given twice");
        json in;
        fs::path name = dir.lexically_normal();
        if (name.filename().empty()) name = name.parent_path();
        in["dir"] = name.filename().string();
        in["stats_sha256"] = sha256_file(dir / "stats.json");
        in["embedding_meta_sha256"] = sha256_file(dir / "embedding.meta.json");
        inputs.push_back(in);
        if (key >= 0 && r.n < 2) continue;
        rows[key] = r;
    }
    if (!rows.count(-1)) throw PipelineError("report needs the 'all' group");

    struct Stat {
        const char* key;
        const char* title;
        double ReportRow::*field;
    };
    const Stat stats[] = {{"avg_dispersion", "Avg Dispersion", &ReportRow::avg_dispersion},
                          {"median_dispersion", "Median Dispersion", &ReportRow::median_dispersion},
                          {"avg_stress", "Average Stress", &ReportRow::avg_stress}};

    json minima;
    std::map<std::string, std::vector<int>> flagged;
    for (const auto& s : stats) {
        std::vector<int> best;
        double lo = kInfinity;
        for (const auto& [key, r] : rows) {
            if (key < 0) continue;
            double v = r.*s.field;
            if (v < lo) {
                lo = v;
                best = {key};
            } else if (v == lo) {
                best.push_back(key);
            }
        }
        flagged[s.key] = best;
        minima[s.key] = best;
    }

    json report = detail::tool_header();
    report["inputs"] = inputs;
    json groups = json::array();
    for (const auto& [key, r] : rows) {
        json g;
        g["group"] = r.group;
        g["medoid_program_id"] = r.medoid_program_id;
        g["avg_dispersion"] = r.avg_dispersion;
        g["median_dispersion"] = r.median_dispersion;
        g["avg_stress"] = r.avg_stress;
        g["n"] = r.n;
        groups.push_back(g);
    }
    report["groups"] = groups;
    report["minima"] = minima;
    report["avg_stress_definition"] = "raw SMACOF stress divided by n";
    write_file_atomic(out_dir / "report.json", dump_json(report, 2) + "\n");

    std::string md = "# Summary statistics\n\n| Statistic |";
    std::string rule = "|---|";
    for (const auto& [key, r] : rows) {
        md += " " + r.group + " |";
        rule += "---:|";
    }
    md += "\n" + rule + "\n| Mid Prg Idx |";
    for (const auto& [key, r] : rows) md += " " + std::to_string(r.medoid_program_id) + " |";
    md += "\n";
    for (const auto& s : stats) {
        md += std::string("| ") + s.title + " |";
        const auto& best = flagged[s.key];
        for (const auto& [key, r] : rows) {
            std::string cell = detail::fixed1(r.*s.field);
            if (std::find(best.begin(), best.end(), key) != best.end()) cell = "**" + cell + "**";
            md += " " + cell + " |";
        }
        md += "\n";
    }
    md += "\nBold marks the smallest per-question value in each row. Average Stress is raw SMACOF stress "
          "divided by the number of programs.\n";
    write_file_atomic(out_dir / "report.md", md);
}

/// Writes the rename-cycle programs as q0_r<i>.py files.
inline void write_rename_cycle(const fs::path& out_dir) {
    Corpus c = rename_cycle_fixture();
    for (const auto& p : c.programs) write_file_atomic(out_dir / p.source_path, p.source);
}

}  // namespace progmetric
