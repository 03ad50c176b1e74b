#pragma once

#include <algorithm>
#include <filesystem>
#include <optional>
#include <regex>
#include <string>
#include <tuple>
#include <vector>

#include "progmetric/code_blocks.hpp"
#include "progmetric/io.hpp"
#include "progmetric/parse.hpp"
#include "progmetric/syntax_tree.hpp"

namespace progmetric {

/// One chat-completion answer as stored by the harness.
struct RawResponse {
    std::string session_id;
    int question_id = 0;
    int repetition = 0;
    std::optional<double> temperature;
    std::string response_text;
    std::string timestamp;
    std::string model;
    bool ok = true;
    std::string error;
    int retries = 0;
};

inline json to_json(const RawResponse& r) {
    json j;
    j["session_id"] = r.session_id;
    j["question_id"] = r.question_id;
    j["repetition"] = r.repetition;
    j["temperature"] = r.temperature ? json(*r.temperature) : json(nullptr);
    j["model"] = r.model;
    j["response_text"] = r.response_text;
    j["timestamp"] = r.timestamp;
    j["ok"] = r.ok;
    if (!r.ok) j["error"] = r.error;
    j["retries"] = r.retries;
    return j;
}

/// Throws std::invalid_argument naming the offending field.
inline RawResponse raw_response_from_json(const json& j) {
    auto need = [&](const char* key) -> const json& {
        if (!j.is_object() || !j.contains(key)) throw std::invalid_argument(std::string("missing field ") + key);
        return j.at(key);
    };
    RawResponse r;
    const json& q = need("question_id");
    const json& rep = need("repetition");
    const json& text = need("response_text");
    if (!q.is_number_integer()) throw std::invalid_argument("question_id is not an integer");
    if (!rep.is_number_integer()) throw std::invalid_argument("repetition is not an integer");
    if (!text.is_string()) throw std::invalid_argument("response_text is not a string");
    r.question_id = q.get<int>();
    r.repetition = rep.get<int>();
    if (r.question_id < 0 || r.question_id > 6) throw std::invalid_argument("question_id out of range [0,6]");
    if (r.repetition < 0) throw std::invalid_argument("negative repetition");
    r.response_text = text.get<std::string>();
    if (j.contains("session_id") && j["session_id"].is_string()) r.session_id = j["session_id"];
    if (j.contains("temperature") && j["temperature"].is_number()) r.temperature = j["temperature"].get<double>();
    if (j.contains("timestamp") && j["timestamp"].is_string()) r.timestamp = j["timestamp"];
    if (j.contains("model") && j["model"].is_string()) r.model = j["model"];
    if (j.contains("ok") && j["ok"].is_boolean()) r.ok = j["ok"];
    if (j.contains("error") && j["error"].is_string()) r.error = j["error"];
    if (j.contains("retries") && j["retries"].is_number_integer()) r.retries = j["retries"];
    return r;
}

struct Program {
    int program_id = 0;
    int question_id = 0;
    int repetition = 0;
    SyntaxTree tree;
    std::string source;
    std::string source_path;  // empty for inline sources
};

struct ErrorEntry {
    int program_id = 0;
    int question_id = -1;
    int repetition = -1;
    std::string reason;
};

/// Parsed programs with dense ids 0..n-1 in (question, repetition) order.
/// Rejected inputs are numbered after the last program.
struct Corpus {
    std::vector<Program> programs;
    std::vector<ErrorEntry> error_log;

    std::size_t size() const { return programs.size(); }
};

/// Hash over the serialized trees in program_id order, one per line.
inline std::string corpus_digest(const Corpus& c) {
    std::string all;
    for (const auto& p : c.programs) {
        all += serialize_tree(p.tree);
        all.push_back('\n');
    }
    return sha256_hex(all);
}

namespace detail {

struct Candidate {
    int question_id;
    int repetition;
    std::size_t order;  // input position, breaks (question, repetition) ties
    std::string source;
    std::string source_path;
    std::optional<std::string> rejected;  // reason known before parsing
};

inline std::string describe(const ParseError& e) {
    return "syntax error: " + std::string(e.message()) + " (line " + std::to_string(e.line()) + ", column " +
           std::to_string(e.column()) + ")";
}

inline Corpus assemble(std::vector<Candidate> cands) {
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.question_id, a.repetition, a.order) < std::tie(b.question_id, b.repetition, b.order);
    });
    Corpus corpus;
    std::vector<ErrorEntry> errors;
    for (auto& c : cands) {
        std::string reason;
        if (c.rejected) {
            reason = *c.rejected;
        } else {
            try {
                Program p;
                p.tree = parse_program(c.source);
                p.program_id = static_cast<int>(corpus.programs.size());
                p.question_id = c.question_id;
                p.repetition = c.repetition;
                p.source = std::move(c.source);
                p.source_path = std::move(c.source_path);
                corpus.programs.push_back(std::move(p));
                continue;
            } catch (const ParseError& e) {
                reason = describe(e);
            }
        }
        errors.push_back({0, c.question_id, c.repetition, std::move(reason)});
    }
    int next = static_cast<int>(corpus.programs.size());
    for (auto& e : errors) e.program_id = next++;
    corpus.error_log = std::move(errors);
    return corpus;
}

inline std::vector<Candidate> candidates_from_dir(const std::filesystem::path& dir) {
    static const std::regex pattern(R"(q(\d+)_r(\d+)\.py)");
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Candidate> out;
    for (const auto& f : files) {
        std::smatch m;
        std::string name = f.filename().string();
        if (!std::regex_match(name, m, pattern)) continue;
        Candidate c{std::stoi(m[1]), std::stoi(m[2]), out.size(), read_file(f), name, std::nullopt};
        out.push_back(std::move(c));
    }
    return out;
}

inline std::vector<Candidate> candidates_from_jsonl(const std::filesystem::path& file) {
    std::vector<Candidate> out;
    auto lines = read_lines(file);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Candidate c{-1, -1, out.size(), {}, {}, std::nullopt};
        try {
            RawResponse r = raw_response_from_json(json::parse(line));
            c.question_id = r.question_id;
            c.repetition = r.repetition;
            if (!r.ok) {
                c.rejected = "request failed: " + r.error;
            } else {
                c.source = extract_code_blocks(r.response_text);
                if (c.source.empty()) c.rejected = "no code block";
            }
        } catch (const std::exception& e) {
            c.rejected = "malformed line " + std::to_string(i + 1) + ": " + e.what();
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace detail

/// Builds a corpus from a directory of `q<question>_r<rep>.py` files or a
/// JSONL file of RawResponse records. Every input ends up either as a
/// program or as an error entry.
inline Corpus ingest_corpus(const std::filesystem::path& input) {
    if (!std::filesystem::exists(input)) throw IoError("missing path " + input.string());
    if (std::filesystem::is_directory(input)) return detail::assemble(detail::candidates_from_dir(input));
    return detail::assemble(detail::candidates_from_jsonl(input));
}

inline json manifest_record(const Program& p) {
    json j;
    j["program_id"] = p.program_id;
    j["question_id"] = p.question_id;
    j["repetition"] = p.repetition;
    if (!p.source_path.empty()) j["source_path"] = p.source_path;
    j["source"] = p.source;
    j["tree"] = serialize_tree(p.tree);
    return j;
}

inline std::string manifest_jsonl(const Corpus& c) {
    std::string out;
    for (const auto& p : c.programs) out += dump_json(manifest_record(p)) + "\n";
    return out;
}

inline std::string error_log_jsonl(const Corpus& c) {
    std::string out;
    for (const auto& e : c.error_log) {
        json j;
        j["program_id"] = e.program_id;
        j["question_id"] = e.question_id;
        j["repetition"] = e.repetition;
        j["reason"] = e.reason;
        out += dump_json(j) + "\n";
    }
    return out;
}

inline std::string trees_text(const Corpus& c) {
    std::string out;
    for (const auto& p : c.programs) out += serialize_tree(p.tree) + "\n";
    return out;
}

/// Reads a manifest written by manifest_jsonl. Trees come from the `tree`
/// field; sources are carried along but not re-parsed.
inline Corpus load_manifest(const std::filesystem::path& path) {
    Corpus c;
    auto lines = read_lines(path);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        try {
            json j = json::parse(lines[i]);
            Program p;
            p.program_id = j.at("program_id").get<int>();
            p.question_id = j.at("question_id").get<int>();
            p.repetition = j.at("repetition").get<int>();
            p.source = j.value("source", std::string());
            p.source_path = j.value("source_path", std::string());
            p.tree = deserialize_tree(j.at("tree").get<std::string>());
            if (p.program_id != static_cast<int>(c.programs.size()))
                throw std::invalid_argument("program ids not dense");
            c.programs.push_back(std::move(p));
        } catch (const std::exception& e) {
            throw IoError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
        }
    }
    return c;
}

}  // namespace progmetric
