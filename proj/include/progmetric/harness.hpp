#pragma once

// Chat-completion collection client. One single-turn request per
// (question, repetition); every record is appended to the output JSONL as
// soon as it arrives, so an interrupted session can be resumed.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "progmetric/corpus.hpp"
#include "progmetric/io.hpp"

namespace progmetric {

/// The seven prompts, indexed by question id.
inline const std::vector<std::string>& default_questions() {
    static const std::vector<std::string> q{
        "Write a function which thresholds an image.",
        "Write a function which segments an image using thresholding.",
        "Write a program which thresholds an image.",
        "Write a python function that segments an image using Otsu's threshold from opencv. The function must "
        "check that the input is a gray value 2d np.arrays, and it is not to perform noise reduction.",
        "Write a function which takes an image as input and returns a segmentation using Otsu thresholding.",
        "Write a function which takes an image as input and returns a segmentation using thresholding.",
        "Act as an experienced python programmer. Write a function which takes an image as input and returns a "
        "segmentation using Otsu thresholding.",
    };
    return q;
}

class HarnessError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SessionConfig {
    std::string endpoint_url;  // base URL; "/chat/completions" is appended unless already present
    std::string model_name;
    std::string api_key_env;   // name of the variable holding the key; empty for no auth
    std::vector<std::string> questions = default_questions();
    int repetitions = 100;
    std::optional<double> temperature;
    double request_timeout = 120;
    int max_retries = 5;
    double backoff_initial = 1.0;  // seconds; doubles per retry
    double backoff_max = 60.0;
    unsigned concurrency = 2;
    std::string session_id;    // generated when empty
    std::optional<std::size_t> max_requests;  // stop early after this many requests

    void validate() const {
        if (repetitions < 1) throw HarnessError("repetitions must be >= 1");
        if (temperature && (*temperature < 0 || *temperature > 2)) throw HarnessError("temperature must be in [0, 2]");
        if (questions.empty()) throw HarnessError("no questions");
        if (questions.size() > 7) throw HarnessError("at most 7 questions (question ids 0..6)");
        if (concurrency < 1) throw HarnessError("concurrency must be >= 1");
        if (max_retries < 0) throw HarnessError("max_retries must be >= 0");
        if (endpoint_url.empty()) throw HarnessError("endpoint url is empty");
    }
};

struct SessionSummary {
    std::string session_id;
    std::size_t requested = 0;  // requests issued by this run
    std::size_t succeeded = 0;
    std::size_t failed = 0;
    std::size_t skipped_existing = 0;
    std::size_t total_retries = 0;
    std::size_t records_in_file = 0;
    std::size_t expected_records = 0;
    double elapsed_seconds = 0;
    bool complete = false;
};

inline json to_json(const SessionSummary& s, const SessionConfig& c) {
    json j;
    j["session_id"] = s.session_id;
    j["model"] = c.model_name;
    j["endpoint"] = c.endpoint_url;
    j["questions"] = c.questions.size();
    j["repetitions"] = c.repetitions;
    j["temperature"] = c.temperature ? json(*c.temperature) : json(nullptr);
    j["requested"] = s.requested;
    j["succeeded"] = s.succeeded;
    j["failed"] = s.failed;
    j["skipped_existing"] = s.skipped_existing;
    j["total_retries"] = s.total_retries;
    j["records_in_file"] = s.records_in_file;
    j["expected_records"] = s.expected_records;
    j["complete"] = s.complete;
    j["elapsed_seconds"] = s.elapsed_seconds;
    return j;
}

namespace detail {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

inline Endpoint split_endpoint(const std::string& url) {
    auto scheme = url.find("://");
    if (scheme == std::string::npos) throw HarnessError("endpoint url needs a scheme: " + url);
    auto slash = url.find('/', scheme + 3);
    Endpoint e{url.substr(0, slash), slash == std::string::npos ? "" : url.substr(slash)};
    while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
    const std::string route = "/chat/completions";
    if (e.path.size() < route.size() || e.path.compare(e.path.size() - route.size(), route.size(), route) != 0)
        e.path += route;
    return e;
}

inline std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string random_session_id() {
    std::random_device rd;
    std::uniform_int_distribution<int> hex(0, 15);
    std::string s = "s-";
    for (int i = 0; i < 12; ++i) s.push_back("0123456789abcdef"[hex(rd)]);
    return s;
}

/// (question, repetition) pairs already on disk. Drops a torn final line so
/// that appends start on a fresh line.
inline std::set<std::pair<int, int>> scan_existing(const std::filesystem::path& out, std::size_t* records,
                                                   std::string* session_id) {
    std::set<std::pair<int, int>> seen;
    *records = 0;
    if (!std::filesystem::exists(out)) return seen;
    std::string text = read_file(out);
    if (!text.empty() && text.back() != '\n') {
        auto keep = text.rfind('\n');
        text.resize(keep == std::string::npos ? 0 : keep + 1);
        write_file_atomic(out, text);
    }
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line = text.substr(start, end - start);
        start = end + 1;
        try {
            RawResponse r = raw_response_from_json(json::parse(line));
            if (seen.insert({r.question_id, r.repetition}).second) ++*records;
            if (session_id->empty()) *session_id = r.session_id;
        } catch (const std::exception&) {
            // foreign or corrupt line: ignore, it will be logged at ingest
        }
    }
    return seen;
}

}  // namespace detail

/// Runs (or resumes) a collection session, appending to `out_path` and
/// writing `session_summary.json` next to it.
inline SessionSummary run_session(const SessionConfig& config, const std::filesystem::path& out_path) {
    config.validate();
    const auto started = std::chrono::steady_clock::now();
    std::string api_key;
    if (!config.api_key_env.empty()) {
        const char* v = std::getenv(config.api_key_env.c_str());
        if (!v || !*v) throw HarnessError("environment variable " + config.api_key_env + " is not set");
        api_key = v;
    }
    const detail::Endpoint endpoint = detail::split_endpoint(config.endpoint_url);

    SessionSummary summary;
    summary.expected_records = config.questions.size() * static_cast<std::size_t>(config.repetitions);
    std::string existing_session;
    std::size_t existing_records = 0;
    auto seen = detail::scan_existing(out_path, &existing_records, &existing_session);
    summary.session_id = !config.session_id.empty() ? config.session_id
                         : !existing_session.empty() ? existing_session
                                                     : detail::random_session_id();

    std::vector<std::pair<int, int>> jobs;
    for (int q = 0; q < static_cast<int>(config.questions.size()); ++q)
        for (int r = 0; r < config.repetitions; ++r) {
            if (seen.count({q, r}))
                ++summary.skipped_existing;
            else
                jobs.emplace_back(q, r);
        }
    if (config.max_requests && jobs.size() > *config.max_requests) jobs.resize(*config.max_requests);

    if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
    std::ofstream out(out_path, std::ios::binary | std::ios::app);
    if (!out) throw IoError("cannot open " + out_path.string());
    std::mutex out_mu;
    std::atomic<std::size_t> next{0};

    auto request_one = [&](httplib::Client& client, int q, int r) {
        RawResponse rec;
        rec.session_id = summary.session_id;
        rec.question_id = q;
        rec.repetition = r;
        rec.temperature = config.temperature;
        rec.model = config.model_name;

        json body;
        body["model"] = config.model_name;
        body["messages"] = json::array({{{"role", "user"}, {"content", config.questions[q]}}});
        if (config.temperature) body["temperature"] = *config.temperature;
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        const std::string payload = dump_json(body);

        double delay = config.backoff_initial;
        for (int attempt = 0;; ++attempt) {
            auto res = client.Post(endpoint.path, headers, payload, "application/json");
            std::string failure;
            if (!res) {
                failure = "transport error: " + httplib::to_string(res.error());
            } else if (res->status < 200 || res->status >= 300) {
                failure = "http status " + std::to_string(res->status);
            } else {
                rec.retries = attempt;
                try {
                    json reply = json::parse(res->body);
                    rec.response_text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
                    if (reply.contains("model") && reply["model"].is_string()) rec.model = reply["model"];
                } catch (const std::exception&) {
                    rec.ok = false;
                    rec.error = "malformed response";
                    rec.response_text = res->body;
                }
                break;
            }
            if (attempt >= config.max_retries) {
                rec.ok = false;
                rec.error = failure;
                rec.retries = attempt;
                break;
            }
            std::this_thread::sleep_for(std::chrono::duration<double>(delay));
            delay = std::min(delay * 2, config.backoff_max);
        }
        rec.timestamp = detail::utc_timestamp();
        return rec;
    };

    auto worker = [&] {
        httplib::Client client(endpoint.origin);
        auto secs = std::chrono::duration<double>(config.request_timeout);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
        client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(secs));
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            RawResponse rec = request_one(client, jobs[k].first, jobs[k].second);
            std::lock_guard lock(out_mu);
            out << dump_json(to_json(rec)) << '\n';
            out.flush();
            ++summary.requested;
            (rec.ok ? summary.succeeded : summary.failed)++;
            summary.total_retries += static_cast<std::size_t>(rec.retries);
        }
    };
    {
        std::vector<std::thread> pool;
        const std::size_t n = std::min<std::size_t>(config.concurrency, std::max<std::size_t>(jobs.size(), 1));
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    out.close();

    summary.records_in_file = existing_records + summary.requested;
    summary.complete = summary.records_in_file == summary.expected_records;
    summary.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    write_file_atomic(out_path.parent_path() / "session_summary.json", dump_json(to_json(summary, config), 2) + "\n");
    return summary;
}

}  // namespace progmetric
