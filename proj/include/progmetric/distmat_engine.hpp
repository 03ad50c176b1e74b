#pragma once

// Parallel, resumable all-pairs tree edit distance.
//
// The upper triangle is cut into block_size x block_size tiles. Workers claim
// tiles from an atomic counter and compute them into private buffers; the
// calling thread is the only writer, merging tiles into the matrix and
// appending one checkpoint record per tile. A checkpoint is JSONL: a header
// {format, corpus_digest, block_size, n} followed by {block:[r,c], values:[..]}
// records. A torn final record (crash mid-write) is dropped on resume.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <set>
#include <thread>
#include <utility>
#include <vector>

#include "progmetric/corpus.hpp"
#include "progmetric/distance_matrix.hpp"
#include "progmetric/io.hpp"
#include "progmetric/tree_edit.hpp"

namespace progmetric {

class DistmatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kCheckpointFormat = "progmetric-dmat-ckpt/1";

struct DistmatOptions {
    unsigned workers = 1;
    std::size_t block_size = 256;
    std::optional<std::filesystem::path> checkpoint{};
    /// Stop after computing this many new blocks (simulates an interrupted run).
    std::optional<std::size_t> max_blocks{};
    EditCosts costs{};
    std::size_t max_nodes = kDefaultMaxTreeNodes;
};

struct DistmatResult {
    DistanceMatrix matrix;
    bool complete = false;
    std::size_t blocks_total = 0;
    std::size_t blocks_resumed = 0;
    std::size_t blocks_computed = 0;
    std::size_t pairs_computed = 0;
    double seconds = 0;

    double pairs_per_second() const { return seconds > 0 ? pairs_computed / seconds : 0.0; }
};

namespace detail {

struct Block {
    std::size_t row = 0, col = 0;  // tile coordinates, row <= col
    std::vector<std::int64_t> values;  // full rectangle, row-major; only i<j cells are meaningful
};

struct Tiling {
    std::size_t n, size, count_per_side;
    std::vector<std::pair<std::size_t, std::size_t>> tiles;

    Tiling(std::size_t n_, std::size_t size_) : n(n_), size(size_), count_per_side((n_ + size_ - 1) / size_) {
        for (std::size_t r = 0; r < count_per_side; ++r)
            for (std::size_t c = r; c < count_per_side; ++c) tiles.emplace_back(r, c);
    }
    std::size_t begin(std::size_t t) const { return t * size; }
    std::size_t end(std::size_t t) const { return std::min(n, (t + 1) * size); }
    std::size_t width(std::size_t t) const { return end(t) - begin(t); }
};

inline json checkpoint_header(const std::string& digest, std::size_t block_size, std::size_t n) {
    json h;
    h["format"] = kCheckpointFormat;
    h["corpus_digest"] = digest;
    h["block_size"] = block_size;
    h["n"] = n;
    return h;
}

inline json block_record(const Block& b) {
    json j;
    j["block"] = {b.row, b.col};
    j["values"] = b.values;
    return j;
}

/// Completed blocks from an existing checkpoint. Rejects a checkpoint that
/// belongs to a different corpus or tiling.
inline std::vector<Block> read_checkpoint(const std::filesystem::path& path, const std::string& digest,
                                          const Tiling& tiling) {
    auto lines = read_lines(path);
    if (lines.empty()) return {};
    json header;
    try {
        header = json::parse(lines[0]);
    } catch (const std::exception&) {
        if (lines.size() == 1) return {};  // torn header: nothing was completed
        throw DistmatError("checkpoint header is corrupt");
    }
    if (header.value("format", "") != kCheckpointFormat) throw DistmatError("checkpoint format not recognized");
    if (header.value("corpus_digest", "") != digest)
        throw DistmatError("checkpoint corpus digest mismatch: checkpoint was written for a different corpus");
    if (header.value("block_size", std::size_t{0}) != tiling.size || header.value("n", std::size_t{0}) != tiling.n)
        throw DistmatError("checkpoint block_size or n mismatch");

    std::vector<Block> blocks;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        try {
            json j = json::parse(lines[i]);
            Block b;
            b.row = j.at("block").at(0).get<std::size_t>();
            b.col = j.at("block").at(1).get<std::size_t>();
            b.values = j.at("values").get<std::vector<std::int64_t>>();
            if (b.row > b.col || b.col >= tiling.count_per_side ||
                b.values.size() != tiling.width(b.row) * tiling.width(b.col))
                throw DistmatError("block out of range");
            if (seen.insert({b.row, b.col}).second) blocks.push_back(std::move(b));
        } catch (const std::exception& e) {
            if (i + 1 == lines.size()) break;  // torn tail from an interrupted write
            throw DistmatError("checkpoint record " + std::to_string(i + 1) + " is corrupt: " + e.what());
        }
    }
    return blocks;
}

}  // namespace detail

/// All-pairs ted over the corpus. The result does not depend on the worker
/// count, on scheduling, or on whether the run was resumed from a checkpoint.
inline DistmatResult compute_matrix(const Corpus& corpus, const DistmatOptions& opt = {}) {
    const std::size_t n = corpus.size();
    if (n < 2) throw DistmatError("corpus needs at least 2 programs, has " + std::to_string(n));
    if (opt.workers < 1) throw DistmatError("workers must be >= 1");
    if (opt.block_size < 1) throw DistmatError("block size must be >= 1");
    opt.costs.validate();

    for (std::size_t i = 0; i < n; ++i) {
        std::size_t nodes = tree_size(corpus.programs[i].tree);
        if (nodes > opt.max_nodes) {
            std::size_t other = i == 0 ? 1 : 0;
            throw DistmatError("pair (" + std::to_string(std::min(i, other)) + "," + std::to_string(std::max(i, other)) +
                               "): program " + std::to_string(corpus.programs[i].program_id) + " " +
                               TreeTooLarge(nodes, opt.max_nodes).what());
        }
    }

    const auto start = std::chrono::steady_clock::now();
    DistmatResult result;
    result.matrix = DistanceMatrix(n);
    for (std::size_t i = 0; i < n; ++i)
        result.matrix.set_program(i, corpus.programs[i].program_id, corpus.programs[i].question_id);

    detail::Tiling tiling(n, opt.block_size);
    result.blocks_total = tiling.tiles.size();
    const std::string digest = corpus_digest(corpus);

    auto merge = [&](const detail::Block& b) {
        const std::size_t r0 = tiling.begin(b.row), c0 = tiling.begin(b.col), w = tiling.width(b.col);
        for (std::size_t i = r0; i < tiling.end(b.row); ++i)
            for (std::size_t j = std::max(c0, i + 1); j < tiling.end(b.col); ++j)
                result.matrix.set_symmetric(i, j, b.values[(i - r0) * w + (j - c0)]);
    };

    std::vector<char> done(tiling.tiles.size(), 0);
    std::ofstream ckpt;
    if (opt.checkpoint) {
        std::vector<detail::Block> previous;
        if (std::filesystem::exists(*opt.checkpoint)) previous = detail::read_checkpoint(*opt.checkpoint, digest, tiling);
        // Rewrite without any torn tail, then append from here on.
        std::string text = dump_json(detail::checkpoint_header(digest, opt.block_size, n)) + "\n";
        for (const auto& b : previous) {
            merge(b);
            done[b.row * tiling.count_per_side - b.row * (b.row - 1) / 2 + (b.col - b.row)] = 1;
            text += dump_json(detail::block_record(b)) + "\n";
        }
        result.blocks_resumed = previous.size();
        write_file_atomic(*opt.checkpoint, text);
        ckpt.open(*opt.checkpoint, std::ios::binary | std::ios::app);
        if (!ckpt) throw IoError("cannot append to checkpoint " + opt.checkpoint->string());
    }

    std::vector<std::size_t> todo;
    for (std::size_t t = 0; t < tiling.tiles.size(); ++t)
        if (!done[t]) todo.push_back(t);
    if (opt.max_blocks && todo.size() > *opt.max_blocks) todo.resize(*opt.max_blocks);

    LabelTable labels;
    std::vector<PreparedTree> prepared;
    prepared.reserve(n);
    for (const auto& p : corpus.programs) prepared.push_back(prepare_tree(p.tree, labels));

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::mutex mu;
    std::condition_variable cv;
    std::deque<detail::Block> finished;
    std::exception_ptr error;
    std::size_t workers_left = std::min<std::size_t>(opt.workers, std::max<std::size_t>(todo.size(), 1));

    auto worker = [&] {
        TedWorkspace<std::int64_t> ws;
        try {
            for (std::size_t k = next++; k < todo.size() && !failed; k = next++) {
                auto [row, col] = tiling.tiles[todo[k]];
                detail::Block b{row, col, std::vector<std::int64_t>(tiling.width(row) * tiling.width(col), 0)};
                const std::size_t r0 = tiling.begin(row), c0 = tiling.begin(col), w = tiling.width(col);
                for (std::size_t i = r0; i < tiling.end(row); ++i)
                    for (std::size_t j = std::max(c0, i + 1); j < tiling.end(col); ++j)
                        b.values[(i - r0) * w + (j - c0)] = ted(prepared[i], prepared[j], opt.costs, ws);
                std::lock_guard lock(mu);
                finished.push_back(std::move(b));
                cv.notify_one();
            }
        } catch (...) {
            std::lock_guard lock(mu);
            if (!error) error = std::current_exception();
            failed = true;
        }
        std::lock_guard lock(mu);
        --workers_left;
        cv.notify_one();
    };

    std::vector<std::thread> pool;
    const std::size_t spawn = workers_left;
    for (std::size_t w = 0; w < spawn; ++w) pool.emplace_back(worker);

    {
        std::unique_lock lock(mu);
        while (true) {
            cv.wait(lock, [&] { return !finished.empty() || workers_left == 0; });
            if (finished.empty()) break;
            detail::Block b = std::move(finished.front());
            finished.pop_front();
            lock.unlock();
            merge(b);
            for (std::size_t i = tiling.begin(b.row); i < tiling.end(b.row); ++i)
                for (std::size_t j = std::max(tiling.begin(b.col), i + 1); j < tiling.end(b.col); ++j)
                    ++result.pairs_computed;
            ++result.blocks_computed;
            if (ckpt.is_open()) {
                ckpt << dump_json(detail::block_record(b)) << '\n';
                ckpt.flush();
            }
            lock.lock();
        }
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    result.complete = result.blocks_resumed + result.blocks_computed == result.blocks_total;
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (result.complete) result.matrix.validate();
    return result;
}

}  // namespace progmetric
