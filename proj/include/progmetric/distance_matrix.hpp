#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "progmetric/io.hpp"
#include "progmetric/version.hpp"

namespace progmetric {

class MatrixValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense symmetric n x n matrix with per-row program metadata.
/// Integer entries for tree edit distances; floating entries for the
/// Euclidean test fixtures.
template <class T>
class BasicDistanceMatrix {
public:
    using value_type = T;

    BasicDistanceMatrix() = default;
    explicit BasicDistanceMatrix(std::size_t n) : n_(n), values_(n * n, T{}), program_ids_(n), groups_(n, 0) {
        for (std::size_t i = 0; i < n; ++i) program_ids_[i] = static_cast<int>(i);
    }

    /// Builds from row-major values; ids default to 0..n-1, group 0.
    static BasicDistanceMatrix from_rows(const std::vector<std::vector<T>>& rows) {
        BasicDistanceMatrix m(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) throw MatrixValidationError("matrix is not square");
            for (std::size_t j = 0; j < rows.size(); ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    std::size_t size() const noexcept { return n_; }
    T& operator()(std::size_t i, std::size_t j) { return values_[i * n_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
    const std::vector<T>& values() const noexcept { return values_; }

    const std::vector<int>& program_ids() const noexcept { return program_ids_; }
    const std::vector<int>& groups() const noexcept { return groups_; }
    void set_program(std::size_t i, int program_id, int question_id) {
        program_ids_[i] = program_id;
        groups_[i] = question_id;
    }

    /// Sets d(i,j) and d(j,i).
    void set_symmetric(std::size_t i, std::size_t j, T v) {
        (*this)(i, j) = v;
        (*this)(j, i) = v;
    }

    T max_value() const {
        return values_.empty() ? T{} : *std::max_element(values_.begin(), values_.end());
    }

    /// Distinct question ids in ascending order.
    std::vector<int> group_ids() const {
        std::vector<int> g = groups_;
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        return g;
    }

    /// Zero diagonal, symmetry and non-negativity; throws on the first
    /// violation found.
    void validate() const {
        for (std::size_t i = 0; i < n_; ++i) {
            if ((*this)(i, i) != T{})
                throw MatrixValidationError("non-zero diagonal at " + std::to_string(i));
            for (std::size_t j = i + 1; j < n_; ++j) {
                if ((*this)(i, j) != (*this)(j, i))
                    throw MatrixValidationError("asymmetric entry at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
                if ((*this)(i, j) < T{})
                    throw MatrixValidationError("negative entry at (" + std::to_string(i) + "," +
                                                std::to_string(j) + ")");
            }
        }
    }

    friend bool operator==(const BasicDistanceMatrix&, const BasicDistanceMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<T> values_;
    std::vector<int> program_ids_;
    std::vector<int> groups_;
};

using DistanceMatrix = BasicDistanceMatrix<std::int64_t>;

/// Principal submatrix of the programs belonging to one question.
template <class T>
BasicDistanceMatrix<T> submatrix(const BasicDistanceMatrix<T>& m, int question_id) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.groups()[i] == question_id) rows.push_back(i);
    if (rows.empty()) throw std::out_of_range("unknown group " + std::to_string(question_id));
    BasicDistanceMatrix<T> s(rows.size());
    for (std::size_t a = 0; a < rows.size(); ++a) {
        s.set_program(a, m.program_ids()[rows[a]], question_id);
        for (std::size_t b = 0; b < rows.size(); ++b) s(a, b) = m(rows[a], rows[b]);
    }
    return s;
}

/// Number of sampled triples (i,j,k) with d(i,k) > d(i,j) + d(j,k).
template <class T>
std::size_t triangle_violations(const BasicDistanceMatrix<T>& m, std::size_t samples, std::uint64_t seed) {
    if (m.size() == 0) return 0;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
    std::size_t bad = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        if (m(i, k) > m(i, j) + m(j, k)) ++bad;
    }
    return bad;
}

namespace detail {

template <class T>
std::string format_entry(T v) {
    if constexpr (std::is_integral_v<T>)
        return std::to_string(v);
    else
        return format_real(static_cast<double>(v));
}

template <class T>
T parse_entry(std::string_view s, std::size_t row) {
    T v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw MatrixValidationError("bad entry '" + std::string(s) + "' in row " + std::to_string(row));
    return v;
}

}  // namespace detail

/// `foo.dmat.csv` -> `foo.dmat.meta.json`.
inline std::filesystem::path matrix_sidecar_path(const std::filesystem::path& csv) {
    std::string s = csv.string();
    if (s.size() >= 4 && s.compare(s.size() - 4, 4, ".csv") == 0) s.resize(s.size() - 4);
    return s + ".meta.json";
}

template <class T>
std::string matrix_csv(const BasicDistanceMatrix<T>& m) {
    std::string out = "n," + std::to_string(m.size()) + "\n";
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (j) out.push_back(',');
            out += detail::format_entry(m(i, j));
        }
        out.push_back('\n');
    }
    return out;
}

template <class T>
json matrix_meta(const BasicDistanceMatrix<T>& m, const json& extra = json::object()) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["format"] = "progmetric-dmat/1";
    j["n"] = m.size();
    j["program_ids"] = m.program_ids();
    j["question_ids"] = m.groups();
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    return j;
}

/// Writes the CSV and its metadata sidecar atomically.
template <class T>
void save_matrix(const BasicDistanceMatrix<T>& m, const std::filesystem::path& path,
                 const json& extra_meta = json::object()) {
    write_file_atomic(path, matrix_csv(m));
    write_file_atomic(matrix_sidecar_path(path), dump_json(matrix_meta(m, extra_meta), 2) + "\n");
}

/// Reads and validates a matrix. Metadata comes from the sidecar when
/// present, otherwise ids are 0..n-1 in group 0.
template <class T = std::int64_t>
BasicDistanceMatrix<T> load_matrix(const std::filesystem::path& path) {
    auto lines = read_lines(path);
    if (lines.empty() || lines[0].rfind("n,", 0) != 0) throw MatrixValidationError("missing 'n,<n>' header");
    std::size_t n = 0;
    {
        std::string_view h = std::string_view(lines[0]).substr(2);
        auto res = std::from_chars(h.data(), h.data() + h.size(), n);
        if (res.ec != std::errc() || res.ptr != h.data() + h.size())
            throw MatrixValidationError("bad header '" + lines[0] + "'");
    }
    std::size_t body = lines.size() - 1;
    while (body > 0 && lines[body].empty()) --body;
    if (body != n)
        throw MatrixValidationError("header says n=" + std::to_string(n) + " but body has " + std::to_string(body) +
                                    " rows");
    BasicDistanceMatrix<T> m(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string_view row = lines[i + 1];
        std::size_t j = 0, start = 0;
        while (true) {
            std::size_t comma = row.find(',', start);
            std::string_view cell = row.substr(start, comma == std::string_view::npos ? row.npos : comma - start);
            if (j >= n) throw MatrixValidationError("row " + std::to_string(i) + " has more than n entries");
            m(i, j++) = detail::parse_entry<T>(cell, i);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (j != n) throw MatrixValidationError("row " + std::to_string(i) + " has " + std::to_string(j) + " entries");
    }
    m.validate();

    auto meta_path = matrix_sidecar_path(path);
    if (std::filesystem::exists(meta_path)) {
        json meta = json::parse(read_file(meta_path));
        auto ids = meta.at("program_ids").get<std::vector<int>>();
        auto groups = meta.at("question_ids").get<std::vector<int>>();
        if (ids.size() != n || groups.size() != n) throw MatrixValidationError("sidecar size does not match matrix");
        for (std::size_t i = 0; i < n; ++i) m.set_program(i, ids[i], groups[i]);
    }
    return m;
}

}  // namespace progmetric
