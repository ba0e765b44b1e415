#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ldlab/errors.hpp"
#include "ldlab/linalg.hpp"

namespace ldlab {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits: enough to round-trip any double through text.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// One CLI experiment: parameters, seed, and a rectangular table of results.
/// Cells are kept as their serialized text so the CSV and JSON views agree
/// byte for byte; re-running with the same params and seed reproduces the
/// rows exactly.
struct ExperimentReport {
    std::string experiment;
    std::vector<std::pair<std::string, std::string>> params;
    std::uint64_t seed = 0;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void param(const std::string& key, const std::string& value) {
        params.emplace_back(key, value);
    }
    void param(const std::string& key, double value) { param(key, format_number(value)); }
    void param(const std::string& key, std::uint64_t value) { param(key, std::to_string(value)); }

    void add_row(std::vector<std::string> cells) {
        if (cells.size() != columns.size())
            throw argument_error("ExperimentReport: row width does not match header");
        rows.push_back(std::move(cells));
    }

    /// CSV: header line then one line per row, '.' decimal separator, LF endings.
    std::string csv() const {
        std::string out;
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += columns[c];
        }
        out += '\n';
        for (const auto& row : rows) {
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c) out += ',';
                out += row[c];
            }
            out += '\n';
        }
        return out;
    }

    nlohmann::json json(bool with_timestamp = true) const {
        nlohmann::json j;
        j["experiment"] = experiment;
        nlohmann::json p = nlohmann::json::object();
        for (const auto& [k, v] : params) p[k] = v;
        j["params"] = p;
        j["seed"] = seed;
        nlohmann::json rws = nlohmann::json::array();
        for (const auto& row : rows) {
            nlohmann::json r = nlohmann::json::object();
            for (std::size_t c = 0; c < columns.size(); ++c) r[columns[c]] = row[c];
            rws.push_back(std::move(r));
        }
        j["rows"] = rws;
        j["meta"]["version"] = kVersion;
        if (with_timestamp) {
            const std::time_t now = std::time(nullptr);
            char buf[32];
            std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
            j["meta"]["timestamp"] = buf;
        }
        return j;
    }
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw argument_error("cannot open for writing: " + path);
    out << content;
}

/// Reads a dense symmetric matrix from whitespace/comma-separated text.
inline SymMatrix read_dense_matrix(std::istream& in) {
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        // commas may glue numbers together
        for (char& ch : token)
            if (ch == ',') ch = ' ';
        std::istringstream ts(token);
        double v;
        while (ts >> v) values.push_back(v);
    }
    const auto n = static_cast<std::size_t>(std::llround(std::sqrt(double(values.size()))));
    if (n * n != values.size())
        throw argument_error("dense matrix file: token count " +
                             std::to_string(values.size()) + " is not a perfect square");
    SymMatrix m(n);
    double scale = 0.0;
    for (const double v : values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double upper = values[i * n + j];
            const double lower = values[j * n + i];
            if (std::abs(upper - lower) > 1e-12 * std::max(1.0, scale))
                throw argument_error("dense matrix file: not symmetric at (" +
                                     std::to_string(i) + "," + std::to_string(j) + ")");
            m.set(i, j, upper);
        }
    return m;
}

inline SymMatrix read_dense_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open matrix file: " + path);
    return read_dense_matrix(in);
}

/// Reads a 0-indexed "u v" edge list into an adjacency matrix. Lines starting
/// with '#' and blank lines are skipped; n defaults to max index + 1.
inline SymMatrix read_edge_list(std::istream& in, std::size_t n_hint = 0) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::size_t n = n_hint;
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        long long u, v;
        if (!(ls >> u >> v) || u < 0 || v < 0)
            throw argument_error("edge list: bad line '" + line + "'");
        edges.emplace_back(static_cast<std::size_t>(u), static_cast<std::size_t>(v));
        n = std::max({n, static_cast<std::size_t>(u) + 1, static_cast<std::size_t>(v) + 1});
    }
    SymMatrix m(n);
    for (const auto& [u, v] : edges)
        if (u != v) m.set(u, v, 1.0);
    return m;
}

inline SymMatrix read_edge_list_file(const std::string& path, std::size_t n_hint = 0) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open edge list: " + path);
    return read_edge_list(in, n_hint);
}

inline std::string to_edge_list(const SymMatrix& a) {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            if (a(i, j) != 0.0) out += std::to_string(i) + " " + std::to_string(j) + "\n";
    return out;
}

/// Dense CSV export (one matrix row per line, 17 significant digits).
inline std::string to_dense_csv(const SymMatrix& a) {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (j) out += ',';
            out += format_number(a(i, j));
        }
        out += '\n';
    }
    return out;
}

}  // namespace ldlab
