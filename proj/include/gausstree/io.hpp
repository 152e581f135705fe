#pragma once

// File formats:
//  * sample / table CSV: optional '#'-prefixed metadata lines, one header row,
//    then comma-separated decimal floats. Doubles are written in shortest
//    round-trip form, so write -> read is bit-exact.
//  * tree JSON: [[u, v], ...] in canonical order.
//  * instance JSON: {kind, epsilon, n, bits, mean, cov} (+ optional variant).

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "gausstree/distribution.hpp"
#include "gausstree/estimators.hpp"
#include "gausstree/hard_instances.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/tree.hpp"

namespace gausstree {

using json = nlohmann::json;

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::runtime_error("csv: cannot parse number '" + std::string(s) + "'");
    }
    return v;
}

/// 64-bit FNV-1a, used to fingerprint configs in output metadata.
inline std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

struct CsvTable {
    std::vector<std::string> comments; ///< metadata lines without the leading '#'
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    bool operator==(const CsvTable&) const = default;
};

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace detail

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        if (line.front() == '#') {
            t.comments.push_back(detail::trim(line.substr(1)));
            continue;
        }
        auto fields = detail::split_commas(line);
        if (!have_header) {
            for (auto& f : fields) {
                t.header.push_back(detail::trim(f));
            }
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw std::runtime_error("csv: line " + std::to_string(line_no) + " has " + std::to_string(fields.size())
                                     + " fields, header has " + std::to_string(t.header.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) {
            row.push_back(parse_double(f));
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) {
        throw std::runtime_error("csv: missing header row");
    }
    return t;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    return read_csv(in);
}

inline void write_csv(std::ostream& out, const CsvTable& t) {
    for (const auto& c : t.comments) {
        out << "# " << c << '\n';
    }
    for (std::size_t j = 0; j < t.header.size(); ++j) {
        out << (j ? "," : "") << t.header[j];
    }
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            out << (j ? "," : "") << format_double(r[j]);
        }
        out << '\n';
    }
}

inline void write_csv_file(const std::string& path, const CsvTable& t) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    write_csv(out, t);
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

inline CsvTable batch_to_csv(const SampleBatch& batch, std::vector<std::string> names = {}) {
    CsvTable t;
    t.comments.push_back("seed=" + std::to_string(batch.seed()) + " origin=" + batch.origin());
    if (names.empty()) {
        for (std::size_t j = 0; j < batch.cols(); ++j) {
            names.push_back("x" + std::to_string(j));
        }
    }
    if (names.size() != batch.cols()) {
        throw std::invalid_argument("batch_to_csv: one name per column required");
    }
    t.header = std::move(names);
    t.rows.assign(batch.rows(), std::vector<double>(batch.cols()));
    for (std::size_t r = 0; r < batch.rows(); ++r) {
        for (std::size_t j = 0; j < batch.cols(); ++j) {
            t.rows[r][j] = batch(r, j);
        }
    }
    return t;
}

inline SampleBatch csv_to_batch(const CsvTable& t) {
    if (t.rows.empty()) {
        throw InsufficientSamples("csv: sample file has no data rows");
    }
    return SampleBatch::from_rows(t.rows, 0, "csv");
}

// --- trees ------------------------------------------------------------------

inline json tree_to_json(const Tree& tree) {
    json arr = json::array();
    for (const auto& [u, v] : tree.edges()) {
        arr.push_back({u, v});
    }
    return arr;
}

/// Accepts a bare edge array or an object with a "tree" member. Vertex count is
/// inferred as edges + 1 unless given.
inline Tree tree_from_json(const json& doc, std::size_t n = 0) {
    const json& j = doc.is_object() && doc.contains("tree") ? doc.at("tree") : doc;
    if (!j.is_array()) {
        throw std::runtime_error("tree json: expected an array of [u, v] pairs");
    }
    std::vector<Edge> edges;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) {
            throw std::runtime_error("tree json: each edge must be a two-element array");
        }
        edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    const std::size_t vertices = n ? n : edges.size() + 1;
    return Tree(vertices, std::move(edges));
}

// --- verdicts -----------------------------------------------------------------

inline json verdict_to_json(const TestVerdict& v) {
    return {{"decision", to_string(v.decision)},
            {"estimate", v.estimate},
            {"threshold", v.threshold},
            {"epsilon", v.epsilon},
            {"m", v.m}};
}

// --- instances ----------------------------------------------------------------

/// A generated hard instance plus the parameters that produced it.
struct InstanceRecord {
    std::string kind;   ///< realizable | nonrealizable | mi-test | additive
    double epsilon = 0.1;
    std::size_t n = 1;
    std::vector<std::uint8_t> bits;
    std::string variant; ///< realizable only: shared-noise | chain
    GaussianDistribution dist;
};

inline json instance_to_json(const InstanceRecord& rec) {
    json j;
    j["kind"] = rec.kind;
    j["epsilon"] = rec.epsilon;
    j["n"] = rec.n;
    j["bits"] = rec.bits;
    if (!rec.variant.empty()) {
        j["variant"] = rec.variant;
    }
    j["mean"] = rec.dist.mean();
    j["cov"] = rec.dist.cov().rows();
    return j;
}

inline InstanceRecord instance_from_json(const json& j) {
    InstanceRecord rec;
    rec.kind = j.at("kind").get<std::string>();
    rec.epsilon = j.at("epsilon").get<double>();
    rec.n = j.at("n").get<std::size_t>();
    rec.bits = j.at("bits").get<std::vector<std::uint8_t>>();
    rec.variant = j.value("variant", std::string{});
    auto cov = SymMatrix::from_rows(j.at("cov").get<std::vector<std::vector<double>>>());
    rec.dist = GaussianDistribution(j.at("mean").get<std::vector<double>>(), std::move(cov), rec.kind);
    return rec;
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    return json::parse(in);
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

} // namespace gausstree
