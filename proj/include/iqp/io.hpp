#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "iqp/bits.hpp"
#include "iqp/errors.hpp"
#include "iqp/scheme.hpp"
#include "iqp/stabilizer.hpp"

namespace iqp {

namespace detail {

// Splits on LF only; a trailing newline does not produce an empty last line.
inline std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) {
            out.push_back(text.substr(pos));
            break;
        }
        out.push_back(text.substr(pos, nl - pos));
        pos = nl + 1;
    }
    return out;
}

// Consumes an exact literal from the front of `rest`.
inline bool eat(std::string_view& rest, std::string_view literal) {
    if (rest.substr(0, literal.size()) != literal) return false;
    rest.remove_prefix(literal.size());
    return true;
}

// Consumes a run of decimal digits from the front of `rest`.
inline bool eat_number(std::string_view& rest, std::size_t& value) {
    std::size_t len = 0;
    while (len < rest.size() && rest[len] >= '0' && rest[len] <= '9') ++len;
    if (len == 0) return false;
    auto res = std::from_chars(rest.data(), rest.data() + len, value);
    if (res.ec != std::errc{}) return false;
    rest.remove_prefix(len);
    return true;
}

inline BitVector parse_bit_row(const std::string& line, std::size_t want, std::size_t lineno) {
    if (line.size() != want)
        throw parse_error(lineno, "expected " + std::to_string(want) + " bits, got " +
                                      std::to_string(line.size()));
    BitVector v(line.size());
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '1')
            v.set(i, true);
        else if (line[i] != '0')
            throw parse_error(lineno, "invalid character in bit row");
    }
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public matrix, text format v1

inline std::string serialize_instance(const BitMatrix& h) {
    std::ostringstream os;
    os << "IQP1 n=" << h.cols() << " m=" << h.rows() << '\n';
    for (std::size_t i = 0; i < h.rows(); ++i) os << h.row(i).to_string() << '\n';
    return os.str();
}

inline BitMatrix parse_instance(const std::string& text) {
    std::vector<std::string> lines = detail::lines_of(text);
    if (lines.empty()) throw parse_error(1, "missing IQP1 header");

    std::string_view rest = lines[0];
    std::size_t n = 0, m = 0;
    if (!detail::eat(rest, "IQP1 n=") || !detail::eat_number(rest, n) ||
        !detail::eat(rest, " m=") || !detail::eat_number(rest, m) || !rest.empty())
        throw parse_error(1, "malformed header, expected `IQP1 n=<n> m=<m>`");
    if (n == 0 || m == 0) throw parse_error(1, "n and m must be positive");

    if (lines.size() < 1 + m)
        throw parse_error(lines.size() + 1, "expected " + std::to_string(m) + " rows, got " +
                                                std::to_string(lines.size() - 1));
    if (lines.size() > 1 + m) throw parse_error(m + 2, "trailing data after last row");

    std::vector<BitVector> rows;
    rows.reserve(m);
    for (std::size_t i = 0; i < m; ++i) rows.push_back(detail::parse_bit_row(lines[1 + i], n, i + 2));
    return BitMatrix::from_rows(rows);
}

// ---------------------------------------------------------------------------
// Secret sidecar

struct SecretRecord {
    BitVector s;
    Correlation corr;
};

inline std::string serialize_secret(const BitVector& s, const Correlation& corr) {
    if (corr.zero())
        throw std::invalid_argument("serialize_secret: sidecar requires a nonzero correlation");
    std::ostringstream os;
    os << s.to_string() << '\n'
       << "g=" << corr.g << " sign=" << (corr.sign > 0 ? "+1" : "-1") << '\n';
    return os.str();
}

inline SecretRecord parse_secret(const std::string& text) {
    std::vector<std::string> lines = detail::lines_of(text);
    if (lines.empty()) throw parse_error(1, "missing secret line");
    if (lines.size() < 2) throw parse_error(2, "missing `g=<g> sign=<+1|-1>` line");
    if (lines.size() > 2) throw parse_error(3, "trailing data after sidecar");
    if (lines[0].empty()) throw parse_error(1, "secret must be nonempty");

    SecretRecord rec;
    rec.s = detail::parse_bit_row(lines[0], lines[0].size(), 1);

    std::string_view rest = lines[1];
    std::size_t g = 0;
    if (!detail::eat(rest, "g=") || !detail::eat_number(rest, g) || !detail::eat(rest, " sign="))
        throw parse_error(2, "malformed line, expected `g=<g> sign=<+1|-1>`");
    rec.corr.g = g;
    if (detail::eat(rest, "+1"))
        rec.corr.sign = 1;
    else if (detail::eat(rest, "-1"))
        rec.corr.sign = -1;
    else
        throw parse_error(2, "sign must be +1 or -1");
    if (!rest.empty()) throw parse_error(2, "trailing data after sign");
    return rec;
}

// ---------------------------------------------------------------------------
// Sample batches: one n-bit string per line, no header

inline std::string serialize_samples(const std::vector<BitVector>& batch) {
    std::ostringstream os;
    for (const auto& x : batch) os << x.to_string() << '\n';
    return os.str();
}

inline std::vector<BitVector> parse_samples(const std::string& text) {
    std::vector<std::string> lines = detail::lines_of(text);
    std::vector<BitVector> batch;
    batch.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::size_t want = batch.empty() ? lines[i].size() : batch.front().size();
        if (batch.empty() && lines[i].empty()) throw parse_error(i + 1, "empty sample line");
        batch.push_back(detail::parse_bit_row(lines[i], want, i + 1));
    }
    return batch;
}

// ---------------------------------------------------------------------------
// Generation manifest: ordered key=value lines, enough to reproduce a bundle

inline std::string scheme_name(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::Stabilizer: return "stabilizer";
        case SchemeKind::Qrc: return "qrc";
        case SchemeKind::Hardened: return "hardened";
    }
    return "unknown";
}

inline std::string manifest_text(const SchemeMeta& meta) {
    std::ostringstream os;
    os << "scheme=" << scheme_name(meta.scheme) << '\n';
    os << "n=" << meta.n << '\n' << "m=" << meta.m << '\n' << "g=" << meta.g << '\n';
    os << "m1=" << meta.m1 << '\n' << "d=" << meta.d << '\n';
    os << "lambda=" << meta.lambda << '\n';
    if (meta.scheme == SchemeKind::Qrc) os << "q=" << meta.q << '\n';
    if (meta.scheme == SchemeKind::Hardened)
        os << "m0=" << meta.m0 << '\n' << "d0=" << meta.d0 << '\n'
           << "sparsity=" << meta.sparsity << '\n';
    os << "seed=" << meta.seed << '\n';
    return os.str();
}

inline std::vector<std::pair<std::string, std::string>> parse_manifest(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> lines = detail::lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        std::size_t eq = lines[i].find('=');
        if (eq == std::string::npos || eq == 0) throw parse_error(i + 1, "expected key=value");
        entries.emplace_back(lines[i].substr(0, eq), lines[i].substr(eq + 1));
    }
    return entries;
}

// ---------------------------------------------------------------------------
// Files, always binary mode so LF endings survive on every platform

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot create " + path.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace iqp
