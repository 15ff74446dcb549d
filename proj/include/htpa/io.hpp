#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "htpa/error.hpp"
#include "htpa/graph.hpp"
#include "htpa/limit_dist.hpp"
#include "htpa/params.hpp"
#include "htpa/tables.hpp"

namespace htpa {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), r.ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw FormatError("not a number: '" + std::string(s) + "'");
    return v;
}

namespace detail {
inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}
}  // namespace detail

/// Ordered key/value block written at the top of every output.
class Metadata {
public:
    void set(const std::string& key, std::string value) {
        for (auto& [k, v] : entries_)
            if (k == key) {
                v = std::move(value);
                return;
            }
        entries_.emplace_back(key, std::move(value));
    }
    void set(const std::string& key, double value) { set(key, format_double(value)); }
    void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }

    std::optional<std::string> get(const std::string& key) const {
        for (const auto& [k, v] : entries_)
            if (k == key) return v;
        return std::nullopt;
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const noexcept { return entries_; }

    friend bool operator==(const Metadata&, const Metadata&) = default;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Version, parameters, derived constants (when defined) and seed.
inline Metadata describe_run(const ModelParams& p, std::optional<std::uint64_t> seed = std::nullopt) {
    Metadata m;
    m.set("version", std::string(kVersion));
    m.set("alpha", p.alpha);
    m.set("beta", p.beta);
    m.set("gamma", p.gamma);
    m.set("delta_in", p.delta_in);
    m.set("delta_out", p.delta_out);
    try {
        const DerivedConstants d = derive(p);
        m.set("c1", d.c1);
        m.set("c2", d.c2);
        m.set("a", d.a);
        m.set("alpha_in", d.alpha_in);
        m.set("alpha_out", d.alpha_out);
    } catch (const DegenerateTail&) {
        m.set("derived", std::string("degenerate"));
    }
    if (seed) m.set("seed", *seed);
    return m;
}

inline nlohmann::ordered_json to_json(const Metadata& m) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.entries()) j[k] = v;
    return j;
}

inline nlohmann::ordered_json to_json(const ModelParams& p) {
    return {{"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"delta_in", p.delta_in},
            {"delta_out", p.delta_out}};
}

inline void write_json(const std::string& path, const nlohmann::ordered_json& j) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open " + path + " for writing");
    f << j.dump(2) << '\n';
    if (!f) throw FormatError("write failed: " + path);
}

inline nlohmann::ordered_json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open " + path);
    try {
        return nlohmann::ordered_json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    }
}

/// Flat key=value parameter file. '#' starts a comment; keys are alpha,
/// beta, gamma, delta_in, delta_out (a '-' may replace the '_').
inline ModelParams parse_params(std::istream& in) {
    ModelParams p;
    std::array<bool, 5> seen{};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": expected key=value");
        std::string key = detail::trim(std::string_view(t).substr(0, eq));
        for (char& c : key)
            if (c == '-') c = '_';
        double v = 0.0;
        try {
            v = parse_double(std::string_view(t).substr(eq + 1));
        } catch (const FormatError& e) {
            throw FormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
        static constexpr std::array<const char*, 5> keys{"alpha", "beta", "gamma", "delta_in", "delta_out"};
        double* slots[] = {&p.alpha, &p.beta, &p.gamma, &p.delta_in, &p.delta_out};
        std::size_t k = 0;
        while (k < keys.size() && key != keys[k]) ++k;
        if (k == keys.size()) throw FormatError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (seen[k]) throw FormatError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        seen[k] = true;
        *slots[k] = v;
    }
    for (std::size_t k = 0; k < seen.size(); ++k)
        if (!seen[k]) throw FormatError("parameter file misses a key (alpha, beta, gamma, delta_in, delta_out)");
    return p;
}

inline ModelParams load_params(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open parameter file " + path);
    return parse_params(f);
}

inline void write_params(std::ostream& out, const ModelParams& p) {
    out << "alpha=" << format_double(p.alpha) << "\nbeta=" << format_double(p.beta)
        << "\ngamma=" << format_double(p.gamma) << "\ndelta_in=" << format_double(p.delta_in)
        << "\ndelta_out=" << format_double(p.delta_out) << '\n';
}

/// Numeric table with a metadata block and a mandatory header row.
/// Text layout: "# key=value" lines, then the comma-separated header, then rows.
class CsvTable {
public:
    CsvTable() = default;
    CsvTable(Metadata meta, std::vector<std::string> header) : meta_(std::move(meta)), header_(std::move(header)) {
        if (header_.empty()) throw FormatError("csv header is empty");
    }

    Metadata& meta() noexcept { return meta_; }
    const Metadata& meta() const noexcept { return meta_; }
    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t columns() const noexcept { return header_.size(); }
    std::size_t rows() const noexcept { return header_.empty() ? 0 : data_.size() / header_.size(); }

    void add_row(std::initializer_list<double> values) { add_row(std::span<const double>(values.begin(), values.size())); }
    void add_row(std::span<const double> values) {
        if (values.size() != columns()) throw FormatError("row width does not match the header");
        data_.insert(data_.end(), values.begin(), values.end());
    }
    void reserve(std::size_t rows) { data_.reserve(rows * columns()); }

    double at(std::size_t r, std::size_t c) const { return data_[r * columns() + c]; }

    std::size_t column(const std::string& name) const {
        for (std::size_t c = 0; c < header_.size(); ++c)
            if (header_[c] == name) return c;
        throw FormatError("csv has no column '" + name + "'");
    }

    void require_header(const std::vector<std::string>& expected) const {
        if (header_ != expected) {
            std::string want;
            for (const auto& h : expected) want += (want.empty() ? "" : ",") + h;
            throw FormatError("csv header must be " + want);
        }
    }

private:
    Metadata meta_;
    std::vector<std::string> header_;
    std::vector<double> data_;
};

inline void write_csv(std::ostream& out, const CsvTable& t) {
    for (const auto& [k, v] : t.meta().entries()) out << "# " << k << '=' << v << '\n';
    for (std::size_t c = 0; c < t.columns(); ++c) out << (c ? "," : "") << t.header()[c];
    out << '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns(); ++c) out << (c ? "," : "") << format_double(t.at(r, c));
        out << '\n';
    }
}

inline void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream f(path);
    if (!f) throw FormatError("cannot open " + path + " for writing");
    write_csv(f, t);
    if (!f) throw FormatError("write failed: " + path);
}

inline CsvTable read_csv(std::istream& in) {
    Metadata meta;
    std::string line;
    std::vector<std::string> header;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = detail::trim(std::string_view(line).substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos) meta.set(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(detail::trim(cell));
        break;
    }
    if (header.empty()) throw FormatError("csv has no header row");
    CsvTable t(std::move(meta), std::move(header));
    std::vector<double> row;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        row.clear();
        std::size_t pos = 0;
        while (true) {
            const auto comma = line.find(',', pos);
            try {
                row.push_back(parse_double(std::string_view(line).substr(pos, comma == std::string::npos
                                                                                      ? std::string::npos
                                                                                      : comma - pos)));
            } catch (const FormatError& e) {
                throw FormatError("csv line " + std::to_string(lineno) + ": " + e.what());
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (row.size() != t.columns())
            throw FormatError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.columns()) +
                              " fields");
        t.add_row(row);
    }
    return t;
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open " + path);
    return read_csv(f);
}

namespace detail {
inline std::uint64_t as_count(double v, const char* what) {
    if (!(v >= 0.0) || v != std::floor(v) || v > 9007199254740992.0)
        throw FormatError(std::string(what) + " must be a nonnegative integer");
    return static_cast<std::uint64_t>(v);
}
}  // namespace detail

/// counts.csv: i, j, N_ij.
inline CsvTable counts_csv(const JointCountTable& counts, Metadata meta) {
    CsvTable t(std::move(meta), {"i", "j", "N_ij"});
    t.reserve(counts.cells().size());
    for (const auto& c : counts.cells()) t.add_row({double(c.in), double(c.out), double(c.count)});
    return t;
}

inline JointCountTable counts_from_csv(const CsvTable& t) {
    t.require_header({"i", "j", "N_ij"});
    std::vector<CountCell> cells;
    cells.reserve(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r)
        cells.push_back({detail::as_count(t.at(r, 0), "i"), detail::as_count(t.at(r, 1), "j"),
                         detail::as_count(t.at(r, 2), "N_ij")});
    return JointCountTable(std::move(cells));
}

/// pmf.csv: i, j, p.
inline CsvTable pmf_csv(const JointPMF& pmf, Metadata meta) {
    CsvTable t(std::move(meta), {"i", "j", "p"});
    t.reserve(pmf.cells().size());
    for (const auto& c : pmf.cells()) t.add_row({double(c.in), double(c.out), c.mass});
    return t;
}

inline JointPMF pmf_from_csv(const CsvTable& t) {
    t.require_header({"i", "j", "p"});
    std::vector<MassCell> cells;
    cells.reserve(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r) {
        const double p = t.at(r, 2);
        if (!(p >= 0.0)) throw FormatError("p must be nonnegative");
        cells.push_back({detail::as_count(t.at(r, 0), "i"), detail::as_count(t.at(r, 1), "j"), p});
    }
    return JointPMF(std::move(cells));
}

/// samples.csv: I, O.
inline CsvTable samples_csv(std::span<const DegreePair> samples, Metadata meta) {
    CsvTable t(std::move(meta), {"I", "O"});
    t.reserve(samples.size());
    for (const auto& s : samples) t.add_row({double(s.in), double(s.out)});
    return t;
}

inline std::vector<DegreePair> samples_from_csv(const CsvTable& t) {
    t.require_header({"I", "O"});
    std::vector<DegreePair> out;
    out.reserve(t.rows());
    for (std::size_t r = 0; r < t.rows(); ++r)
        out.push_back({detail::as_count(t.at(r, 0), "I"), detail::as_count(t.at(r, 1), "O")});
    return out;
}

/// Grid text: a comma list "0.5,1,2", or "lo:hi:n" for n log-spaced points
/// (lo > 0), or "lo:hi:n:lin" for n evenly spaced points.
inline std::vector<double> parse_grid(const std::string& spec) {
    std::vector<std::string> parts;
    const char sep = spec.find(':') != std::string::npos ? ':' : ',';
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(detail::trim(part));
    std::vector<double> out;
    if (sep == ',') {
        for (const auto& p : parts) out.push_back(parse_double(p));
        if (out.empty()) throw FormatError("empty grid");
        return out;
    }
    if (parts.size() != 3 && parts.size() != 4) throw FormatError("grid range must be lo:hi:n or lo:hi:n:lin");
    const double lo = parse_double(parts[0]), hi = parse_double(parts[1]);
    const double nd = parse_double(parts[2]);
    if (!(nd >= 1.0) || nd != std::floor(nd) || nd > 1e7) throw FormatError("grid point count must be a positive integer");
    const bool lin = parts.size() == 4;
    if (lin && parts[3] != "lin") throw FormatError("grid spacing must be 'lin'");
    if (!lin && !(lo > 0.0 && hi > 0.0)) throw FormatError("log-spaced grid needs positive end points");
    const auto n = static_cast<std::size_t>(nd);
    for (std::size_t q = 0; q < n; ++q) {
        const double f = n == 1 ? 0.0 : double(q) / double(n - 1);
        out.push_back(lin ? lo + f * (hi - lo) : std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))));
    }
    out.front() = lo;
    if (n > 1) out.back() = hi;
    return out;
}

inline constexpr std::array<char, 8> kGraphMagic{'H', 'T', 'P', 'A', 'G', 'R', 'P', 'H'};
inline constexpr std::uint32_t kGraphFormatVersion = 1;

namespace detail {
template <class T>
void put_le(std::ostream& out, T v) {
    std::array<char, sizeof(T)> b{};
    for (std::size_t i = 0; i < sizeof(T); ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    out.write(b.data(), b.size());
}

template <class T>
T get_le(std::istream& in) {
    std::array<unsigned char, sizeof(T)> b{};
    if (!in.read(reinterpret_cast<char*>(b.data()), b.size())) throw FormatError("graph file is truncated");
    T v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(b[i]) << (8 * i);
    return v;
}
}  // namespace detail

/// Little-endian graph file: magic, format version (u32), node count N
/// (u64), edge count n (u64), then n tails and n heads as u32.
inline void write_graph(std::ostream& out, const DirectedMultigraph& g) {
    if (g.node_count() >= (std::uint64_t{1} << 32)) throw ResourceLimit("node count does not fit in 32 bits");
    out.write(kGraphMagic.data(), kGraphMagic.size());
    detail::put_le<std::uint32_t>(out, kGraphFormatVersion);
    detail::put_le<std::uint64_t>(out, g.node_count());
    detail::put_le<std::uint64_t>(out, g.edge_count());
    std::vector<char> buf;
    for (auto ids : {g.tails(), g.heads()}) {
        buf.resize(ids.size() * 4);
        for (std::size_t e = 0; e < ids.size(); ++e)
            for (int b = 0; b < 4; ++b) buf[4 * e + b] = static_cast<char>((ids[e] >> (8 * b)) & 0xFF);
        out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    }
}

inline DirectedMultigraph read_graph(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size()) || magic != kGraphMagic) throw FormatError("not a graph file");
    const auto version = detail::get_le<std::uint32_t>(in);
    if (version != kGraphFormatVersion) throw FormatError("unsupported graph format version " + std::to_string(version));
    const auto nodes = detail::get_le<std::uint64_t>(in);
    const auto edges = detail::get_le<std::uint64_t>(in);
    if (nodes >= (std::uint64_t{1} << 32)) throw FormatError("node count does not fit in 32 bits");
    std::vector<std::uint32_t> tails(edges), heads(edges);
    std::vector<unsigned char> buf(edges * 4);
    for (auto* ids : {&tails, &heads}) {
        if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
            throw FormatError("graph file is truncated");
        for (std::size_t e = 0; e < edges; ++e) {
            std::uint32_t v = 0;
            for (int b = 0; b < 4; ++b) v |= std::uint32_t(buf[4 * e + b]) << (8 * b);
            if (v >= nodes) throw FormatError("edge endpoint out of range");
            (*ids)[e] = v;
        }
    }
    DirectedMultigraph g;
    g.reserve(nodes, edges);
    for (std::uint64_t v = 0; v < nodes; ++v) g.add_node();
    for (std::size_t e = 0; e < edges; ++e) g.add_edge(tails[e], heads[e]);
    return g;
}

/// Writes path and a metadata sidecar path + ".json".
inline void write_graph(const std::string& path, const DirectedMultigraph& g, const Metadata& meta) {
    {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw FormatError("cannot open " + path + " for writing");
        write_graph(f, g);
        if (!f) throw FormatError("write failed: " + path);
    }
    write_json(path + ".json", to_json(meta));
}

inline DirectedMultigraph read_graph(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path);
    return read_graph(f);
}

}  // namespace htpa
