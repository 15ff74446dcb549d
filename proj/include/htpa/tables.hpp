#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <tuple>
#include <vector>

namespace htpa {

struct CountCell {
    std::uint64_t in = 0;
    std::uint64_t out = 0;
    std::uint64_t count = 0;
};

struct MassCell {
    std::uint64_t in = 0;
    std::uint64_t out = 0;
    double mass = 0.0;
};

namespace detail {

template <class Cell, class Merge>
std::vector<Cell> sorted_unique(std::vector<Cell> cells, Merge merge) {
    std::sort(cells.begin(), cells.end(),
              [](const Cell& x, const Cell& y) { return std::tie(x.in, x.out) < std::tie(y.in, y.out); });
    std::vector<Cell> out;
    out.reserve(cells.size());
    for (const Cell& c : cells) {
        if (!out.empty() && out.back().in == c.in && out.back().out == c.out)
            merge(out.back(), c);
        else
            out.push_back(c);
    }
    return out;
}

template <class Cell>
const Cell* find_cell(std::span<const Cell> cells, std::uint64_t i, std::uint64_t j) {
    auto it = std::lower_bound(cells.begin(), cells.end(), std::pair{i, j}, [](const Cell& c, const auto& key) {
        return std::tie(c.in, c.out) < std::tie(key.first, key.second);
    });
    if (it != cells.end() && it->in == i && it->out == j) return &*it;
    return nullptr;
}

}  // namespace detail

/// Sparse table of N_ij: the number of nodes with in-degree i and out-degree j.
/// Cells are kept sorted by (i, j) and only nonzero counts are stored.
class JointCountTable {
public:
    JointCountTable() = default;
    explicit JointCountTable(std::vector<CountCell> cells)
        : cells_(detail::sorted_unique(std::move(cells), [](CountCell& a, const CountCell& b) { a.count += b.count; })) {
        std::erase_if(cells_, [](const CountCell& c) { return c.count == 0; });
    }

    std::span<const CountCell> cells() const noexcept { return cells_; }
    bool empty() const noexcept { return cells_.empty(); }

    std::uint64_t count(std::uint64_t i, std::uint64_t j) const {
        const CountCell* c = detail::find_cell(cells(), i, j);
        return c ? c->count : 0;
    }

    /// Sum of all counts: the node count N(n) for a degree census.
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (const auto& c : cells_) s += c.count;
        return s;
    }

private:
    std::vector<CountCell> cells_;
};

/// Sparse joint probability mass function over (in-degree, out-degree).
/// Absent cells carry zero mass. The total may be below one when the
/// table is a truncation of an infinite support.
class JointPMF {
public:
    JointPMF() = default;
    explicit JointPMF(std::vector<MassCell> cells)
        : cells_(detail::sorted_unique(std::move(cells), [](MassCell& a, const MassCell& b) { a.mass += b.mass; })) {
        for (const auto& c : cells_) {
            total_ += c.mass;
            max_in_ = std::max(max_in_, c.in);
            max_out_ = std::max(max_out_, c.out);
        }
    }

    std::span<const MassCell> cells() const noexcept { return cells_; }
    double total() const noexcept { return total_; }
    std::uint64_t max_in() const noexcept { return max_in_; }
    std::uint64_t max_out() const noexcept { return max_out_; }

    double mass(std::uint64_t i, std::uint64_t j) const {
        const MassCell* c = detail::find_cell(cells(), i, j);
        return c ? c->mass : 0.0;
    }

    std::map<std::uint64_t, double> marginal_in() const {
        std::map<std::uint64_t, double> m;
        for (const auto& c : cells_) m[c.in] += c.mass;
        return m;
    }

    std::map<std::uint64_t, double> marginal_out() const {
        std::map<std::uint64_t, double> m;
        for (const auto& c : cells_) m[c.out] += c.mass;
        return m;
    }

private:
    std::vector<MassCell> cells_;
    double total_ = 0.0;
    std::uint64_t max_in_ = 0;
    std::uint64_t max_out_ = 0;
};

}  // namespace htpa
