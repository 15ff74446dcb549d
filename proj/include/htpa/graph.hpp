#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htpa/error.hpp"
#include "htpa/params.hpp"
#include "htpa/rng.hpp"
#include "htpa/tables.hpp"

namespace htpa {

using NodeId = std::uint32_t;

struct Edge {
    NodeId tail = 0;
    NodeId head = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// Growing directed multigraph. Node ids are dense and assigned in
/// creation order; the edge arrays are append-only. Self-loops and
/// parallel edges are allowed.
class DirectedMultigraph {
public:
    NodeId add_node() {
        if (in_degree_.size() >= std::numeric_limits<NodeId>::max())
            throw ResourceLimit("node count would exceed 2^32 - 1");
        in_degree_.push_back(0);
        out_degree_.push_back(0);
        return static_cast<NodeId>(in_degree_.size() - 1);
    }

    void add_edge(NodeId tail, NodeId head) {
        tails_.push_back(tail);
        heads_.push_back(head);
        ++out_degree_[tail];
        ++in_degree_[head];
    }

    void reserve(std::size_t nodes, std::size_t edges) {
        in_degree_.reserve(nodes);
        out_degree_.reserve(nodes);
        tails_.reserve(edges);
        heads_.reserve(edges);
    }

    std::size_t node_count() const noexcept { return in_degree_.size(); }
    std::size_t edge_count() const noexcept { return tails_.size(); }

    std::span<const NodeId> tails() const noexcept { return tails_; }
    std::span<const NodeId> heads() const noexcept { return heads_; }
    std::span<const std::uint32_t> in_degrees() const noexcept { return in_degree_; }
    std::span<const std::uint32_t> out_degrees() const noexcept { return out_degree_; }

    /// Recomputes degrees from the edge arrays and compares.
    bool check_invariants() const {
        if (tails_.size() != heads_.size()) return false;
        std::vector<std::uint32_t> din(node_count(), 0), dout(node_count(), 0);
        for (std::size_t e = 0; e < tails_.size(); ++e) {
            if (tails_[e] >= node_count() || heads_[e] >= node_count()) return false;
            ++dout[tails_[e]];
            ++din[heads_[e]];
        }
        return din == in_degree_ && dout == out_degree_;
    }

    friend bool operator==(const DirectedMultigraph&, const DirectedMultigraph&) = default;

private:
    std::vector<NodeId> tails_;
    std::vector<NodeId> heads_;
    std::vector<std::uint32_t> in_degree_;
    std::vector<std::uint32_t> out_degree_;
};

/// Initial graph G(n0). The default is a single node carrying one self-loop.
struct SeedSpec {
    std::size_t nodes = 1;
    std::vector<Edge> edges{Edge{0, 0}};
};

inline DirectedMultigraph seed_graph(const SeedSpec& spec, const ModelParams& params) {
    if (spec.nodes == 0) throw InvalidSeed("seed graph needs at least one node");
    if (spec.edges.empty() && (params.delta_in == 0.0 || params.delta_out == 0.0))
        throw InvalidSeed("seed graph needs n0 >= 1 edges when delta_in or delta_out is zero");
    DirectedMultigraph g;
    g.reserve(spec.nodes, spec.edges.size());
    for (std::size_t v = 0; v < spec.nodes; ++v) g.add_node();
    for (const Edge& e : spec.edges) {
        if (e.tail >= spec.nodes || e.head >= spec.nodes)
            throw InvalidSeed("seed edge refers to a node outside the seed graph");
        g.add_edge(e.tail, e.head);
    }
    return g;
}

namespace detail {

// With n edges and N nodes, P(w) = (D(w) + delta) / (n + delta N). Since the
// degrees sum to n this is the mixture: with probability n / (n + delta N)
// take an endpoint of a uniform edge, otherwise a uniform node.
inline NodeId choose_preferential(std::span<const NodeId> endpoints, std::size_t nodes, double delta, Rng& rng) {
    const double n = static_cast<double>(endpoints.size());
    const double offset = delta * static_cast<double>(nodes);
    if (nodes == 0 || !(n + offset > 0.0))
        throw DomainError("preferential choice needs an edge or a positive offset");
    if (offset == 0.0 || rng.uniform01() * (n + offset) < n) return endpoints[rng.below(endpoints.size())];
    return static_cast<NodeId>(rng.below(nodes));
}

}  // namespace detail

/// Node chosen with probability (D_in(w) + delta_in) / (n + delta_in N).
inline NodeId choose_by_in(const DirectedMultigraph& g, double delta_in, Rng& rng) {
    return detail::choose_preferential(g.heads(), g.node_count(), delta_in, rng);
}

/// Node chosen with probability (D_out(v) + delta_out) / (n + delta_out N).
inline NodeId choose_by_out(const DirectedMultigraph& g, double delta_out, Rng& rng) {
    return detail::choose_preferential(g.tails(), g.node_count(), delta_out, rng);
}

enum class GrowthCase { alpha, beta, gamma };

struct GrowthStepOutcome {
    GrowthCase growth_case = GrowthCase::beta;
    std::optional<NodeId> new_node;
    Edge edge;
};

/// One growth step: adds exactly one edge and at most one node.
inline GrowthStepOutcome step(DirectedMultigraph& g, const ModelParams& p, Rng& rng) {
    const double u = rng.uniform01();
    GrowthStepOutcome out;
    if (u < p.alpha) {
        // Endpoint is drawn from G(n-1), before the new node exists.
        const NodeId w = choose_by_in(g, p.delta_in, rng);
        const NodeId v = g.add_node();
        out = {GrowthCase::alpha, v, Edge{v, w}};
    } else if (u < p.alpha + p.beta) {
        const NodeId v = choose_by_out(g, p.delta_out, rng);
        const NodeId w = choose_by_in(g, p.delta_in, rng);
        out = {GrowthCase::beta, std::nullopt, Edge{v, w}};
    } else {
        const NodeId v = choose_by_out(g, p.delta_out, rng);
        const NodeId w = g.add_node();
        out = {GrowthCase::gamma, w, Edge{v, w}};
    }
    g.add_edge(out.edge.tail, out.edge.head);
    return out;
}

struct GrowthLimits {
    /// Upper bound on the memory the grown graph may occupy.
    std::uint64_t max_bytes = 16ULL << 30;
};

/// Bytes held by a graph with the given node and edge counts.
inline std::uint64_t graph_footprint(std::uint64_t nodes, std::uint64_t edges) {
    return 2 * sizeof(NodeId) * edges + 2 * sizeof(std::uint32_t) * nodes;
}

/// Grows `g` until it has exactly `target_edges` edges.
inline void grow(DirectedMultigraph& g, std::uint64_t target_edges, const ModelParams& params, Rng& rng,
                 const GrowthLimits& limits = {}) {
    const ModelParams p = validate(params);
    if (target_edges < g.edge_count()) throw DomainError("target edge count is below the current edge count");
    const std::uint64_t extra = target_edges - g.edge_count();
    const std::uint64_t max_nodes = g.node_count() + extra;
    if (max_nodes >= (1ULL << 32)) throw ResourceLimit("graph could reach 2^32 nodes; node ids are 32-bit");
    if (graph_footprint(max_nodes, target_edges) > limits.max_bytes)
        throw ResourceLimit("growing to " + std::to_string(target_edges) + " edges exceeds the memory budget of " +
                            std::to_string(limits.max_bytes) + " bytes");
    g.reserve(g.node_count() + static_cast<std::size_t>(static_cast<double>(extra) * (1.0 - p.beta) * 1.01) + 16,
              target_edges);
    while (g.edge_count() < target_edges) step(g, p, rng);
}

/// Census of (in-degree, out-degree) pairs over all nodes.
inline JointCountTable degree_counts(const DirectedMultigraph& g) {
    const auto din = g.in_degrees();
    const auto dout = g.out_degrees();
    std::vector<std::uint64_t> keys(g.node_count());
    for (std::size_t v = 0; v < keys.size(); ++v) keys[v] = (std::uint64_t{din[v]} << 32) | dout[v];
    std::sort(keys.begin(), keys.end());
    std::vector<CountCell> cells;
    for (std::size_t v = 0; v < keys.size();) {
        std::size_t w = v;
        while (w < keys.size() && keys[w] == keys[v]) ++w;
        cells.push_back({keys[v] >> 32, keys[v] & 0xFFFFFFFFULL, w - v});
        v = w;
    }
    return JointCountTable(std::move(cells));
}

}  // namespace htpa
