#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "htpa/graph.hpp"

using namespace htpa;

namespace {
const ModelParams kP{0.3, 0.5, 0.2, 1.0, 1.0};

DirectedMultigraph two_nodes() {
    SeedSpec s;
    s.nodes = 2;
    s.edges = {{0, 1}};
    return seed_graph(s, kP);
}
}  // namespace

TEST(Seed, DefaultIsSelfLoop) {
    const auto g = seed_graph({}, kP);
    EXPECT_EQ(g.node_count(), 1u);
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_EQ(g.in_degrees()[0], 1u);
    EXPECT_EQ(g.out_degrees()[0], 1u);
    const auto t = degree_counts(g);
    ASSERT_EQ(t.cells().size(), 1u);
    EXPECT_EQ(t.count(1, 1), 1u);
}

TEST(Seed, TwoNodes) {
    const auto g = two_nodes();
    EXPECT_EQ(g.node_count(), 2u);
    EXPECT_EQ(g.in_degrees()[0], 0u);
    EXPECT_EQ(g.in_degrees()[1], 1u);
    EXPECT_EQ(g.out_degrees()[0], 1u);
    EXPECT_EQ(g.out_degrees()[1], 0u);
    const auto t = degree_counts(g);
    EXPECT_EQ(t.count(0, 1), 1u);
    EXPECT_EQ(t.count(1, 0), 1u);
}

TEST(Seed, EdgelessNeedsPositiveOffsets) {
    SeedSpec s;
    s.edges.clear();
    EXPECT_THROW(seed_graph(s, {0.3, 0.5, 0.2, 0.0, 1.0}), InvalidSeed);
    EXPECT_NO_THROW(seed_graph(s, kP));
    s.nodes = 0;
    EXPECT_THROW(seed_graph(s, kP), InvalidSeed);
}

TEST(Choose, SingleNode) {
    const auto g = seed_graph({}, kP);
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        EXPECT_EQ(choose_by_in(g, 1.0, rng), 0u);
        EXPECT_EQ(choose_by_out(g, 1.0, rng), 0u);
    }
}

TEST(Choose, TwoThirdsOnTwoNodes) {
    const auto g = two_nodes();
    Rng rng(11);
    const int n = 1'000'000;
    int hits_in = 0, hits_out = 0;
    for (int t = 0; t < n; ++t) {
        hits_in += choose_by_in(g, 1.0, rng) == 1;
        hits_out += choose_by_out(g, 1.0, rng) == 0;
    }
    const double sd = std::sqrt(n * (2.0 / 3.0) * (1.0 / 3.0));
    EXPECT_LT(std::abs(hits_in - n * 2.0 / 3.0), 3 * sd);
    EXPECT_LT(std::abs(hits_out - n * 2.0 / 3.0), 3 * sd);
}

TEST(Choose, ZeroOffsetPicksOnlyPositiveDegree) {
    const auto g = two_nodes();
    Rng rng(3);
    for (int t = 0; t < 1000; ++t) {
        EXPECT_EQ(choose_by_in(g, 0.0, rng), 1u);
        EXPECT_EQ(choose_by_out(g, 0.0, rng), 0u);
    }
}

TEST(Choose, ChiSquareOnFiveNodes) {
    SeedSpec s;
    s.nodes = 5;
    s.edges = {{0, 1}, {0, 1}, {2, 1}, {3, 2}, {4, 4}, {1, 0}, {1, 3}};
    const double delta = 0.7;
    const auto g = seed_graph(s, kP);
    const double denom = double(g.edge_count()) + delta * double(g.node_count());
    for (int side = 0; side < 2; ++side) {
        std::array<double, 5> expect{};
        for (int v = 0; v < 5; ++v)
            expect[v] = ((side == 0 ? g.in_degrees()[v] : g.out_degrees()[v]) + delta) / denom;
        std::array<double, 5> obs{};
        Rng rng(2024, side);
        const int n = 1'000'000;
        for (int t = 0; t < n; ++t) obs[side == 0 ? choose_by_in(g, delta, rng) : choose_by_out(g, delta, rng)] += 1;
        double chi2 = 0.0;
        for (int v = 0; v < 5; ++v) chi2 += std::pow(obs[v] - n * expect[v], 2) / (n * expect[v]);
        const double pval = boost::math::cdf(boost::math::complement(boost::math::chi_squared(4), chi2));
        EXPECT_GT(pval, 1e-4) << "side " << side << " chi2 " << chi2;
    }
}

TEST(Step, OutcomeInvariants) {
    auto g = seed_graph({}, kP);
    Rng rng(5);
    for (int t = 0; t < 20000; ++t) {
        const auto nodes = g.node_count(), edges = g.edge_count();
        const auto o = step(g, kP, rng);
        EXPECT_EQ(g.edge_count(), edges + 1);
        switch (o.growth_case) {
            case GrowthCase::alpha:
                ASSERT_TRUE(o.new_node);
                EXPECT_EQ(o.edge.tail, *o.new_node);
                EXPECT_EQ(g.node_count(), nodes + 1);
                break;
            case GrowthCase::gamma:
                ASSERT_TRUE(o.new_node);
                EXPECT_EQ(o.edge.head, *o.new_node);
                EXPECT_EQ(g.node_count(), nodes + 1);
                break;
            case GrowthCase::beta:
                EXPECT_FALSE(o.new_node);
                EXPECT_EQ(g.node_count(), nodes);
                break;
        }
    }
    EXPECT_TRUE(g.check_invariants());
}

TEST(Step, PureAlphaAndPureBeta) {
    // step() takes the probabilities as given; validate() would reject a unit probability.
    const ModelParams alpha_only{1.0, 0.0, 0.0, 1.0, 1.0};
    auto g = seed_graph({}, kP);
    Rng rng(9);
    for (int t = 0; t < 500; ++t) EXPECT_EQ(step(g, alpha_only, rng).growth_case, GrowthCase::alpha);
    EXPECT_EQ(g.node_count(), 501u);
    EXPECT_EQ(g.edge_count(), 501u);

    const ModelParams beta_only{0.0, 1.0, 0.0, 1.0, 1.0};
    auto h = seed_graph({}, kP);
    for (int t = 0; t < 500; ++t) step(h, beta_only, rng);
    EXPECT_EQ(h.node_count(), 1u);
    EXPECT_TRUE(h.check_invariants());
}

TEST(Step, CaseFrequencies) {
    auto g = seed_graph({}, kP);
    Rng rng(77);
    const int n = 1'000'000;
    g.reserve(n, n + 1);
    std::array<double, 3> counts{};
    for (int t = 0; t < n; ++t) counts[static_cast<int>(step(g, kP, rng).growth_case)] += 1;
    const std::array<double, 3> p{kP.alpha, kP.beta, kP.gamma};
    for (int c = 0; c < 3; ++c) EXPECT_LT(std::abs(counts[c] - n * p[c]), 4 * std::sqrt(n * p[c] * (1 - p[c])));
}

TEST(Grow, NodeCountRatio) {
    auto g = seed_graph({}, kP);
    Rng rng(kDefaultSeed);
    grow(g, 1'000'000, kP, rng);
    EXPECT_EQ(g.edge_count(), 1'000'000u);
    EXPECT_NEAR(double(g.node_count()) / 1e6, 0.5, 0.005);
    EXPECT_TRUE(g.check_invariants());
}

TEST(Grow, Deterministic) {
    auto g1 = seed_graph({}, kP), g2 = seed_graph({}, kP);
    Rng r1(42), r2(42);
    grow(g1, 50000, kP, r1);
    grow(g2, 50000, kP, r2);
    EXPECT_TRUE(std::equal(g1.tails().begin(), g1.tails().end(), g2.tails().begin()));
    EXPECT_TRUE(std::equal(g1.heads().begin(), g1.heads().end(), g2.heads().begin()));
    EXPECT_EQ(g1, g2);
}

TEST(Grow, NoOpAtCurrentSize) {
    auto g = seed_graph({}, kP);
    Rng rng(1);
    grow(g, 100, kP, rng);
    const auto copy = g;
    grow(g, 100, kP, rng);
    EXPECT_EQ(g, copy);
    EXPECT_THROW(grow(g, 50, kP, rng), DomainError);
}

TEST(Grow, MemoryBudget) {
    auto g = seed_graph({}, kP);
    Rng rng(1);
    EXPECT_THROW(grow(g, 1'000'000, kP, rng, GrowthLimits{1000}), ResourceLimit);
}

TEST(Census, DegreeSums) {
    auto g = seed_graph({}, kP);
    Rng rng(8);
    grow(g, 30000, kP, rng);
    const auto t = degree_counts(g);
    std::uint64_t si = 0, so = 0;
    for (const auto& c : t.cells()) {
        si += c.in * c.count;
        so += c.out * c.count;
    }
    EXPECT_EQ(si, g.edge_count());
    EXPECT_EQ(so, g.edge_count());
    EXPECT_EQ(t.total(), g.node_count());
}
