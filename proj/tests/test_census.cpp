#include <gtest/gtest.h>

#include <cmath>

#include "htpa/census.hpp"

using namespace htpa;

TEST(EmpiricalPmf, SingleCell) {
    const auto p = empirical_pmf(JointCountTable({{1, 1, 1}}));
    EXPECT_DOUBLE_EQ(p.mass(1, 1), 1.0);
}

TEST(EmpiricalPmf, TwoCells) {
    const auto p = empirical_pmf(JointCountTable({{0, 1, 1}, {1, 0, 1}}));
    EXPECT_DOUBLE_EQ(p.mass(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(p.mass(1, 0), 0.5);
}

TEST(EmpiricalPmf, Normalized) {
    const auto p = empirical_pmf(JointCountTable({{0, 1, 7}, {1, 0, 3}, {4, 9, 11}, {2, 2, 1}}));
    EXPECT_NEAR(p.total(), 1.0, 1e-12);
}

TEST(EmpiricalPmf, EmptyThrows) { EXPECT_THROW(empirical_pmf(JointCountTable{}), EmptyInput); }

TEST(Hill, HandExample) {
    const std::vector<double> x{8, 4, 2, 1};
    const auto f = hill_estimate(x, 2);
    EXPECT_NEAR(f.index_estimate, 1.0 / (1.5 * std::log(2.0)), 1e-12);
    EXPECT_NEAR(f.index_estimate, 0.9618, 5e-5);
    EXPECT_EQ(f.k_used, 2u);
    EXPECT_NEAR(f.standard_error, f.index_estimate / std::sqrt(2.0), 1e-12);
}

TEST(Hill, ParetoQuantileGrid) {
    const double alpha = 1.7;
    const int n = 100000;
    std::vector<double> x(n);
    for (int m = 1; m <= n; ++m) x[m - 1] = std::pow(double(m) / (n + 1), -1.0 / alpha);
    const auto f = hill_estimate(x, 1000);
    EXPECT_NEAR(f.index_estimate, alpha, 0.05 * alpha);
}

TEST(Hill, ScaleInvariant) {
    std::vector<double> x{3, 17, 5, 9, 120, 44, 2, 8, 61, 13};
    const double e1 = hill_estimate(x, 4).index_estimate;
    for (double& v : x) v *= 37.5;
    EXPECT_NEAR(hill_estimate(x, 4).index_estimate, e1, 1e-12);
}

TEST(Hill, Errors) {
    const std::vector<double> c(10, 3.0);
    EXPECT_THROW(hill_estimate(c, 3), DegenerateTailSample);
    EXPECT_THROW(hill_estimate(std::vector<double>{1, 2, 3}, 3), InsufficientData);
    EXPECT_THROW(hill_estimate(std::vector<double>{1, 2, 0, 4}, 2), NonPositiveSample);
}

TEST(LogLog, ExactPowerLaw) {
    std::map<std::uint64_t, double> m;
    for (std::uint64_t i = 10; i <= 100; ++i) m[i] = std::pow(double(i), -3.0);
    EXPECT_NEAR(loglog_slope(m, 10).index_estimate, 3.0, 1e-9);
}

TEST(LogLog, SlowlyVaryingPerturbation) {
    std::map<std::uint64_t, double> m;
    for (std::uint64_t i = 1; i <= 5000; ++i) m[i] = 0.3 * std::pow(double(i), -2.5) * (1.0 + 1.0 / double(i));
    EXPECT_NEAR(loglog_slope(m, 50).index_estimate, 2.5, 0.05);
}

TEST(LogLog, TooFewPoints) {
    std::map<std::uint64_t, double> m{{10, 0.1}, {11, 0.05}, {12, 0.02}};
    EXPECT_THROW(loglog_slope(m, 1), InsufficientData);
}

TEST(Compare, IdenticalAndDisjoint) {
    const JointPMF p({{1, 1, 1.0}}), q({{2, 2, 1.0}});
    const Region r{0, 3, 0, 3};
    EXPECT_DOUBLE_EQ(compare_pmf(p, p, r).total_variation, 0.0);
    const auto c = compare_pmf(p, q, r);
    EXPECT_DOUBLE_EQ(c.total_variation, 1.0);
    EXPECT_DOUBLE_EQ(c.max_abs_diff, 1.0);
    EXPECT_EQ(c.cells.size(), 16u);
}

TEST(Census, SimulatedMeanDegree) {
    const ModelParams p{0.3, 0.5, 0.2, 1.0, 1.0};
    auto g = seed_graph({}, p);
    Rng rng(123);
    grow(g, 1'000'000, p, rng);
    const auto pmf = empirical_pmf(degree_counts(g));
    double mi = 0.0, mo = 0.0;
    for (const auto& [i, m] : pmf.marginal_in()) mi += double(i) * m;
    for (const auto& [j, m] : pmf.marginal_out()) mo += double(j) * m;
    EXPECT_NEAR(mi, 1.0 / (1.0 - p.beta), 0.02 * 2.0);
    EXPECT_NEAR(mo, 1.0 / (1.0 - p.beta), 0.02 * 2.0);
}
