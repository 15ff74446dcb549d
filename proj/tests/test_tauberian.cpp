#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include "htpa/tauberian.hpp"

using namespace htpa;

namespace {
const ModelParams kP{0.3, 0.5, 0.2, 1.0, 1.0};
const DerivativeMeasure& dm() {
    static const DerivativeMeasure U = build_derivative_measure(3, kP);
    return U;
}
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(Build, ValidK) {
    EXPECT_NO_THROW(build_derivative_measure(3, kP));
    EXPECT_NO_THROW(build_derivative_measure(2, kP));
    EXPECT_THROW(build_derivative_measure(1, kP), InvalidK);
    const auto s = dm().scaling();
    EXPECT_NEAR(s.gamma1, 1.125, 1e-14);
    EXPECT_NEAR(s.gamma2, 1.125 / 0.875, 1e-14);
}

TEST(Build, OriginAtom) {
    EXPECT_LT(rel(dm().atom(0, 0), 6.0 * dm().law().pmf_component(Component::one, 3, 0)), 1e-13);
}

TEST(Build, SeriesMatchesAtomSums) {
    double direct = 0.0;
    for (int i = 0; i <= 6; ++i)
        for (int j = 0; j <= 9; ++j) direct += dm().atom(i, j);
    EXPECT_LT(rel(dm().rect(6, 9), direct), 1e-9);
}

TEST(Build, LaplaceMatchesAtomSums) {
    for (auto [l1, l2] : {std::pair{0.6, 0.8}, {1.0, 0.5}}) {
        double direct = 0.0;
        for (int i = 0; i <= 120; ++i)
            for (int j = 0; j <= 120; ++j) direct += dm().atom(i, j) * std::exp(-l1 * i - l2 * j);
        EXPECT_LT(rel(dm().laplace(l1, l2), direct), 1e-9);
    }
}

TEST(Build, PartialSumsGrowWithoutPlateau) {
    double prev = 0.0, prev_inc = 0.0;
    for (int M : {100, 200, 400, 800, 1000}) {
        const double v = dm().rect(M, M);
        EXPECT_GT(v, prev);
        if (M <= 800) {
            EXPECT_GT(v - prev, prev_inc);
            prev_inc = v - prev;
        }
        prev = v;
    }
}

TEST(MeasureScaling, Trivial) {
    const AtomTable single({{{0, 0}, 2.5}});
    const ScalingFunctions id{1.0, 1.0};
    for (double t : {1.0, 10.0, 1000.0}) EXPECT_DOUBLE_EQ(measure_scaling(single, id, t, 0.3, 4.0), 2.5 / t);
    const AtomTable grid({{{0, 0}, 1.0}, {{1, 2}, 2.0}, {{3, 1}, 4.0}});
    EXPECT_DOUBLE_EQ(measure_scaling(grid, id, 1.0, 3.0, 2.0), 7.0);
    EXPECT_DOUBLE_EQ(measure_scaling(grid, id, 1.0, 2.0, 2.0), 3.0);
}

TEST(MeasureScaling, TruncatedTableRefusesLargeRectangles) {
    const AtomTable t({{{0, 0}, 1.0}}, std::pair<std::uint64_t, std::uint64_t>{10, 10});
    EXPECT_NO_THROW(t.rect(10, 10));
    EXPECT_THROW(t.rect(11, 3), SupportExceeded);
    EXPECT_THROW(t.laplace(1e-3, 1e-3), SupportExceeded);
}

TEST(MeasureScaling, ConvergesToLimitRectangle) {
    const auto r = measure_check(dm(), 1.0, 1.0, {1e2, 1e3, 1e4});
    EXPECT_TRUE(r.monotone);
    EXPECT_LT(r.rows.back().rel_error, 0.10);
    EXPECT_TRUE(r.pass);
}

TEST(TransformScaling, Trivial) {
    const ScalingFunctions id{1.0, 1.0};
    const AtomTable origin({{{0, 0}, 3.0}, {{5, 5}, 1.0}});
    EXPECT_NEAR(transform_scaling(origin, id, 1.0, 200.0, 200.0), 3.0, 1e-12);
    const AtomTable one({{{1, 1}, 2.0}});
    for (double t : {1.0, 4.0, 50.0})
        EXPECT_NEAR(transform_scaling(one, id, t, 0.7, 1.1), 2.0 / t * std::exp(-(0.7 + 1.1) / t), 1e-15);
}

TEST(Uhat, RhsPositiveAndMonotone) {
    double prev = INFINITY;
    for (double l2 : {1.0, 0.1, 0.01, 1e-3}) {
        const double v = uhat_limit_rhs(kP, 3, 1.0, l2);
        EXPECT_GT(v, 0.0);
        EXPECT_GT(v, prev == INFINITY ? 0.0 : prev);
        prev = v;
    }
    EXPECT_THROW(uhat_limit_rhs(kP, 1, 1.0, 1.0), InvalidK);
}

TEST(Uhat, LimitTransformOfDensity) {
    const DerivativeLimit L(kP, 3);
    const double l1 = 1.0, l2 = 1.0;
    // int e^{-l.v} V(dv) = l1 l2 int int e^{-l.v} V([0,v1]x[0,v2]) dv.
    boost::math::quadrature::exp_sinh<double> q;
    const double v = q.integrate(
        [&](double x) {
            return q.integrate([&](double y) { return std::exp(-l1 * x - l2 * y) * L.rect(x, y); }, 0.0, INFINITY, 1e-7);
        },
        0.0, INFINITY, 1e-7);
    EXPECT_LT(rel(l1 * l2 * v, L.laplace(l1, l2)), 1e-6);
}

TEST(Uhat, SeriesApproachesLimitModerateH) {
    const auto r = uhat_check(dm(), 1.0, 1.0, {1e2, 1e3, 1e4});
    EXPECT_TRUE(r.monotone);
    EXPECT_LT(r.rows.back().rel_error, 0.05);
}

TEST(Consistency, AbelianAndTauberianDirections) {
    // When the measure scaling has settled over the top decade, so has the
    // transform scaling, and both sit near their limits.
    const auto m = measure_check(dm(), 1.0, 1.0, {1e3, 1e4});
    const auto u = uhat_check(dm(), 1.0, 1.0, {1e3, 1e4});
    ASSERT_LT(m.last_two_rel_change, 0.08);
    EXPECT_LT(u.last_two_rel_change, 3 * m.last_two_rel_change);
    ASSERT_LT(u.rows.back().rel_error, 0.05);
    EXPECT_LT(m.rows.back().rel_error, 0.10);
}

TEST(Truncation, FiniteSupportVanishes) {
    const AtomTable t({{{0, 0}, 1.0}, {{3, 2}, 2.0}});
    const ScalingFunctions id{1.0, 1.0};
    const auto rows = truncation_condition(t, id, 1.0, 1.0, {0.0, 4.0}, {1.0});
    EXPECT_NEAR(rows[0].value, transform_scaling(t, id, 1.0, 1.0, 1.0), 1e-15);
    EXPECT_EQ(rows[1].value, 0.0);
}

TEST(Truncation, DerivativeMeasureDecays) {
    const auto rows = truncation_condition(dm(), dm().scaling(), 1.0, 1.0, {0.0, 8.0}, {1e3, 1e4});
    for (const auto& r : rows) {
        if (r.y == 0.0) {
            EXPECT_NEAR(r.value, transform_scaling(dm(), dm().scaling(), r.t, 1.0, 1.0), 1e-12 * r.value);
        }
        if (r.y == 8.0) {
            EXPECT_LT(r.ratio, 0.01);
        }
    }
}

TEST(Marginal, CountingMeasure) {
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> atoms;
    for (std::uint64_t i = 0; i <= 200000; ++i) atoms[{i, 0}] = 1.0;
    const AtomTable line(std::move(atoms));
    const auto rows = marginal_condition(line, 1, {1.0, 1.0}, {0.5, 1.0, 3.0}, {10.0, 1e3, 5e4});
    for (const auto& r : rows)
        if (r.t == 5e4) {
            EXPECT_NEAR(r.value, r.x, 1e-4);
        }
    EXPECT_NEAR(rows[1].target, 1.0, 0.0);
}

TEST(Marginal, DerivativeMeasureAxisOne) {
    const auto rows =
        marginal_condition(dm(), 1, dm().scaling(), {0.5, 1.0, 2.0}, {1e3, 1e4, 1e5}, dm().marginal_constant());
    for (const auto& r : rows)
        if (r.t == 1e5) {
            EXPECT_NEAR(r.ratio, 1.0, 0.10);
        }
    const DerivativeLimit L(kP, 3);
    EXPECT_LT(rel(dm().marginal_constant(), L.marginal_in(1.0)), 1e-12);
    EXPECT_LT(rel(L.rect(1.7, 1e12), L.marginal_in(1.7)), 1e-9);
}

TEST(Marginal, AxisTwoDivergesAtCanonicalParameters) {
    EXPECT_LE(dm().axis2_decay(), 0.0);
    EXPECT_THROW(dm().marginal(2, 100.0), MarginalDiverges);
}
