#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "htpa/limit_dist.hpp"
#include "htpa/tail_measure.hpp"

using namespace htpa;

namespace {
const ModelParams kP{0.3, 0.5, 0.2, 1.0, 1.0};
const TailMeasure& tail() {
    static const TailMeasure t(kP);
    return t;
}
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(Density, Homogeneity) {
    const auto d = tail().constants();
    for (auto comp : {TailComponent::one, TailComponent::two, TailComponent::combined})
        for (double x : {0.1, 0.7, 2.0, 9.0})
            for (double y : {0.2, 1.0, 5.0})
                for (double c : {0.1, 0.5, 3.0, 10.0}) {
                    const double lhs =
                        tail().density(comp, std::pow(c, d.c1) * x, std::pow(c, d.c2) * y) * std::pow(c, 1 + d.c1 + d.c2);
                    EXPECT_LT(rel(lhs, tail().density(comp, x, y)), 1e-8);
                }
}

TEST(Density, SwapSymmetryWhenBalanced) {
    const TailMeasure t({0.25, 0.5, 0.25, 0.8, 0.8});
    for (double x : {0.3, 1.0, 4.0})
        for (double y : {0.5, 2.0, 7.0})
            EXPECT_LT(rel(t.density(TailComponent::one, x, y), t.density(TailComponent::two, y, x)), 1e-10);
}

TEST(Density, Positive) {
    for (double x : {1e-3, 0.5, 50.0})
        for (double y : {1e-3, 0.5, 50.0}) EXPECT_GT(tail().density(TailComponent::combined, x, y), 0.0);
    EXPECT_THROW(tail().density(TailComponent::one, 0.0, 1.0), DomainError);
}

TEST(Density, MatchesDirectIntegral) {
    // f1 as printed, integrated directly in z.
    const double c1 = 8.0 / 15.0, a = 7.0 / 8.0;
    const double x = 1.3, y = 0.6;
    auto g = [&](double z) {
        return std::pow(z, -(2 + 1 / c1 + 1 + a)) * std::exp(-(x / z + y / std::pow(z, a)));
    };
    const double I = integrate(g, 1e-3, 1.0).value + integrate([&](double t) { return g(1.0 / t) / (t * t); }, 0.0, 1.0).value;
    const double f1 = I * x * std::pow(y, 0.0) / (c1 * std::tgamma(2.0) * std::tgamma(1.0));
    EXPECT_LT(rel(tail().density(TailComponent::one, x, y), f1), 1e-9);
}

TEST(RectMass, IncompleteGammaMomentIdentity) {
    for (double r : {0.5, 1.0, 2.0, 3.5})
        for (double s : {0.7, 1.875, 2.5}) {
            auto g = [&](double t) { return std::pow(t, s - 1) * boost::math::gamma_q(r, t); };
            boost::math::quadrature::exp_sinh<double> q;
            const double v = q.integrate(g, 0.0, INFINITY, 1e-12);
            EXPECT_LT(rel(v, std::tgamma(r + s) / (s * std::tgamma(r))), 1e-9);
        }
}

TEST(RectMass, ClosedFormMarginal) {
    for (double x : {0.5, 1.0, 2.0, 5.0}) {
        EXPECT_LT(rel(tail().rect_mass(TailComponent::one, x, 0.0), tail().marginal_in_closed(Component::one, x)), 1e-8);
        EXPECT_LT(rel(tail().rect_mass(TailComponent::two, x, 0.0), tail().marginal_in_closed(Component::two, x)), 1e-8);
        EXPECT_LT(rel(tail().rect_mass(TailComponent::one, 0.0, x), tail().marginal_out_closed(Component::one, x)), 1e-8);
    }
    EXPECT_LT(rel(tail().marginal_in_closed(Component::one, 1.0), std::tgamma(2.0 + 15.0 / 8.0) / std::tgamma(2.0)), 1e-14);
}

TEST(RectMass, Scaling) {
    const auto d = tail().constants();
    for (auto comp : {TailComponent::one, TailComponent::two, TailComponent::combined})
        for (double c : {0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0})
            for (auto [x, y] : {std::pair{1.0, 1.0}, {0.3, 2.0}, {4.0, 0.5}, {0.0, 1.5}}) {
                const double lhs = tail().rect_mass(comp, std::pow(c, d.c1) * x, std::pow(c, d.c2) * y);
                EXPECT_LT(rel(lhs, tail().rect_mass(comp, x, y) / c), 1e-8);
            }
}

TEST(RectMass, MatchesTwoDimensionalQuadrature) {
    for (auto j : {Component::one, Component::two}) {
        const double v1 = tail().rect_mass_component(j, 1.0, 1.0);
        const double v2 = tail().rect_mass_2d(j, 1.0, 1.0);
        EXPECT_NEAR(v1, v2, 1e-6);
    }
}

TEST(RectMass, MixedPartialIsDensity) {
    for (auto comp : {TailComponent::one, TailComponent::two})
        for (auto [x, y] : {std::pair{1.0, 1.0}, {0.5, 2.0}, {3.0, 0.7}}) {
            const double h = 1e-3 * x, k = 1e-3 * y;
            auto R = [&](double u, double v) { return tail().rect_mass(comp, u, v); };
            const double d2 = (R(x + h, y + k) - R(x + h, y - k) - R(x - h, y + k) + R(x - h, y - k)) / (4 * h * k);
            EXPECT_LT(rel(d2, tail().density(comp, x, y)), 1e-4);
        }
}

TEST(RectMass, CombinedIsLinear) {
    const double pb = tail().branch_probability();
    for (auto [x, y] : {std::pair{1.0, 1.0}, {0.2, 3.0}}) {
        const double v = tail().rect_mass(TailComponent::combined, x, y);
        EXPECT_DOUBLE_EQ(v, pb * tail().rect_mass(TailComponent::one, x, y) +
                                (1 - pb) * tail().rect_mass(TailComponent::two, x, y));
    }
    EXPECT_THROW(tail().rect_mass(TailComponent::one, 0.0, 0.0), DomainError);
}

TEST(Standardize, Basics) {
    DerivedConstants d = derive({0.25, 0.5, 0.25, 0.8, 0.8});
    const std::vector<std::pair<double, double>> pts{{4, 1}, {9, 2}};
    EXPECT_EQ(standardize(std::span<const std::pair<double, double>>(pts), d).points, pts);
    d.alpha_in = 1.5;  // gamma_in = 0.5
    d.alpha_out = 2.0; // gamma_out = 1
    const auto s = standardize(std::span<const std::pair<double, double>>(pts), d);
    EXPECT_DOUBLE_EQ(s.c, 0.5);
    EXPECT_DOUBLE_EQ(s.points[0].first, 2.0);
    EXPECT_DOUBLE_EQ(s.points[0].second, 1.0);
}

TEST(Standardize, PreservesRanks) {
    const auto d = derive(kP);
    const LimitLaw law(kP);
    const auto draws = law.sample(2000, 4);
    const auto s = standardize(std::span<const DegreePair>(draws), d);
    for (std::size_t t = 1; t < draws.size(); ++t) {
        EXPECT_EQ(draws[t].in < draws[t - 1].in, s.points[t].first < s.points[t - 1].first);
        EXPECT_EQ(draws[t].in == draws[t - 1].in, s.points[t].first == s.points[t - 1].first);
    }
}

TEST(Angular, DiagonalAndAxes) {
    StandardizedSample diag, axes;
    for (int t = 1; t <= 100; ++t) {
        diag.points.emplace_back(t, t);
        axes.points.emplace_back(t % 2 ? double(t) : 0.0, t % 2 ? 0.0 : double(t));
    }
    const auto h = angular_histogram(diag, 0.5, 4);
    EXPECT_DOUBLE_EQ(h.mass[2], 1.0);
    const auto g = angular_histogram(axes, 0.5, 5);
    EXPECT_DOUBLE_EQ(g.mass.front() + g.mass.back(), 1.0);
    EXPECT_GT(g.mass.front(), 0.0);
    EXPECT_GT(g.mass.back(), 0.0);
}

TEST(Angular, Errors) {
    StandardizedSample s;
    for (int t = 1; t <= 100; ++t) s.points.emplace_back(t, t);
    EXPECT_THROW(angular_histogram(s, 90.0 * 2, 4), InsufficientExceedances);
    EXPECT_THROW(angular_histogram(s, 1.0, 1), DomainError);
    EXPECT_THROW(angular_histogram(s, 0.0, 4), DomainError);
}

TEST(Angular, LimitSampleIsInteriorPositive) {
    const LimitLaw law(kP);
    const auto d = derive(kP);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto draws = law.sample(1'000'000, seed);
        const auto s = standardize(std::span<const DegreePair>(draws), d);
        const auto h = angular_histogram(s, radius_quantile(s, 0.999), 10);
        for (std::size_t b = 1; b + 1 < h.mass.size(); ++b) EXPECT_GT(h.mass[b], 0.0) << "seed " << seed << " bin " << b;
    }
}
