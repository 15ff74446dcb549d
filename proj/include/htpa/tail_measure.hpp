#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "htpa/error.hpp"
#include "htpa/limit_dist.hpp"
#include "htpa/params.hpp"
#include "htpa/quadrature.hpp"

namespace htpa {

enum class TailComponent { one = 1, two = 2, combined = 3 };

/// Limit measures V1, V2 of the scaled pairs (X_j, Y_j) and their mixture
/// p_B V1 + (1 - p_B) V2, the tail measure of (I, O).
///
/// Every V_j is a Pareto mixture of products of gamma laws:
///   f_j(x, y) = c1^-1 int_0^inf z^(-1-1/c1) g(x; r_in, z) g(y; r_out, z^a) dz
/// with g(.; r, s) the Gamma(r) density of scale s.
class TailMeasure {
public:
    explicit TailMeasure(const ModelParams& params, QuadratureSpec quad = {})
        : params_(validate(params)), d_(derive(params_)), p_b_(htpa::branch_probability(params_)), quad_(quad) {
        require_positive_offsets(params_);
    }

    const DerivedConstants& constants() const noexcept { return d_; }
    double branch_probability() const noexcept { return p_b_; }

    ComponentShape shape(Component j) const {
        return j == Component::one ? ComponentShape{params_.delta_in + 1.0, params_.delta_out}
                                   : ComponentShape{params_.delta_in, params_.delta_out + 1.0};
    }

    double density(TailComponent c, double x, double y) const {
        if (!(x > 0.0) || !(y > 0.0)) throw DomainError("tail density needs x > 0 and y > 0");
        return mix(c, [&](Component j) { return std::exp(log_density(j, x, y)); });
    }

    /// log f_j(x, y), with the z-integral taken in s = log z.
    double log_density(Component j, double x, double y) const {
        const auto [r_in, r_out] = shape(j);
        const double a = d_.a;
        const double p = 1.0 / d_.c1 + r_in + a * r_out;
        auto L = [&](double s) { return -p * s - x * std::exp(-s) - y * std::exp(-a * s); };
        const double guess = std::max(std::log(x), std::log(y) / a);
        const auto res = integrate_log_concave(L, -INFINITY, INFINITY, guess, quad_);
        return -std::log(d_.c1) - std::lgamma(r_in) - std::lgamma(r_out) + (r_in - 1.0) * std::log(x) +
               (r_out - 1.0) * std::log(y) + res.log_value;
    }

    /// V([x_lo, inf) x [y_lo, inf)) through
    ///   V_j = c1^-1 int_0^inf z^(-1-1/c1) Q(r_in, x_lo/z) Q(r_out, y_lo/z^a) dz.
    double rect_mass(TailComponent c, double x_lo, double y_lo) const {
        if (!(x_lo >= 0.0) || !(y_lo >= 0.0) || (x_lo == 0.0 && y_lo == 0.0))
            throw DomainError("rectangle corner must be nonnegative and not the origin");
        return mix(c, [&](Component j) { return rect_mass_component(j, x_lo, y_lo); });
    }

    double rect_mass_component(Component j, double x_lo, double y_lo) const {
        const auto [r_in, r_out] = shape(j);
        const double a = d_.a, c1 = d_.c1;
        using boost::math::gamma_q;
        // In s = log z the integrand is e^(-s/c1) Q(r_in, x e^-s) Q(r_out, y e^-as):
        // flat below the corner scale and decaying like e^(-s/c1) above it.
        double s0 = -INFINITY;
        if (x_lo > 0.0) s0 = std::log(x_lo);
        if (y_lo > 0.0) s0 = std::max(s0, std::log(y_lo) / a);
        const double t_far = 60.0 + 4.0 * std::max(r_in, r_out);
        double s_lo = s0;
        if (x_lo > 0.0) s_lo = std::min(s_lo, std::log(x_lo / t_far));
        if (y_lo > 0.0) s_lo = std::min(s_lo, std::log(y_lo / t_far) / a);
        const double s_hi = s0 + 46.0 * c1;
        auto f = [&](double s) {
            const double qx = x_lo > 0.0 ? gamma_q(r_in, x_lo * std::exp(-s)) : 1.0;
            const double qy = y_lo > 0.0 ? gamma_q(r_out, y_lo * std::exp(-a * s)) : 1.0;
            return std::exp(-(s - s0) / c1) * qx * qy;
        };
        double v = integrate(f, s_lo, s0, quad_).value + integrate(f, s0, s_hi, quad_).value;
        // Remaining tail above s_hi, where both Q factors are within rounding of 1.
        v += c1 * std::exp(-(s_hi - s0) / c1);
        return std::exp(-s0 / c1) * v / c1;
    }

    /// V_j([x_lo, inf) x [0, inf)) = x_lo^(-1/c1) Gamma(r_in + 1/c1) / Gamma(r_in).
    double marginal_in_closed(Component j, double x_lo) const {
        const double r = shape(j).r_in, c1 = d_.c1;
        return std::pow(x_lo, -1.0 / c1) * std::exp(std::lgamma(r + 1.0 / c1) - std::lgamma(r));
    }

    /// V_j([0, inf) x [y_lo, inf)) = y_lo^(-1/c2) Gamma(r_out + 1/c2) / Gamma(r_out).
    double marginal_out_closed(Component j, double y_lo) const {
        const double r = shape(j).r_out, c2 = d_.c2;
        return std::pow(y_lo, -1.0 / c2) * std::exp(std::lgamma(r + 1.0 / c2) - std::lgamma(r));
    }

    /// Rectangle mass by nested exp-sinh quadrature of the density; slow,
    /// used to validate rect_mass.
    double rect_mass_2d(Component j, double x_lo, double y_lo, double rel_tol = 1e-10) const {
        boost::math::quadrature::exp_sinh<double> q;
        auto inner = [&](double x) {
            return q.integrate([&](double y) { return y > 0.0 ? std::exp(log_density(j, x, y)) : 0.0; }, y_lo,
                               INFINITY, rel_tol);
        };
        return q.integrate([&](double x) { return x > 0.0 ? inner(x) : 0.0; }, x_lo, INFINITY, rel_tol);
    }

private:
    template <class F>
    double mix(TailComponent c, F&& f) const {
        switch (c) {
            case TailComponent::one:
                return f(Component::one);
            case TailComponent::two:
                return f(Component::two);
            case TailComponent::combined:
                break;
        }
        return p_b_ * f(Component::one) + (1.0 - p_b_) * f(Component::two);
    }

    ModelParams params_;
    DerivedConstants d_;
    double p_b_;
    QuadratureSpec quad_;
};

/// Pairs mapped to (x^c, y) with c = gamma_in / gamma_out, which puts both
/// coordinates on the out-degree scale.
struct StandardizedSample {
    std::vector<std::pair<double, double>> points;
    double c = 1.0;
};

inline StandardizedSample standardize(std::span<const std::pair<double, double>> pairs, const DerivedConstants& d) {
    StandardizedSample out;
    out.c = d.gamma_in() / d.gamma_out();
    out.points.reserve(pairs.size());
    for (const auto& [x, y] : pairs) {
        if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("standardize needs nonnegative pairs");
        out.points.emplace_back(out.c == 1.0 ? x : std::pow(x, out.c), y);
    }
    return out;
}

inline StandardizedSample standardize(std::span<const DegreePair> pairs, const DerivedConstants& d) {
    std::vector<std::pair<double, double>> v;
    v.reserve(pairs.size());
    for (const auto& p : pairs) v.emplace_back(double(p.in), double(p.out));
    return standardize(std::span<const std::pair<double, double>>(v), d);
}

/// q-quantile of the L1 radius u + v.
inline double radius_quantile(const StandardizedSample& s, double q) {
    if (s.points.empty()) throw EmptyInput("no points");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::vector<double> r;
    r.reserve(s.points.size());
    for (const auto& [u, v] : s.points) r.push_back(u + v);
    const auto k = static_cast<std::size_t>(std::floor(q * double(r.size() - 1)));
    std::nth_element(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(k), r.end());
    return r[k];
}

struct AngularHistogram {
    std::vector<double> edges;  // bins + 1 edges on [0, 1]
    std::vector<double> mass;   // sums to 1
    std::size_t exceedances = 0;
    double threshold = 0.0;
};

inline constexpr std::size_t kMinExceedances = 50;

/// Histogram of the L1 angle v / (u + v) over points with u + v > threshold.
inline AngularHistogram angular_histogram(const StandardizedSample& s, double radius_threshold, std::size_t bins) {
    if (bins < 2) throw DomainError("angular histogram needs at least 2 bins");
    if (!(radius_threshold > 0.0)) throw DomainError("radius threshold must be positive");
    AngularHistogram h;
    h.threshold = radius_threshold;
    h.mass.assign(bins, 0.0);
    for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(double(b) / double(bins));
    for (const auto& [u, v] : s.points) {
        const double r = u + v;
        if (!(r > radius_threshold)) continue;
        const auto b = std::min(bins - 1, static_cast<std::size_t>(v / r * double(bins)));
        h.mass[b] += 1.0;
        ++h.exceedances;
    }
    if (h.exceedances < kMinExceedances)
        throw InsufficientExceedances("only " + std::to_string(h.exceedances) + " points above the threshold");
    for (double& m : h.mass) m /= double(h.exceedances);
    return h;
}

}  // namespace htpa
