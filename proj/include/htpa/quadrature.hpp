#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "htpa/error.hpp"

namespace htpa {

/// Accuracy controls shared by every one-dimensional integral in the library.
struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    unsigned max_subdivisions = 10000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
};

/// Adaptive Gauss-Kronrod (21 points) on a finite interval.
///
/// Throws QuadratureFailure when the error estimate exceeds
/// max(abs_tol, rel_tol * L1) once the subdivision budget is spent.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec = {}) {
    if (a == b) return {};
    unsigned depth = 1;
    while ((1u << depth) < spec.max_subdivisions && depth < 30) ++depth;
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        f, a, b, depth, spec.rel_tol, &error, &l1);
    if (!std::isfinite(value) || !(error <= std::max(spec.abs_tol, spec.rel_tol * l1)))
        throw QuadratureFailure("quadrature on [" + std::to_string(a) + ", " + std::to_string(b) +
                                "] did not converge: error estimate " + std::to_string(error));
    return {value, error};
}

/// Result of integrating exp(L(t)); the value is carried as a logarithm.
struct LogQuadratureResult {
    double log_value = -std::numeric_limits<double>::infinity();
    double rel_error = 0.0;
    double peak = 0.0;  // location of the maximum of L
};

namespace detail {

/// Maximizer of a concave function on [lo, hi] (either end may be infinite).
template <class L>
std::pair<double, double> concave_argmax(L&& log_f, double lo, double hi, double guess) {
    constexpr double ninf = -std::numeric_limits<double>::infinity();
    double t0 = std::clamp(guess, lo, hi);
    double v0 = log_f(t0);
    if (v0 == ninf || std::isnan(v0)) {
        // Walk outward until the function is finite somewhere.
        bool found = false;
        for (double d = 0.5; d < 4096.0 && !found; d *= 2.0) {
            for (double cand : {t0 - d, t0 + d}) {
                if (cand < lo || cand > hi) continue;
                double v = log_f(cand);
                if (v > ninf) {
                    t0 = cand;
                    v0 = v;
                    found = true;
                    break;
                }
            }
        }
        if (!found) return {t0, ninf};
    }
    // Find the uphill direction, then walk with doubling steps until the
    // function stops increasing; [behind, next] then brackets the maximum.
    double dir = 0.0;
    for (double s : {1.0, -1.0}) {
        const double t = std::clamp(t0 + s * 1e-3, lo, hi);
        if (t != t0 && log_f(t) > v0) {
            dir = s;
            break;
        }
    }
    if (dir == 0.0) return {t0, v0};
    double best = t0, fbest = v0, behind = t0, next = t0;
    double step = 0.25;
    for (int it = 0;; ++it) {
        next = std::clamp(best + dir * step, lo, hi);
        if (next == best || it > 200) return {best, fbest};
        const double fn = log_f(next);
        if (!(fn > fbest)) break;
        behind = best;
        best = next;
        fbest = fn;
        step *= 2.0;
    }
    double a = std::min(behind, next), b = std::max(behind, next);
    // Golden section.
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = log_f(x1), f2 = log_f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-7 * (1.0 + std::abs(a)); ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = log_f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = log_f(x1);
        }
    }
    const double t = 0.5 * (a + b);
    return {t, log_f(t)};
}

}  // namespace detail

/// Integral of exp(L(t)) over [lo, hi] for a concave L.
///
/// The maximum of L is located first; the integration range is then cut
/// where L has dropped 46 nats below the peak, and each side is integrated
/// adaptively with the peak factored out. Suitable for the log-scale
/// mixture integrals used throughout the library, whose integrands span
/// hundreds of orders of magnitude.
template <class L>
LogQuadratureResult integrate_log_concave(L&& log_f, double lo, double hi, double guess,
                                          const QuadratureSpec& spec = {}) {
    constexpr double kDrop = 46.0;
    LogQuadratureResult out;
    const auto [peak, fmax] = detail::concave_argmax(log_f, lo, hi, guess);
    out.peak = peak;
    if (!(fmax > -std::numeric_limits<double>::infinity())) return out;

    auto cut = [&](double sign, double bound) {
        double d = 1.0;
        for (int it = 0; it < 80; ++it) {
            const double t = peak + sign * d;
            if ((sign < 0 && t <= bound) || (sign > 0 && t >= bound)) return bound;
            if (!(log_f(t) > fmax - kDrop)) return t;
            d *= 2.0;
        }
        throw QuadratureFailure("log-scale integrand does not decay");
    };
    const double left = cut(-1.0, lo);
    const double right = cut(1.0, hi);
    auto g = [&](double t) {
        const double v = log_f(t) - fmax;
        return v > -745.0 ? std::exp(v) : 0.0;
    };
    QuadratureResult lpart = integrate(g, left, peak, spec);
    QuadratureResult rpart = integrate(g, peak, right, spec);
    const double total = lpart.value + rpart.value;
    out.log_value = fmax + std::log(total);
    out.rel_error = (lpart.error + rpart.error) / total;
    return out;
}

/// Fixed composite Gauss-Legendre rule: nodes and weights on [a, b] split
/// into equal panels no wider than `panel_width`, 16 points per panel.
struct NodeRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const noexcept { return nodes.size(); }
};

inline NodeRule composite_gauss_legendre(double a, double b, double panel_width) {
    using Gauss = boost::math::quadrature::gauss<double, 16>;
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / panel_width)));
    const double h = (b - a) / static_cast<double>(panels);
    NodeRule rule;
    rule.nodes.reserve(panels * 16);
    rule.weights.reserve(panels * 16);
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = a + (static_cast<double>(p) + 0.5) * h;
        const double half = 0.5 * h;
        for (std::size_t i = 0; i < x.size(); ++i) {
            rule.nodes.push_back(mid - half * x[i]);
            rule.weights.push_back(half * w[i]);
            if (x[i] != 0.0) {
                rule.nodes.push_back(mid + half * x[i]);
                rule.weights.push_back(half * w[i]);
            }
        }
    }
    return rule;
}

}  // namespace htpa
