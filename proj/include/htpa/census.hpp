#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "htpa/error.hpp"
#include "htpa/graph.hpp"
#include "htpa/tables.hpp"

namespace htpa {

/// Empirical joint law N_ij / N from a degree census.
inline JointPMF empirical_pmf(const JointCountTable& counts) {
    if (counts.empty()) throw EmptyInput("degree census is empty");
    const double total = static_cast<double>(counts.total());
    std::vector<MassCell> cells;
    cells.reserve(counts.cells().size());
    for (const auto& c : counts.cells()) cells.push_back({c.in, c.out, static_cast<double>(c.count) / total});
    return JointPMF(std::move(cells));
}

struct TailFit {
    double index_estimate = 0.0;
    std::size_t k_used = 0;
    double standard_error = 0.0;
};

/// Hill estimator of the tail index from the k largest observations:
/// the reciprocal of (1/k) sum_{m<=k} log(X_(m) / X_(k+1)) with X_(1) >= X_(2) >= ...
/// Ties are used as they are.
inline TailFit hill_estimate(std::span<const double> samples, std::size_t k) {
    if (k < 2) throw InsufficientData("Hill estimator needs k >= 2");
    if (k + 1 > samples.size()) throw InsufficientData("Hill estimator needs k + 1 <= sample count");
    for (double x : samples)
        if (!(x > 0.0)) throw NonPositiveSample("Hill estimator needs positive samples");
    std::vector<double> top(samples.begin(), samples.end());
    std::nth_element(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k), top.end(), std::greater<>());
    const double threshold = top[k];
    double sum = 0.0;
    for (std::size_t m = 0; m < k; ++m) sum += std::log(top[m] / threshold);
    const double mean = sum / static_cast<double>(k);
    if (!(mean > 0.0)) throw DegenerateTailSample("top order statistics are all equal; tail index undefined");
    const double est = 1.0 / mean;
    return {est, k, est / std::sqrt(static_cast<double>(k))};
}

/// Default number of order statistics: floor(sqrt(sample count)).
inline std::size_t default_hill_k(std::size_t n) {
    return static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
}

/// Least-squares slope of log p_i against log i over the points with
/// i_min <= i <= i_max and positive mass; the index is minus the slope.
inline TailFit loglog_slope(const std::map<std::uint64_t, double>& marginal, std::uint64_t i_min,
                            std::optional<std::uint64_t> i_max = std::nullopt) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& [i, p] : marginal) {
        if (i < i_min || i == 0 || !(p > 0.0)) continue;
        if (i_max && i > *i_max) break;
        pts.emplace_back(std::log(static_cast<double>(i)), std::log(p));
    }
    if (pts.size() < 5) throw InsufficientData("log-log fit needs at least 5 support points");
    const double n = static_cast<double>(pts.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    const double slope = sxy / sxx;
    double rss = 0.0;
    for (const auto& [x, y] : pts) {
        const double r = y - my - slope * (x - mx);
        rss += r * r;
    }
    const double se = std::sqrt(rss / std::max(1.0, n - 2.0) / sxx);
    if (!(-slope > 0.0)) throw DegenerateTailSample("log-log slope is not negative");
    return {-slope, pts.size(), se};
}

/// Inclusive rectangle of (in, out) degrees.
struct Region {
    std::uint64_t i_lo = 0, i_hi = 0;
    std::uint64_t j_lo = 0, j_hi = 0;
};

struct CellDiff {
    std::uint64_t in = 0, out = 0;
    double p = 0.0, q = 0.0;
};

struct PmfComparison {
    double total_variation = 0.0;  // half the L1 distance on the region
    double max_abs_diff = 0.0;
    std::vector<CellDiff> cells;
};

inline PmfComparison compare_pmf(const JointPMF& p, const JointPMF& q, const Region& region) {
    PmfComparison out;
    double l1 = 0.0;
    for (std::uint64_t i = region.i_lo; i <= region.i_hi; ++i)
        for (std::uint64_t j = region.j_lo; j <= region.j_hi; ++j) {
            const double a = p.mass(i, j), b = q.mass(i, j);
            l1 += std::abs(a - b);
            out.max_abs_diff = std::max(out.max_abs_diff, std::abs(a - b));
            out.cells.push_back({i, j, a, b});
        }
    out.total_variation = 0.5 * l1;
    return out;
}

enum class Margin { in, out };

/// Positive degrees of every node on the chosen margin, as reals.
inline std::vector<double> positive_degrees(const DirectedMultigraph& g, Margin m) {
    const auto deg = m == Margin::in ? g.in_degrees() : g.out_degrees();
    std::vector<double> out;
    out.reserve(deg.size());
    for (auto d : deg)
        if (d > 0) out.push_back(static_cast<double>(d));
    return out;
}

/// Positive degrees read off a census table.
inline std::vector<double> positive_degrees(const JointCountTable& t, Margin m) {
    std::vector<double> out;
    for (const auto& c : t.cells()) {
        const auto d = m == Margin::in ? c.in : c.out;
        if (d > 0) out.insert(out.end(), c.count, static_cast<double>(d));
    }
    return out;
}

}  // namespace htpa
