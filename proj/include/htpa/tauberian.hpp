#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "htpa/error.hpp"
#include "htpa/limit_dist.hpp"
#include "htpa/parallel.hpp"
#include "htpa/params.hpp"
#include "htpa/quadrature.hpp"

namespace htpa {

/// b_i(t) = t^(1/gamma_i).
struct ScalingFunctions {
    double gamma1 = 1.0;
    double gamma2 = 1.0;

    double b1(double t) const { return std::pow(t, 1.0 / gamma1); }
    double b2(double t) const { return std::pow(t, 1.0 / gamma2); }
    double b(int axis, double t) const { return axis == 1 ? b1(t) : b2(t); }
    double gamma(int axis) const { return axis == 1 ? gamma1 : gamma2; }
};

/// A measure on the nonnegative integer lattice, finite on bounded sets.
class DiscreteMeasure {
public:
    virtual ~DiscreteMeasure() = default;

    /// U([0, X] x [0, Y]).
    virtual double rect(double X, double Y) const = 0;
    /// sum_ij w_ij exp(-l1 i - l2 j).
    virtual double laplace(double l1, double l2) const = 0;
    /// Same sum restricted to atoms outside [0, X) x [0, Y).
    virtual double laplace_outside(double l1, double l2, double X, double Y) const = 0;
    /// U_1([0, X]) = U([0, X] x [0, inf)) for axis 1, and symmetrically for axis 2.
    virtual double marginal(int axis, double X) const = 0;
    virtual std::string recipe() const = 0;
};

/// Explicitly stored atoms. When `truncated_at` is set the atoms are a
/// truncation of a larger measure, and queries that reach past the stored
/// support raise SupportExceeded.
class AtomTable final : public DiscreteMeasure {
public:
    AtomTable(std::map<std::pair<std::uint64_t, std::uint64_t>, double> atoms,
              std::optional<std::pair<std::uint64_t, std::uint64_t>> truncated_at = std::nullopt,
              std::string recipe = "explicit atoms")
        : atoms_(std::move(atoms)), truncated_at_(truncated_at), recipe_(std::move(recipe)) {
        for (const auto& [ij, w] : atoms_)
            if (!(w >= 0.0)) throw DomainError("atom weights must be nonnegative");
    }

    double atom(std::uint64_t i, std::uint64_t j) const {
        auto it = atoms_.find({i, j});
        return it == atoms_.end() ? 0.0 : it->second;
    }

    double rect(double X, double Y) const override {
        if (truncated_at_ && (X > double(truncated_at_->first) || Y > double(truncated_at_->second)))
            throw SupportExceeded("rectangle leaves the stored support");
        double s = 0.0;
        for (const auto& [ij, w] : atoms_)
            if (double(ij.first) <= X && double(ij.second) <= Y) s += w;
        return s;
    }

    double laplace(double l1, double l2) const override { return laplace_outside(l1, l2, 0.0, 0.0); }

    double laplace_outside(double l1, double l2, double X, double Y) const override {
        if (truncated_at_) {
            // The kernel at the edge of the stored support bounds the relative
            // weight of everything beyond it.
            const double edge = std::max(std::exp(-l1 * double(truncated_at_->first + 1)),
                                         std::exp(-l2 * double(truncated_at_->second + 1)));
            if (edge > kTruncationTolerance)
                throw SupportExceeded("exponential kernel at the support edge is " + std::to_string(edge));
        }
        double s = 0.0;
        for (const auto& [ij, w] : atoms_)
            if (double(ij.first) >= X || double(ij.second) >= Y)
                s += w * std::exp(-l1 * double(ij.first) - l2 * double(ij.second));
        return s;
    }

    double marginal(int axis, double X) const override {
        if (truncated_at_) throw SupportExceeded("marginal of a truncated table");
        double s = 0.0;
        for (const auto& [ij, w] : atoms_)
            if (double(axis == 1 ? ij.first : ij.second) <= X) s += w;
        return s;
    }

    std::string recipe() const override { return recipe_; }

    static constexpr double kTruncationTolerance = 1e-12;

private:
    std::map<std::pair<std::uint64_t, std::uint64_t>, double> atoms_;
    std::optional<std::pair<std::uint64_t, std::uint64_t>> truncated_at_;
    std::string recipe_;
};

namespace detail {

struct SeriesParts {
    double log_le = -HUGE_VAL;  // log of the sum over n <= n_le
    double log_gt = -HUGE_VAL;  // log of the sum over n > n_le
    std::uint64_t terms = 0;
};

/// Sums t_n with t_0 = exp(log_t0) and t_(n+1)/t_n = (c + n)/(n + 1) rho,
/// split at n_le (n_le < 0 puts everything in the upper part). Accumulation
/// is rescaled to stay in range. Stops once the remaining tail is below
/// 1e-17 of the running sum.
inline SeriesParts node_series(double c, double log_t0, double rho, std::int64_t n_le, bool need_gt) {
    constexpr double kBig = 1e250, kLogBig = 575.64627324851142;
    constexpr std::int64_t kNone = std::numeric_limits<std::int64_t>::max();
    SeriesParts out;
    if (!need_gt && n_le < 0) return out;
    if (need_gt && !(rho < 1.0)) throw SupportExceeded("series does not converge");
    double term = 1.0, le = 0.0, gt = 0.0, offset = 0.0, nd = 0.0;
    std::int64_t n = 0;
    bool done = false;
    // Adds terms n..last into acc in blocks, checking range and the tail bound between blocks.
    double ratio[64];
    auto run = [&](double& acc, std::int64_t last) {
        while (!done && n <= last) {
            const int len = static_cast<int>(std::min<std::int64_t>(last - n, 63)) + 1;
            for (int b = 0; b < len; ++b) ratio[b] = (c + (nd + b)) * rho / (nd + b + 1.0);
            double a0 = 0.0, a1 = 0.0;
            int b = 0;
            for (; b + 1 < len; b += 2) {
                a0 += term;
                term *= ratio[b];
                a1 += term;
                term *= ratio[b + 1];
            }
            if (b < len) {
                a0 += term;
                term *= ratio[b];
            }
            acc += a0 + a1;
            n += len;
            nd += len;
            if (term > kBig) {
                term /= kBig;
                le /= kBig;
                gt /= kBig;
                offset += kLogBig;
            }
            const double rb = std::max(ratio[len - 1], rho);
            if ((rb < 1.0 && term * rb / (1.0 - rb) < 1e-17 * (le + gt)) || term == 0.0) done = true;
        }
    };
    run(le, n_le);
    if (need_gt) run(gt, kNone);
    out.terms = static_cast<std::uint64_t>(n);
    out.log_le = le > 0.0 ? log_t0 + offset + std::log(le) : -HUGE_VAL;
    out.log_gt = gt > 0.0 ? log_t0 + offset + std::log(gt) : -HUGE_VAL;
    return out;
}

inline double log_add(double x, double y) {
    if (x == -HUGE_VAL) return y;
    if (y == -HUGE_VAL) return x;
    const double m = std::max(x, y);
    return m + std::log(std::exp(x - m) + std::exp(y - m));
}

}  // namespace detail

/// The measure with atoms m_ij = prod_(d=1..k) (i + d) P[X1 = i + k, Y1 = j].
///
/// Atoms are never tabulated. Writing P[X1 = n, Y1 = j] as the mixture
/// integral over s = log z and discretizing it with a fixed Gauss-Legendre
/// rule, every query factorizes at each node into a series in i times a
/// series in j; both are summed term by term until the remainder is
/// negligible. There is therefore no support bound.
class DerivativeMeasure final : public DiscreteMeasure {
public:
    DerivativeMeasure(const ModelParams& params, int k, QuadratureSpec quad = {})
        : law_(params, quad), k_(k) {
        require_positive_offsets(law_.params());
        const auto& d = law_.constants();
        if (!(double(k) > d.alpha_in - 1.0))
            throw InvalidK("k = " + std::to_string(k) + " must exceed alpha_in - 1 = " + std::to_string(d.alpha_in - 1.0));
        r_ = law_.params().delta_in + 1.0;
        r_out_ = law_.params().delta_out;
        lg_ratio_ = std::lgamma(r_ + k_) - std::lgamma(r_);
        const double w = 0.5 / std::max({1.0, d.a, std::sqrt((r_ + k_) / 4.0)});
        panel_width_ = w;
    }

    int k() const noexcept { return k_; }
    const LimitLaw& law() const noexcept { return law_; }

    /// Scaling functions of the measure: gamma_1 = k - alpha_in + 1 and gamma_2 = gamma_1 / a.
    ScalingFunctions scaling() const {
        const auto& d = law_.constants();
        const double g1 = double(k_) - d.alpha_in + 1.0;
        return {g1, g1 / d.a};
    }

    /// m_ij by adaptive quadrature of the single atom.
    double atom(std::uint64_t i, std::uint64_t j) const {
        const double ld = std::lgamma(double(i + k_) + 1.0) - std::lgamma(double(i) + 1.0);
        return std::exp(ld + law_.log_pmf_component(Component::one, i + k_, j));
    }

    double rect(double X, double Y) const override {
        if (X < 0.0 || Y < 0.0) return 0.0;
        const auto ni = static_cast<std::int64_t>(std::floor(X)), nj = static_cast<std::int64_t>(std::floor(Y));
        return sum_nodes(turn(X, Y), decay_rate(), [&](double s) {
            const auto si = i_series(s, 1.0, ni, false), sj = j_series(s, 1.0, nj, false);
            return si.log_le + sj.log_le;
        });
    }

    double laplace(double l1, double l2) const override {
        check_rates(l1, l2);
        return sum_nodes(turn(1.0 / l1, 1.0 / l2), decay_rate(), [&](double s) {
            const auto si = i_series(s, std::exp(-l1), -1, true), sj = j_series(s, std::exp(-l2), -1, true);
            return si.log_gt + sj.log_gt;
        });
    }

    double laplace_outside(double l1, double l2, double X, double Y) const override {
        check_rates(l1, l2);
        if (X <= 0.0 || Y <= 0.0) return laplace(l1, l2);
        const auto ni = static_cast<std::int64_t>(std::ceil(X)) - 1, nj = static_cast<std::int64_t>(std::ceil(Y)) - 1;
        return sum_nodes(turn(1.0 / l1, 1.0 / l2), decay_rate(), [&](double s) {
            const auto si = i_series(s, std::exp(-l1), ni, true), sj = j_series(s, std::exp(-l2), nj, true);
            // outside = gt_i (le_j + gt_j) + le_i gt_j
            return detail::log_add(si.log_gt + detail::log_add(sj.log_le, sj.log_gt), si.log_le + sj.log_gt);
        });
    }

    /// Exponent of the axis-2 marginal's integrand at large z; the marginal
    /// is finite only when this is positive.
    double axis2_decay() const {
        const auto& d = law_.constants();
        return 1.0 / d.c1 + d.a * r_out_ - double(k_);
    }

    double marginal(int axis, double X) const override {
        if (X < 0.0) return 0.0;
        const auto n = static_cast<std::int64_t>(std::floor(X));
        const auto& d = law_.constants();
        if (axis == 1)
            return sum_nodes(std::log1p(X), 1.0 / d.c1 + r_, [&](double s) { return i_series(s, 1.0, n, false).log_le; });
        if (!(axis2_decay() > 0.0))
            throw MarginalDiverges("axis-2 marginal is infinite: 1/c1 + a delta_out - k = " + std::to_string(axis2_decay()));
        return sum_nodes(std::log1p(X) / d.a, axis2_decay(), [&](double s) {
            // Full i-sum: Gamma(r+k)/Gamma(r) (1-u)^k u^-k.
            const double full_i = lg_ratio_ + double(k_) * (std::log(-std::expm1(-s)) + s);
            return full_i + j_series(s, 1.0, n, false).log_le;
        });
    }

    /// Limit of U_1(b_1(t) x) / (t x^gamma_1).
    double marginal_constant() const {
        const auto& d = law_.constants();
        const double g1 = scaling().gamma1;
        return std::exp(std::lgamma(r_ + 1.0 / d.c1) - std::lgamma(r_)) / (d.c1 * g1);
    }

    std::string recipe() const override {
        return "m_ij = prod_{d=1..k}(i+d) P[X1=i+k, Y1=j], k=" + std::to_string(k_);
    }

private:
    void check_rates(double l1, double l2) const {
        if (!(l1 > 0.0) || !(l2 > 0.0)) throw DomainError("transform rates must be positive");
    }

    double decay_rate() const { return 1.0 / law_.constants().c1 + r_ + law_.constants().a * r_out_; }

    // s beyond which the integrand decays at the tail rate.
    double turn(double X, double Y) const {
        return std::max(std::log1p(X), std::log1p(Y) / law_.constants().a);
    }

    detail::SeriesParts i_series(double s, double x, std::int64_t n_le, bool need_gt) const {
        const double log_t0 = lg_ratio_ - r_ * s + double(k_) * std::log(-std::expm1(-s));
        return detail::node_series(r_ + k_, log_t0, x * -std::expm1(-s), n_le, need_gt);
    }

    detail::SeriesParts j_series(double s, double y, std::int64_t n_le, bool need_gt) const {
        const double as = law_.constants().a * s;
        return detail::node_series(r_out_, -r_out_ * as, y * -std::expm1(-as), n_le, need_gt);
    }

    template <class F>
    double sum_nodes(double s_turn, double decay, F&& log_f) const {
        const double c1 = law_.constants().c1;
        const double s_max = s_turn + 46.0 / decay + 2.0;
        const NodeRule rule = composite_gauss_legendre(0.0, s_max, panel_width_);
        std::vector<double> logs(rule.size());
        parallel_for(rule.size(), threads_, [&](std::size_t q) {
            const double s = rule.nodes[q];
            logs[q] = std::log(rule.weights[q] / c1) - s / c1 + log_f(s);
        });
        const double m = *std::max_element(logs.begin(), logs.end());
        if (m == -HUGE_VAL) return 0.0;
        double acc = 0.0;
        for (double l : logs) acc += std::exp(l - m);
        return std::exp(m) * acc;
    }

public:
    void set_threads(unsigned t) { threads_ = t; }

private:
    LimitLaw law_;
    int k_;
    double r_ = 0.0, r_out_ = 0.0, lg_ratio_ = 0.0, panel_width_ = 0.5;
    unsigned threads_ = 1;
};

/// Builds the derivative measure; throws InvalidK when k <= alpha_in - 1.
inline DerivativeMeasure build_derivative_measure(int k, const ModelParams& params, QuadratureSpec quad = {}) {
    return DerivativeMeasure(params, k, quad);
}

/// (1/t) U([0, b1(t) x] x [0, b2(t) y]).
inline double measure_scaling(const DiscreteMeasure& U, const ScalingFunctions& b, double t, double x, double y) {
    if (!(t > 0.0) || x < 0.0 || y < 0.0) throw DomainError("measure_scaling needs t > 0 and x, y >= 0");
    return U.rect(b.b1(t) * x, b.b2(t) * y) / t;
}

/// (1/t) sum_ij w_ij exp(-l1 i / b1(t) - l2 j / b2(t)).
inline double transform_scaling(const DiscreteMeasure& U, const ScalingFunctions& b, double t, double l1, double l2) {
    if (!(t > 0.0) || !(l1 > 0.0) || !(l2 > 0.0)) throw DomainError("transform_scaling needs t, l1, l2 > 0");
    return U.laplace(l1 / b.b1(t), l2 / b.b2(t)) / t;
}

/// Limit measure V_{1,k}: density x^k f_1(x, y); its Laplace transform is
///   c1^-1 prod(delta_in + i) int_0^inf z^(k-1-1/c1) (1+z l1)^-(delta_in+k+1) (1+z^a l2)^-delta_out dz.
class DerivativeLimit {
public:
    DerivativeLimit(const ModelParams& params, int k, QuadratureSpec quad = {})
        : p_(validate(params)), d_(derive(p_)), k_(k), quad_(quad) {
        require_positive_offsets(p_);
        if (!(double(k) > d_.alpha_in - 1.0)) throw InvalidK("k must exceed alpha_in - 1");
        log_c_ = std::lgamma(p_.delta_in + k + 1.0) - std::lgamma(p_.delta_in + 1.0) - std::log(d_.c1);
    }

    double laplace(double l1, double l2) const {
        if (!(l1 > 0.0) || !(l2 > 0.0)) throw DomainError("transform rates must be positive");
        const double g = double(k_) - 1.0 / d_.c1, c = p_.delta_in + k_ + 1.0, a = d_.a, r2 = p_.delta_out;
        auto L = [&](double s) {
            return g * s - c * std::log1p(l1 * std::exp(s)) - r2 * std::log1p(l2 * std::exp(a * s));
        };
        const double guess = std::min(-std::log(l1), -std::log(l2) / a);
        const auto res = integrate_log_concave(L, -INFINITY, INFINITY, guess, quad_);
        return std::exp(log_c_ + res.log_value);
    }

    /// V_{1,k}([0, x] x [0, y]) = c1^-1 prod(delta_in+i) int z^(k-1-1/c1) P(delta_in+k+1, x/z) P(delta_out, y/z^a) dz.
    double rect(double x, double y) const {
        if (!(x > 0.0) || !(y > 0.0)) return 0.0;
        const double g = double(k_) - 1.0 / d_.c1, c = p_.delta_in + k_ + 1.0, a = d_.a, r2 = p_.delta_out;
        const double s0 = std::max(std::log(x), std::log(y) / a);
        const double up = c + a * r2 - g;
        auto f = [&](double s) {
            return std::exp(g * (s - s0)) * boost::math::gamma_p(c, x * std::exp(-s)) *
                   boost::math::gamma_p(r2, y * std::exp(-a * s));
        };
        const double lo = s0 - 46.0 / g, hi = s0 + 46.0 / std::min(up, 1.0) + 4.0;
        const double v = integrate(f, lo, s0, quad_).value + integrate(f, s0, hi, quad_).value +
                         std::exp(g * (lo - s0)) / g;
        return std::exp(log_c_ + g * s0) * v;
    }

    /// V_{1,k}([0, x] x [0, inf)) = K x^gamma_1.
    double marginal_in(double x) const {
        const double g = double(k_) - 1.0 / d_.c1;
        return std::exp(std::lgamma(p_.delta_in + 1.0 + 1.0 / d_.c1) - std::lgamma(p_.delta_in + 1.0)) /
               (d_.c1 * g) * std::pow(x, g);
    }

private:
    ModelParams p_;
    DerivedConstants d_;
    int k_;
    QuadratureSpec quad_;
    double log_c_ = 0.0;
};

inline double uhat_limit_rhs(const ModelParams& params, int k, double l1, double l2, QuadratureSpec quad = {}) {
    return DerivativeLimit(params, k, quad).laplace(l1, l2);
}

struct StabilizationRow {
    double t = 0.0;
    double value = 0.0;
    double target = 0.0;
    double rel_error = 0.0;
};

/// Outcome of the two-decade protocol: values on a log-spaced t grid,
/// compared against their analytic limit.
struct StabilizationReport {
    std::string check;
    std::vector<StabilizationRow> rows;
    double tolerance = 0.0;
    double last_two_rel_change = 0.0;
    bool monotone = false;  // relative error decreasing along the grid
    bool pass = false;
};

inline StabilizationReport stabilization(std::string check, std::vector<StabilizationRow> rows, double tol,
                                         bool require_monotone) {
    StabilizationReport r;
    r.check = std::move(check);
    r.tolerance = tol;
    for (auto& row : rows) row.rel_error = std::abs(row.value - row.target) / std::abs(row.target);
    r.rows = std::move(rows);
    r.monotone = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i)
        if (!(r.rows[i].rel_error < r.rows[i - 1].rel_error)) r.monotone = false;
    if (r.rows.size() >= 2) {
        const auto& a = r.rows[r.rows.size() - 2];
        const auto& b = r.rows.back();
        r.last_two_rel_change = std::abs(b.value - a.value) / std::abs(b.value);
    }
    const bool close = !r.rows.empty() && r.rows.back().rel_error < tol;
    r.pass = close && (!require_monotone || r.monotone);
    return r;
}

/// transform_scaling of the derivative measure against the analytic limit,
/// h over `h_grid`.
inline StabilizationReport uhat_check(const DerivativeMeasure& U, double l1, double l2,
                                      const std::vector<double>& h_grid, double tol = 0.05) {
    const DerivativeLimit lim(U.law().params(), U.k(), U.law().quadrature());
    const double target = lim.laplace(l1, l2);
    std::vector<StabilizationRow> rows;
    for (double h : h_grid) rows.push_back({h, transform_scaling(U, U.scaling(), h, l1, l2), target, 0.0});
    return stabilization("uhat", std::move(rows), tol, true);
}

/// measure_scaling of the derivative measure against V_{1,k}([0,x] x [0,y]).
inline StabilizationReport measure_check(const DerivativeMeasure& U, double x, double y,
                                         const std::vector<double>& t_grid, double tol = 0.10) {
    const DerivativeLimit lim(U.law().params(), U.k(), U.law().quadrature());
    const double target = lim.rect(x, y);
    std::vector<StabilizationRow> rows;
    for (double t : t_grid) rows.push_back({t, measure_scaling(U, U.scaling(), t, x, y), target, 0.0});
    return stabilization("measure", std::move(rows), tol, true);
}

struct TruncationRow {
    double y = 0.0;
    double t = 0.0;
    double value = 0.0;
    double full = 0.0;   // the y = 0 value at the same t
    double ratio = 0.0;  // value / full
};

/// int over {v1 >= y} u {v2 >= y} of exp(-v1/x1 - v2/x2) U_t(dv), by atom summation.
inline std::vector<TruncationRow> truncation_condition(const DiscreteMeasure& U, const ScalingFunctions& b, double x1,
                                                       double x2, const std::vector<double>& y_grid,
                                                       const std::vector<double>& t_grid) {
    if (!(x1 > 0.0) || !(x2 > 0.0)) throw DomainError("truncation_condition needs x > 0");
    std::vector<TruncationRow> rows;
    for (double t : t_grid) {
        const double b1 = b.b1(t), b2 = b.b2(t);
        const double l1 = 1.0 / (x1 * b1), l2 = 1.0 / (x2 * b2);
        const double full = U.laplace(l1, l2) / t;
        for (double y : y_grid) {
            const double v = y <= 0.0 ? full : U.laplace_outside(l1, l2, b1 * y, b2 * y) / t;
            rows.push_back({y, t, v, full, full > 0.0 ? v / full : 0.0});
        }
    }
    return rows;
}

struct MarginalRow {
    double t = 0.0;
    double x = 0.0;
    double value = 0.0;   // U_i(b_i(t) x) / t
    double target = 0.0;  // constant * x^gamma_i
    double ratio = 0.0;
};

/// U_i(b_i(t) x)/t against constant * x^gamma_i over t_grid.
inline std::vector<MarginalRow> marginal_condition(const DiscreteMeasure& U, int axis, const ScalingFunctions& b,
                                                   const std::vector<double>& x_grid, const std::vector<double>& t_grid,
                                                   double constant = 1.0) {
    if (axis != 1 && axis != 2) throw DomainError("axis must be 1 or 2");
    std::vector<MarginalRow> rows;
    for (double t : t_grid)
        for (double x : x_grid) {
            const double v = U.marginal(axis, b.b(axis, t) * x) / t;
            const double target = constant * std::pow(x, b.gamma(axis));
            rows.push_back({t, x, v, target, v / target});
        }
    return rows;
}

}  // namespace htpa
