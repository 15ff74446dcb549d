#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <boost/math/special_functions/beta.hpp>

#include "htpa/error.hpp"
#include "htpa/parallel.hpp"
#include "htpa/params.hpp"
#include "htpa/quadrature.hpp"
#include "htpa/rng.hpp"
#include "htpa/tables.hpp"

namespace htpa {

/// log of nb(m; r, p) = Gamma(r+m) / (Gamma(r) m!) p^r (1-p)^m, taking
/// log p and log(1-p) directly. r = 0 is the point mass at 0.
inline double log_nb_pmf(std::uint64_t m, double r, double log_p, double log_q) {
    if (r == 0.0) return m == 0 ? 0.0 : -INFINITY;
    const double md = static_cast<double>(m);
    double v = std::lgamma(r + md) - std::lgamma(r) - std::lgamma(md + 1.0) + r * log_p;
    if (m > 0) v += md * log_q;
    return v;
}

/// Partial sums of sum_m nb(m; r, p) x^m, stopped once the terms are negligible.
inline double nb_pgf_series(double r, double p, double x) {
    const double q = 1.0 - p;
    double term = std::pow(p, r);
    double sum = term;
    for (std::uint64_t m = 0; m < 100000; ++m) {
        term *= (r + static_cast<double>(m)) / static_cast<double>(m + 1) * q * x;
        sum += term;
        if (term < 1e-18 * sum && static_cast<double>(m) > r) break;
    }
    return sum;
}

/// (x + (1-x) z)^(-r): the pgf of NB(r, 1/z) at x.
inline double nb_pgf_closed(double r, double z, double x) { return std::pow(x + (1.0 - x) * z, -r); }

enum class Component { one = 1, two = 2 };

/// Negative-binomial shapes of (X_j, Y_j) given Z.
struct ComponentShape {
    double r_in = 0.0;
    double r_out = 0.0;
};

struct DegreePair {
    std::uint64_t in = 0;
    std::uint64_t out = 0;
    friend bool operator==(const DegreePair&, const DegreePair&) = default;
};

/// Limiting joint law of (in-degree, out-degree) of a uniformly chosen node.
///
/// (I, O) = B (1 + X1, Y1) + (1 - B) (X2, 1 + Y2) with B ~ Bernoulli(p_B).
/// Given a Pareto variable Z with density c1^-1 z^(-1-1/c1) on (1, inf),
/// X_j ~ NB(r_in, 1/Z) and Y_j ~ NB(r_out, Z^-a) independently.
class LimitLaw {
public:
    explicit LimitLaw(const ModelParams& params, QuadratureSpec quad = {})
        : params_(validate(params)), d_(derive(params_)), p_b_(htpa::branch_probability(params_)), quad_(quad) {}

    const ModelParams& params() const noexcept { return params_; }
    const DerivedConstants& constants() const noexcept { return d_; }
    const QuadratureSpec& quadrature() const noexcept { return quad_; }
    double branch_probability() const noexcept { return p_b_; }

    ComponentShape shape(Component j) const {
        return j == Component::one ? ComponentShape{params_.delta_in + 1.0, params_.delta_out}
                                   : ComponentShape{params_.delta_in, params_.delta_out + 1.0};
    }

    /// E[x^X_j y^Y_j] = c1^-1 int_1^inf z^(-1-1/c1) (x+(1-x)z)^(-r_in) (y+(1-y)z^a)^(-r_out) dz.
    ///
    /// Integrated in w with z = w^(-m), m = max(2, ceil(1/a)); the integrand
    /// in w is then bounded and vanishes at w = 0.
    double phi_component(Component j, double x, double y) const {
        check_unit(x, y);
        const auto [r_in, r_out] = shape(j);
        const double c1 = d_.c1, a = d_.a;
        const double m = std::max(2.0, std::ceil(1.0 / a));
        const double e = 1.0 / c1 - 1.0 + r_in + a * r_out;
        const double log_const = std::log(m / c1);
        auto f = [&](double w) {
            if (w <= 0.0) return 0.0;
            const double lw = std::log(w);
            const double u = std::exp(m * lw);
            const double ua = std::exp(m * a * lw);
            double v = log_const + (m * (e + 1.0) - 1.0) * lw;
            if (r_in != 0.0) v -= r_in * std::log((1.0 - x) + x * u);
            if (r_out != 0.0) v -= r_out * std::log((1.0 - y) + y * ua);
            return std::exp(v);
        };
        return integrate(f, 0.0, 1.0, quad_).value;
    }

    /// phi(x, y) = p_B x phi_1(x, y) + (1 - p_B) y phi_2(x, y).
    double phi(double x, double y) const {
        check_unit(x, y);
        double v = 0.0;
        if (p_b_ > 0.0 && x > 0.0) v += p_b_ * x * phi_component(Component::one, x, y);
        if (p_b_ < 1.0 && y > 0.0) v += (1.0 - p_b_) * y * phi_component(Component::two, x, y);
        return v;
    }

    /// log P[X_j = i, Y_j = k], by log-concave quadrature in s = log z.
    double log_pmf_component(Component j, std::uint64_t i, std::uint64_t k) const {
        const auto [r_in, r_out] = shape(j);
        const double c1 = d_.c1, a = d_.a;
        if ((r_in == 0.0 && i > 0) || (r_out == 0.0 && k > 0)) return -INFINITY;
        auto lg = [](double r, std::uint64_t m) {
            return r == 0.0 ? 0.0 : std::lgamma(r + double(m)) - std::lgamma(r) - std::lgamma(double(m) + 1.0);
        };
        const double head = lg(r_in, i) + lg(r_out, k) - std::log(c1);
        auto L = [&](double s) {
            if (s < 0.0) return -HUGE_VAL;
            double v = -s / c1 - r_in * s - a * r_out * s;
            if (i > 0) v += double(i) * std::log(-std::expm1(-s));
            if (k > 0) v += double(k) * std::log(-std::expm1(-a * s));
            return v;
        };
        const double guess = std::max(std::log1p(double(i)), std::log1p(double(k)) / a);
        const auto res = integrate_log_concave(L, 0.0, INFINITY, guess, quad_);
        return head + res.log_value;
    }

    double pmf_component(Component j, std::uint64_t i, std::uint64_t k) const {
        return std::exp(log_pmf_component(j, i, k));
    }

    /// p_ij = p_B P[X1 = i-1, Y1 = j] + (1 - p_B) P[X2 = i, Y2 = j-1].
    double pmf(std::uint64_t i, std::uint64_t j) const {
        double v = 0.0;
        if (i >= 1 && p_b_ > 0.0) v += p_b_ * pmf_component(Component::one, i - 1, j);
        if (j >= 1 && p_b_ < 1.0) v += (1.0 - p_b_) * pmf_component(Component::two, i, j - 1);
        return v;
    }

    /// Fixed quadrature in s = log z used for whole tables: composite
    /// Gauss-Legendre whose weights include c1^-1 e^(-s/c1).
    NodeRule table_rule(Component j, double i_scale, double k_scale) const {
        const auto [r_in, r_out] = shape(j);
        const double a = d_.a;
        const double p = 1.0 / d_.c1 + r_in + a * r_out;
        const double n = std::max({i_scale, k_scale, 1.0});
        const double width = 0.5 / std::max({1.0, a * std::sqrt(n / 4.0), std::sqrt(n / 4.0), a});
        const double s_max = std::max(std::log1p(i_scale), std::log1p(k_scale) / a) + 46.0 / p + 4.0;
        NodeRule rule = composite_gauss_legendre(0.0, s_max, width);
        for (std::size_t q = 0; q < rule.size(); ++q)
            rule.weights[q] *= std::exp(-rule.nodes[q] / d_.c1) / d_.c1;
        return rule;
    }

    /// Dense table of P[X_j = i, Y_j = k] for i <= imax, k <= kmax, row-major
    /// in i. Row q of the node rule contributes nb(i; r_in, e^-s) nb(k; r_out, e^-as).
    std::vector<double> pmf_component_table(Component j, std::uint64_t imax, std::uint64_t kmax,
                                            unsigned threads = 1) const {
        const auto [r_in, r_out] = shape(j);
        const double a = d_.a;
        const NodeRule rule = table_rule(j, double(imax), double(kmax));
        const std::size_t Q = rule.size(), I = imax + 1, K = kmax + 1;
        auto lg_row = [](double r, std::size_t n) {
            std::vector<double> v(n);
            if (r == 0.0) return v;
            for (std::size_t m = 0; m < n; ++m)
                v[m] = std::lgamma(r + double(m)) - std::lgamma(r) - std::lgamma(double(m) + 1.0);
            return v;
        };
        const auto lg_in = lg_row(r_in, I), lg_out = lg_row(r_out, K);
        std::vector<double> B(Q * K), logw(Q), ls_in(Q), lq_in(Q);
        for (std::size_t q = 0; q < Q; ++q) {
            const double s = rule.nodes[q];
            logw[q] = std::log(rule.weights[q]);
            ls_in[q] = -s;
            lq_in[q] = std::log(-std::expm1(-s));
            const double lq = std::log(-std::expm1(-a * s));
            for (std::size_t k = 0; k < K; ++k)
                B[q * K + k] = r_out == 0.0 ? (k == 0 ? 1.0 : 0.0)
                                            : std::exp(lg_out[k] - r_out * a * s + (k ? double(k) * lq : 0.0));
        }
        std::vector<double> out(I * K, 0.0);
        parallel_for(I, threads, [&](std::size_t i) {
            double* row = out.data() + i * K;
            for (std::size_t q = 0; q < Q; ++q) {
                double lv = logw[q];
                if (r_in == 0.0) {
                    if (i > 0) continue;
                } else {
                    lv += lg_in[i] + r_in * ls_in[q] + (i ? double(i) * lq_in[q] : 0.0);
                }
                if (lv < -745.0) continue;
                const double w = std::exp(lv);
                const double* b = B.data() + q * K;
                for (std::size_t k = 0; k < K; ++k) row[k] += w * b[k];
            }
        });
        return out;
    }

    /// Joint pmf of (I, O) on [0, imax] x [0, jmax].
    JointPMF pmf_table(std::uint64_t imax, std::uint64_t jmax, unsigned threads = 1) const {
        std::vector<double> t1, t2;
        if (p_b_ > 0.0 && imax >= 1) t1 = pmf_component_table(Component::one, imax - 1, jmax, threads);
        if (p_b_ < 1.0 && jmax >= 1) t2 = pmf_component_table(Component::two, imax, jmax - 1, threads);
        std::vector<MassCell> cells;
        cells.reserve((imax + 1) * (jmax + 1));
        for (std::uint64_t i = 0; i <= imax; ++i)
            for (std::uint64_t j = 0; j <= jmax; ++j) {
                double v = 0.0;
                if (!t1.empty() && i >= 1) v += p_b_ * t1[(i - 1) * (jmax + 1) + j];
                if (!t2.empty() && j >= 1) v += (1.0 - p_b_) * t2[i * jmax + (j - 1)];
                cells.push_back({i, j, v});
            }
        return JointPMF(std::move(cells));
    }

    /// P[I <= M, O <= M], integrating products of negative-binomial cdfs.
    double captured_mass(std::uint64_t M) const {
        auto comp = [&](Component j, std::int64_t mi, std::int64_t mk) {
            if (mi < 0 || mk < 0) return 0.0;
            const auto [r_in, r_out] = shape(j);
            const NodeRule rule = table_rule(j, double(mi), double(mk));
            double sum = 0.0;
            for (std::size_t q = 0; q < rule.size(); ++q) {
                const double s = rule.nodes[q];
                const double fi = r_in == 0.0 ? 1.0 : boost::math::ibeta(r_in, double(mi) + 1.0, std::exp(-s));
                const double fk =
                    r_out == 0.0 ? 1.0 : boost::math::ibeta(r_out, double(mk) + 1.0, std::exp(-d_.a * s));
                sum += rule.weights[q] * fi * fk;
            }
            return sum;
        };
        const auto m = static_cast<std::int64_t>(M);
        double v = 0.0;
        if (p_b_ > 0.0) v += p_b_ * comp(Component::one, m - 1, m);
        if (p_b_ < 1.0) v += (1.0 - p_b_) * comp(Component::two, m, m - 1);
        return v;
    }

    /// Smallest M in the doubling sequence from `start` at which the captured
    /// mass grows by less than `increment` on the next doubling.
    std::uint64_t adaptive_bound(double increment = 1e-6, std::uint64_t start = 16,
                                 std::uint64_t limit = std::uint64_t{1} << 24) const {
        std::uint64_t M = start;
        double prev = captured_mass(M);
        while (M < limit) {
            const double next = captured_mass(2 * M);
            if (next - prev < increment) return M;
            prev = next;
            M *= 2;
        }
        throw SupportExceeded("captured mass still increasing at M = " + std::to_string(M));
    }

    /// One draw of (X_j, Y_j).
    DegreePair draw_component(Component j, Rng& rng) const {
        const auto [r_in, r_out] = shape(j);
        const double lu = std::log(rng.uniform_open_low());
        // Z = U^-c1; Gamma-Poisson with scales Z - 1 and Z^a - 1.
        const double sx = std::expm1(-d_.c1 * lu);
        const double sy = std::expm1(-d_.c2 * lu);
        return {nb_draw(r_in, sx, rng), nb_draw(r_out, sy, rng)};
    }

    /// One draw of (I, O). `first_branch`, when given, receives B.
    DegreePair draw(Rng& rng, bool* first_branch = nullptr) const {
        const bool b = rng.bernoulli(p_b_);
        if (first_branch) *first_branch = b;
        if (b) {
            const auto d = draw_component(Component::one, rng);
            return {d.in + 1, d.out};
        }
        const auto d = draw_component(Component::two, rng);
        return {d.in, d.out + 1};
    }

    static constexpr std::size_t kChunk = 65536;

    /// n i.i.d. draws of (I, O). Chunk c of kChunk draws uses stream c of
    /// `seed`, so the output does not depend on the thread count.
    std::vector<DegreePair> sample(std::size_t n, std::uint64_t seed = kDefaultSeed, unsigned threads = 1) const {
        require_positive_offsets(params_);
        std::vector<DegreePair> out(n);
        const std::size_t chunks = (n + kChunk - 1) / kChunk;
        parallel_for(chunks, threads, [&](std::size_t c) {
            Rng rng(seed, c);
            const std::size_t end = std::min(n, (c + 1) * kChunk);
            for (std::size_t t = c * kChunk; t < end; ++t) out[t] = draw(rng);
        });
        return out;
    }

private:
    static void check_unit(double x, double y) {
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0))
            throw DomainError("generating functions are evaluated on [0,1]^2");
    }

    static std::uint64_t nb_draw(double r, double scale, Rng& rng) {
        if (r == 0.0 || scale <= 0.0) return 0;
        const double lambda = std::gamma_distribution<double>(r, scale)(rng);
        if (!(lambda > 0.0)) return 0;
        return static_cast<std::uint64_t>(std::poisson_distribution<std::int64_t>(lambda)(rng));
    }

    ModelParams params_;
    DerivedConstants d_;
    double p_b_;
    QuadratureSpec quad_;
};

}  // namespace htpa
