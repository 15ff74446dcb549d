#pragma once

#include <cmath>
#include <string>

#include "htpa/error.hpp"

namespace htpa {

/// The five parameters of the directed-edge preferential attachment model.
///
/// alpha, beta and gamma are the probabilities of the three growth moves
/// (new source node, edge between existing nodes, new target node);
/// delta_in and delta_out are the attractiveness offsets added to in- and
/// out-degree when choosing endpoints.
struct ModelParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta_in = 0.0;
    double delta_out = 0.0;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Constants derived from ModelParams.
///
/// c1 = 1/(alpha_in - 1) and c2 = 1/(alpha_out - 1) are the exponents of
/// the scaling functions h^c1, h^c2 of in- and out-degree; a = c2/c1.
struct DerivedConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double a = 0.0;
    double alpha_in = 0.0;
    double alpha_out = 0.0;

    /// Index of regular variation of in-degree, alpha_in - 1.
    double gamma_in() const noexcept { return alpha_in - 1.0; }
    double gamma_out() const noexcept { return alpha_out - 1.0; }

    friend bool operator==(const DerivedConstants&, const DerivedConstants&) = default;
};

inline constexpr double kSumTolerance = 1e-12;

/// Checks every ModelParams constraint. A probability sum off by at most
/// kSumTolerance is renormalized; anything larger is rejected.
inline ModelParams validate(ModelParams p) {
    auto fail = [](const std::string& what) { throw InvalidParams("invalid model parameters: " + what); };
    for (double v : {p.alpha, p.beta, p.gamma, p.delta_in, p.delta_out})
        if (!std::isfinite(v)) fail("non-finite value");
    if (p.alpha < 0.0) fail("alpha < 0");
    if (p.beta < 0.0) fail("beta < 0");
    if (p.gamma < 0.0) fail("gamma < 0");
    if (p.delta_in < 0.0) fail("delta_in < 0");
    if (p.delta_out < 0.0) fail("delta_out < 0");
    const double sum = p.alpha + p.beta + p.gamma;
    if (std::abs(sum - 1.0) > kSumTolerance) fail("alpha+beta+gamma != 1 (sum = " + std::to_string(sum) + ")");
    if (sum != 1.0) {
        p.alpha /= sum;
        p.beta /= sum;
        p.gamma /= sum;
    }
    if (p.alpha >= 1.0) fail("alpha = 1");
    if (p.beta >= 1.0) fail("beta = 1");
    if (p.gamma >= 1.0) fail("gamma = 1");
    return p;
}

/// Tail constants. Throws DegenerateTail when either marginal power law
/// side condition (alpha*delta_in + gamma > 0, gamma*delta_out + alpha > 0)
/// fails; the model can still be simulated in that case.
inline DerivedConstants derive(const ModelParams& raw) {
    const ModelParams p = validate(raw);
    if (!(p.alpha * p.delta_in + p.gamma > 0.0))
        throw DegenerateTail("in-degree power law requires alpha*delta_in + gamma > 0");
    if (!(p.gamma * p.delta_out + p.alpha > 0.0))
        throw DegenerateTail("out-degree power law requires gamma*delta_out + alpha > 0");
    DerivedConstants d;
    d.c1 = (p.alpha + p.beta) / (1.0 + p.delta_in * (p.alpha + p.gamma));
    d.c2 = (p.beta + p.gamma) / (1.0 + p.delta_out * (p.alpha + p.gamma));
    d.a = d.c2 / d.c1;
    d.alpha_in = 1.0 + 1.0 / d.c1;
    d.alpha_out = 1.0 + 1.0 / d.c2;
    return d;
}

/// P[B = 1] = gamma/(alpha+gamma): probability that a limiting node was
/// born as the target of a gamma move.
inline double branch_probability(const ModelParams& p) {
    const double s = p.alpha + p.gamma;
    if (!(s > 0.0)) throw InvalidParams("alpha + gamma must be positive");
    return p.gamma / s;
}

/// Tail-measure quantities are defined only for strictly positive offsets.
inline void require_positive_offsets(const ModelParams& p) {
    if (!(p.delta_in > 0.0) || !(p.delta_out > 0.0))
        throw DomainError("tail measure requires delta_in > 0 and delta_out > 0");
}

}  // namespace htpa
