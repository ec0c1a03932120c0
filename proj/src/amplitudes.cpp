#include "ctxprob/amplitudes.hpp"

#include <cmath>
#include <string>

namespace ctxprob {

ComplexAmplitude trig_wave(Probability p1_prime, Probability p2_prime, double theta) {
    const double r1 = std::sqrt(p1_prime.value());
    const double r2 = std::sqrt(p2_prime.value());
    return {r1 + r2 * std::cos(theta), r2 * std::sin(theta)};
}

SplitComplexAmplitude hyper_wave_unchecked(Probability p1_prime, Probability p2_prime,
                                           double theta, int sign) {
    if (sign != 1 && sign != -1) {
        throw Error(ErrorKind::InvalidArgument,
                    "hyperbolic sign must be +1 or -1, got " + std::to_string(sign));
    }
    if (!std::isfinite(theta) || theta < 0.0) {
        throw Error(ErrorKind::InvalidArgument, "hyperbolic phase must be finite and >= 0");
    }
    const double r1 = std::sqrt(p1_prime.value());
    const double r2 = sign * std::sqrt(p2_prime.value());
    return {r1 + r2 * std::cosh(theta), r2 * std::sinh(theta)};
}

SplitComplexAmplitude hyper_wave(Probability p1_prime, Probability p2_prime,
                                 double theta, int sign) {
    auto wave = hyper_wave_unchecked(p1_prime, p2_prime, theta, sign);
    // Same admissibility as the forward rule with lambda = sign * cosh(theta).
    (void)reconstruct_probability(p1_prime, p2_prime, sign * std::cosh(theta));
    return wave;
}

Wave wave_from_analysis(Probability p1_prime, Probability p2_prime,
                        const TransitionAnalysis& analysis) {
    if (const auto* t = std::get_if<Trigonometric>(&analysis.regime)) {
        return trig_wave(p1_prime, p2_prime, t->theta);
    }
    if (const auto* h = std::get_if<Hyperbolic>(&analysis.regime)) {
        return hyper_wave(p1_prime, p2_prime, h->theta, h->sign);
    }
    throw Error(ErrorKind::DegenerateRegime, "no wave exists for a degenerate transition");
}

double wave_probability(const Wave& wave) noexcept {
    if (const auto* c = std::get_if<ComplexAmplitude>(&wave)) return c->squared_modulus();
    return std::get<SplitComplexAmplitude>(wave).hyperbolic_modulus();
}

} // namespace ctxprob
