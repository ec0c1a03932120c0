#pragma once

// Two-term waves whose modulus reproduces the transformed probability.
//
//   trigonometric:  phi = sqrt(p1') + sqrt(p2') e^{i theta}
//                   |phi|^2 = p1' + p2' + 2 sqrt(p1' p2') cos(theta)
//   hyperbolic:     phi = sqrt(p1') +- sqrt(p2') e^{j theta},  j^2 = +1
//                   re^2 - hy^2 = p1' + p2' +- 2 sqrt(p1' p2') cosh(theta)

#include "ctxprob/calculus.hpp"

#include <variant>

namespace ctxprob {

struct ComplexAmplitude final {
    double re = 0.0;
    double im = 0.0;

    double squared_modulus() const noexcept { return re * re + im * im; }
    bool operator==(const ComplexAmplitude&) const = default;
};

// re + hy*j with j^2 = +1.
struct SplitComplexAmplitude final {
    double re = 0.0;
    double hy = 0.0;

    // re^2 - hy^2, factored to limit cancellation.
    double hyperbolic_modulus() const noexcept { return (re - hy) * (re + hy); }
    bool operator==(const SplitComplexAmplitude&) const = default;
};

using Wave = std::variant<ComplexAmplitude, SplitComplexAmplitude>;

ComplexAmplitude trig_wave(Probability p1_prime, Probability p2_prime, double theta);

// Builds the split-complex wave without checking that its modulus is a
// probability. theta must be finite and >= 0, sign must be +1 or -1.
SplitComplexAmplitude hyper_wave_unchecked(Probability p1_prime, Probability p2_prime,
                                           double theta, int sign);

// As above, but throws InadmissibleLambda when the modulus leaves [0,1].
SplitComplexAmplitude hyper_wave(Probability p1_prime, Probability p2_prime,
                                 double theta, int sign);

// Throws DegenerateRegime for a degenerate analysis.
Wave wave_from_analysis(Probability p1_prime, Probability p2_prime,
                        const TransitionAnalysis& analysis);

// Squared modulus for complex waves, hyperbolic modulus for split-complex ones.
double wave_probability(const Wave& wave) noexcept;

} // namespace ctxprob
