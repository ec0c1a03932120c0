#include "ctxprob/amplitudes.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace ctxprob;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double kComplexOracle = 0.74494897427831780982; // mpmath, 40 digits

Probability P(double v) { return Probability(v); }

} // namespace

TEST_CASE("trig_wave examples", "[amplitudes][trig]") {
    const auto opposite = trig_wave(P(0.5), P(0.5), std::numbers::pi);
    CHECK_THAT(opposite.re, WithinAbs(0.0, 1e-15));
    CHECK_THAT(opposite.im, WithinAbs(0.0, 1e-15));
    CHECK_THAT(opposite.squared_modulus(), WithinAbs(0.0, 1e-15));

    CHECK_THAT(trig_wave(P(0.3), P(0.2), std::numbers::pi / 3).squared_modulus(),
               WithinAbs(kComplexOracle, 1e-15));

    const auto aligned = trig_wave(P(0.25), P(0.25), 0.0);
    CHECK(aligned.re == 1.0);
    CHECK(aligned.im == 0.0);
    CHECK(aligned.squared_modulus() == 1.0);
}

TEST_CASE("trig_wave agrees with std::complex and the forward rule", "[amplitudes][property]") {
    for (int i = 1; i <= 20; ++i) {
        for (int k = 1; k <= 20; ++k) {
            const double a = 0.05 * i;
            const double b = 0.05 * k;
            for (int t = 0; t < 181; ++t) {
                const double theta = std::numbers::pi * t / 180.0;
                const auto w = trig_wave(P(a), P(b), theta);
                const std::complex<double> ref =
                    std::sqrt(a) + std::sqrt(b) * std::polar(1.0, theta);
                CHECK_THAT(w.squared_modulus(), WithinAbs(std::norm(ref), 1e-12));
                CHECK_THAT(w.squared_modulus(),
                           WithinAbs(a + b + 2.0 * std::sqrt(a * b) * std::cos(theta), 1e-12));
            }
        }
    }
}

TEST_CASE("hyper_wave examples", "[amplitudes][hyper]") {
    CHECK_THAT(hyper_wave(P(0.1), P(0.1), std::acosh(3.5), 1).hyperbolic_modulus(),
               WithinAbs(0.9, 1e-14));
    CHECK_THAT(hyper_wave(P(0.1), P(0.1), 0.0, 1).hyperbolic_modulus(), WithinAbs(0.4, 1e-15));
    CHECK_THAT(hyper_wave(P(0.04), P(0.01), 0.0, -1).hyperbolic_modulus(), WithinAbs(0.01, 1e-15));
}

TEST_CASE("hyper_wave components and admissibility", "[amplitudes][hyper]") {
    const double theta = std::acosh(3.5);
    const auto plus = hyper_wave(P(0.1), P(0.1), theta, 1);
    CHECK_THAT(plus.re, WithinAbs(std::sqrt(0.1) * (1.0 + 3.5), 1e-14));
    CHECK_THAT(plus.hy, WithinAbs(std::sqrt(0.1) * std::sinh(theta), 1e-14));

    const auto minus = hyper_wave_unchecked(P(0.1), P(0.1), theta, -1);
    CHECK_THAT(minus.hyperbolic_modulus(), WithinAbs(0.2 - 0.2 * 3.5, 1e-14));
    CHECK_THROWS_AS(hyper_wave(P(0.1), P(0.1), theta, -1), Error);
    CHECK_THROWS_AS(hyper_wave(P(0.1), P(0.1), std::acosh(4.5), 1), Error);

    CHECK_THROWS_AS(hyper_wave_unchecked(P(0.1), P(0.1), 1.0, 0), Error);
    CHECK_THROWS_AS(hyper_wave_unchecked(P(0.1), P(0.1), -0.5, 1), Error);
    CHECK_THROWS_AS(hyper_wave_unchecked(P(0.1), P(0.1), INFINITY, 1), Error);
}

TEST_CASE("split-complex modulus identity by direct expansion", "[amplitudes][property]") {
    for (int i = 1; i <= 20; ++i) {
        for (int k = 1; k <= 20; ++k) {
            const double a = 0.05 * i;
            const double b = 0.05 * k;
            for (int t = 0; t < 181; ++t) {
                const double theta = 3.0 * t / 180.0;
                const double expected = a + b + 2.0 * std::sqrt(a * b) * std::cosh(theta);
                // (sqrt a + sqrt b cosh)^2 - b sinh^2, expanded independently.
                const double c = std::cosh(theta);
                const double s = std::sinh(theta);
                const double expanded =
                    a + 2.0 * std::sqrt(a * b) * c + b * c * c - b * s * s;
                CHECK_THAT(expanded, WithinAbs(expected, 1e-9));
                const auto w = hyper_wave_unchecked(P(a), P(b), theta, 1);
                CHECK_THAT(w.hyperbolic_modulus(), WithinRel(expected, 1e-12));
            }
        }
    }
}

TEST_CASE("wave_from_analysis dispatch", "[amplitudes][dispatch]") {
    TransitionAnalysis trig;
    trig.lambda = 0.5;
    trig.regime = Trigonometric{std::numbers::pi / 3};
    const Wave w1 = wave_from_analysis(P(0.3), P(0.2), trig);
    REQUIRE(std::holds_alternative<ComplexAmplitude>(w1));
    CHECK_THAT(wave_probability(w1), WithinAbs(kComplexOracle, 1e-15));

    TransitionAnalysis hyp;
    hyp.lambda = 3.5;
    hyp.regime = Hyperbolic{1, std::acosh(3.5)};
    const Wave w2 = wave_from_analysis(P(0.1), P(0.1), hyp);
    REQUIRE(std::holds_alternative<SplitComplexAmplitude>(w2));
    CHECK_THAT(wave_probability(w2), WithinAbs(0.9, 1e-14));

    TransitionAnalysis flat;
    flat.lambda = 0.0;
    flat.regime = Trigonometric{std::numbers::pi / 2};
    CHECK_THAT(wave_probability(wave_from_analysis(P(0.25), P(0.25), flat)), WithinAbs(0.5, 1e-15));

    TransitionAnalysis none;
    try {
        (void)wave_from_analysis(P(0.0), P(0.25), none);
        FAIL("expected DegenerateRegime");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateRegime);
    }
}

TEST_CASE("analyze then wave reproduces P(B|S)", "[amplitudes][property]") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int hyperbolic = 0;
    for (int i = 0; i < 10000; ++i) {
        const Probability a(0.01 + 0.99 * u(rng));
        const Probability b(0.01 + 0.99 * u(rng));
        const Probability p_s(u(rng));
        const ContextTriple triple(p_s, a, b);
        const TransitionAnalysis analysis = analyze(triple);
        if (kind_of(analysis.regime) == RegimeKind::Hyperbolic) ++hyperbolic;
        CHECK_THAT(wave_probability(wave_from_analysis(a, b, analysis)),
                   WithinAbs(p_s.value(), 1e-12));
    }
    CHECK(hyperbolic > 100);
}
