#pragma once

// Interference calculus for context transitions S -> S'.
//
// Both contexts split into two disjoint subcontexts, S = S1 u S2 and
// S' = S1' u S2'. Within S probabilities add classically,
//   P(B|S) = P(B|S1) + P(B|S2),
// but expressed through the primed subcontexts an extra term appears:
//   P(B|S) = P(B|S1') + P(B|S2') + delta
//          = P(B|S1') + P(B|S2') + 2 sqrt(P(B|S1') P(B|S2')) * lambda.
// |lambda| <= 1 gives the trigonometric form lambda = cos(theta) (the usual
// quantum interference rule); |lambda| > 1 gives lambda = +-cosh(theta).

#include "ctxprob/error.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace ctxprob {

struct Tolerances final {
    double probability_roundoff = 1e-12; // accepted overshoot outside [0,1]
    double additivity = 1e-9;            // |p_s - (p1 + p2)| for exact inputs
    double identity = 1e-12;             // round-trip identities
};

inline constexpr Tolerances kDefaultTolerances{};

// A real in [0,1]. Values within `roundoff` of the interval are clamped onto
// it; anything further out (or NaN) throws ProbabilityOutOfRange.
class Probability final {
public:
    explicit Probability(double value,
                         double roundoff = kDefaultTolerances.probability_roundoff);

    double value() const noexcept { return value_; }

    auto operator<=>(const Probability&) const = default;

private:
    double value_;
};

// P(B|S), P(B|S1'), P(B|S2') and optionally P(B|S1), P(B|S2).
class ContextTriple final {
public:
    ContextTriple(Probability p_s, Probability p1_prime, Probability p2_prime);

    // Requires |p_s - (p1 + p2)| <= additivity_tolerance.
    ContextTriple(Probability p_s, Probability p1_prime, Probability p2_prime,
                  Probability p1, Probability p2,
                  double additivity_tolerance = kDefaultTolerances.additivity);

    // p1 and p2 must be both present or both absent.
    static ContextTriple from_optional(Probability p_s, Probability p1_prime,
                                       Probability p2_prime,
                                       std::optional<Probability> p1,
                                       std::optional<Probability> p2,
                                       double additivity_tolerance =
                                           kDefaultTolerances.additivity);

    Probability p_s() const noexcept { return p_s_; }
    Probability p1_prime() const noexcept { return p1_prime_; }
    Probability p2_prime() const noexcept { return p2_prime_; }
    std::optional<Probability> p1() const noexcept { return p1_; }
    std::optional<Probability> p2() const noexcept { return p2_; }
    bool has_reference_split() const noexcept { return p1_.has_value(); }

    bool operator==(const ContextTriple&) const = default;

private:
    Probability p_s_;
    Probability p1_prime_;
    Probability p2_prime_;
    std::optional<Probability> p1_;
    std::optional<Probability> p2_;
};

struct Trigonometric final {
    double theta = 0.0; // [0, pi]
    bool operator==(const Trigonometric&) const = default;
};

struct Hyperbolic final {
    int sign = 1;       // +1 or -1
    double theta = 0.0; // > 0
    bool operator==(const Hyperbolic&) const = default;
};

enum class DegenerateReason : std::uint8_t {
    FirstSubcontextZero,
    SecondSubcontextZero,
    BothSubcontextsZero,
};

struct Degenerate final {
    DegenerateReason reason = DegenerateReason::BothSubcontextsZero;
    bool operator==(const Degenerate&) const = default;
};

using Regime = std::variant<Trigonometric, Hyperbolic, Degenerate>;

enum class RegimeKind : std::uint8_t { Trigonometric, Hyperbolic, Degenerate };

RegimeKind kind_of(const Regime& regime) noexcept;
std::optional<double> phase_of(const Regime& regime) noexcept;
std::string_view to_string(RegimeKind kind) noexcept;
std::string_view to_string(DegenerateReason reason) noexcept;

// Same kind, and the same sign when hyperbolic.
bool same_classification(const Regime& a, const Regime& b) noexcept;

struct TransitionAnalysis final {
    double delta = 0.0;
    std::optional<double> lambda; // absent iff regime is Degenerate
    Regime regime = Degenerate{};
};

double delta_componentwise(Probability p1, Probability p2,
                           Probability p1_prime, Probability p2_prime) noexcept;

double delta_from_reference(Probability p_s, Probability p1_prime,
                            Probability p2_prime) noexcept;

// Throws DegenerateDenominator when either primed probability is zero.
double lambda_coefficient(double delta, Probability p1_prime, Probability p2_prime);

// Ties at |lambda| == 1 go to the trigonometric branch (theta = 0 or pi).
// Throws NonFinite for NaN or infinite input.
Regime classify(double lambda);

// Throws InadmissibleLambda when the result leaves [0,1] by more than
// `roundoff`.
Probability reconstruct_probability(Probability p1_prime, Probability p2_prime,
                                    double lambda,
                                    double roundoff = kDefaultTolerances.probability_roundoff);

struct LambdaRange final {
    double min = 0.0;
    double max = 0.0;
};

// Closed interval of lambda for which reconstruct_probability succeeds.
LambdaRange lambda_range(Probability p1_prime, Probability p2_prime);

TransitionAnalysis analyze(const ContextTriple& triple);

// The error made by identifying S_j with S_j' and adding the primed
// probabilities as if they decomposed S. Numerically equal to delta.
double naive_identification_error(const ContextTriple& triple) noexcept;

struct Perturbation final {
    double c1 = 0.0;
    double c2 = 0.0;
};

struct CorrespondencePoint final {
    double epsilon = 0.0;
    double delta = 0.0;
    double lambda = 0.0;
};

// Moves the primed subcontexts away from the reference ones,
// P(B|S_j'(eps)) = P(B|S_j) + eps * c_j, and reports delta and lambda for
// each eps. `base` must carry p1 and p2.
std::vector<CorrespondencePoint> correspondence_scan(const ContextTriple& base,
                                                     Perturbation perturbation,
                                                     std::span<const double> epsilons);

} // namespace ctxprob
