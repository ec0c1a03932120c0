#include "ctxprob/calculus.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace ctxprob {

namespace {

std::string describe(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

// 2 sqrt(p1' p2'), the scale that turns delta into lambda.
double interference_scale(Probability p1_prime, Probability p2_prime) {
    const double a = p1_prime.value();
    const double b = p2_prime.value();
    if (a == 0.0 || b == 0.0) {
        throw Error(ErrorKind::DegenerateDenominator,
                    "lambda undefined: P(B|S1')=" + describe(a) +
                        ", P(B|S2')=" + describe(b));
    }
    return 2.0 * std::sqrt(a * b);
}

} // namespace

Probability::Probability(double value, double roundoff) : value_(value) {
    if (!(value >= -roundoff && value <= 1.0 + roundoff)) {
        throw Error(ErrorKind::ProbabilityOutOfRange,
                    "probability " + describe(value) + " outside [0,1]");
    }
    if (value_ < 0.0) value_ = 0.0;
    if (value_ > 1.0) value_ = 1.0;
}

ContextTriple::ContextTriple(Probability p_s, Probability p1_prime, Probability p2_prime)
    : p_s_(p_s), p1_prime_(p1_prime), p2_prime_(p2_prime) {}

ContextTriple::ContextTriple(Probability p_s, Probability p1_prime, Probability p2_prime,
                             Probability p1, Probability p2, double additivity_tolerance)
    : p_s_(p_s), p1_prime_(p1_prime), p2_prime_(p2_prime), p1_(p1), p2_(p2) {
    const double gap = p_s.value() - (p1.value() + p2.value());
    if (!(std::abs(gap) <= additivity_tolerance)) {
        throw Error(ErrorKind::AdditivityViolated,
                    "P(B|S)=" + describe(p_s.value()) + " differs from P(B|S1)+P(B|S2)=" +
                        describe(p1.value() + p2.value()) + " by " + describe(gap));
    }
}

ContextTriple ContextTriple::from_optional(Probability p_s, Probability p1_prime,
                                           Probability p2_prime,
                                           std::optional<Probability> p1,
                                           std::optional<Probability> p2,
                                           double additivity_tolerance) {
    if (p1.has_value() != p2.has_value()) {
        throw Error(ErrorKind::MismatchedSubcontexts,
                    "P(B|S1) and P(B|S2) must be given together");
    }
    if (p1) return ContextTriple(p_s, p1_prime, p2_prime, *p1, *p2, additivity_tolerance);
    return ContextTriple(p_s, p1_prime, p2_prime);
}

RegimeKind kind_of(const Regime& regime) noexcept {
    return static_cast<RegimeKind>(regime.index());
}

std::optional<double> phase_of(const Regime& regime) noexcept {
    if (const auto* t = std::get_if<Trigonometric>(&regime)) return t->theta;
    if (const auto* h = std::get_if<Hyperbolic>(&regime)) return h->theta;
    return std::nullopt;
}

std::string_view to_string(RegimeKind kind) noexcept {
    switch (kind) {
    case RegimeKind::Trigonometric: return "trigonometric";
    case RegimeKind::Hyperbolic: return "hyperbolic";
    case RegimeKind::Degenerate: return "degenerate";
    }
    return "unknown";
}

std::string_view to_string(DegenerateReason reason) noexcept {
    switch (reason) {
    case DegenerateReason::FirstSubcontextZero: return "first_subcontext_zero";
    case DegenerateReason::SecondSubcontextZero: return "second_subcontext_zero";
    case DegenerateReason::BothSubcontextsZero: return "both_subcontexts_zero";
    }
    return "unknown";
}

bool same_classification(const Regime& a, const Regime& b) noexcept {
    if (a.index() != b.index()) return false;
    if (const auto* ha = std::get_if<Hyperbolic>(&a)) {
        return ha->sign == std::get<Hyperbolic>(b).sign;
    }
    return true;
}

double delta_componentwise(Probability p1, Probability p2,
                           Probability p1_prime, Probability p2_prime) noexcept {
    return (p1.value() - p1_prime.value()) + (p2.value() - p2_prime.value());
}

double delta_from_reference(Probability p_s, Probability p1_prime,
                            Probability p2_prime) noexcept {
    return p_s.value() - p1_prime.value() - p2_prime.value();
}

double lambda_coefficient(double delta, Probability p1_prime, Probability p2_prime) {
    return delta / interference_scale(p1_prime, p2_prime);
}

Regime classify(double lambda) {
    if (!std::isfinite(lambda)) {
        throw Error(ErrorKind::NonFinite, "cannot classify lambda=" + describe(lambda));
    }
    if (std::abs(lambda) <= 1.0) return Trigonometric{std::acos(lambda)};
    return Hyperbolic{lambda > 0.0 ? 1 : -1, std::acosh(std::abs(lambda))};
}

Probability reconstruct_probability(Probability p1_prime, Probability p2_prime,
                                    double lambda, double roundoff) {
    const double a = p1_prime.value();
    const double b = p2_prime.value();
    const double p = a + b + 2.0 * std::sqrt(a * b) * lambda;
    if (!(p >= -roundoff && p <= 1.0 + roundoff)) {
        throw Error(ErrorKind::InadmissibleLambda,
                    "lambda=" + describe(lambda) + " gives P(B|S)=" + describe(p) +
                        " outside [0,1]");
    }
    return Probability(p, roundoff);
}

LambdaRange lambda_range(Probability p1_prime, Probability p2_prime) {
    const double scale = interference_scale(p1_prime, p2_prime);
    const double sum = p1_prime.value() + p2_prime.value();
    return {-sum / scale, (1.0 - sum) / scale};
}

TransitionAnalysis analyze(const ContextTriple& triple) {
    TransitionAnalysis out;
    out.delta = delta_from_reference(triple.p_s(), triple.p1_prime(), triple.p2_prime());

    const bool first_zero = triple.p1_prime().value() == 0.0;
    const bool second_zero = triple.p2_prime().value() == 0.0;
    if (first_zero || second_zero) {
        out.regime = Degenerate{first_zero && second_zero ? DegenerateReason::BothSubcontextsZero
                                : first_zero             ? DegenerateReason::FirstSubcontextZero
                                                         : DegenerateReason::SecondSubcontextZero};
        return out;
    }
    const double lambda = lambda_coefficient(out.delta, triple.p1_prime(), triple.p2_prime());
    out.lambda = lambda;
    out.regime = classify(lambda);
    return out;
}

double naive_identification_error(const ContextTriple& triple) noexcept {
    return delta_from_reference(triple.p_s(), triple.p1_prime(), triple.p2_prime());
}

std::vector<CorrespondencePoint> correspondence_scan(const ContextTriple& base,
                                                     Perturbation perturbation,
                                                     std::span<const double> epsilons) {
    if (!base.has_reference_split()) {
        throw Error(ErrorKind::InvalidArgument,
                    "correspondence scan needs P(B|S1) and P(B|S2) in the base triple");
    }
    const Probability p1 = *base.p1();
    const Probability p2 = *base.p2();

    auto perturbed = [](Probability p, double eps, double c) {
        const double v = p.value() + eps * c;
        if (!(v > 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::InvalidPerturbedProbability,
                        "perturbed probability " + describe(v) + " at eps=" + describe(eps) +
                            " leaves (0,1]");
        }
        return Probability(v);
    };

    std::vector<CorrespondencePoint> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        const Probability p1_prime = perturbed(p1, eps, perturbation.c1);
        const Probability p2_prime = perturbed(p2, eps, perturbation.c2);
        const double delta = delta_componentwise(p1, p2, p1_prime, p2_prime);
        out.push_back({eps, delta, lambda_coefficient(delta, p1_prime, p2_prime)});
    }
    return out;
}

} // namespace ctxprob
