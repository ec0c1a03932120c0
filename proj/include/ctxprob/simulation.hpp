#pragma once

// Synthetic context-transition experiments and the finite-sample estimators
// that recover delta, lambda and the phase from their counts.

#include "ctxprob/calculus.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace ctxprob {

// S, S1, S2 decompose the reference context; S1p, S2p the transformed one.
enum class ContextLabel : std::uint8_t { S, S1, S2, S1p, S2p };

inline constexpr std::array<ContextLabel, 5> kAllContexts = {
    ContextLabel::S, ContextLabel::S1, ContextLabel::S2, ContextLabel::S1p, ContextLabel::S2p};

std::string_view to_string(ContextLabel label) noexcept;
std::optional<ContextLabel> parse_context_label(std::string_view text) noexcept;

struct CountRow final {
    ContextLabel context = ContextLabel::S;
    std::uint64_t successes = 0;
    std::uint64_t trials = 1;

    double p_hat() const noexcept {
        return static_cast<double>(successes) / static_cast<double>(trials);
    }
    bool operator==(const CountRow&) const = default;
};

// Per-context success counts. Rows are kept in canonical label order
// (S, S1, S2, S1p, S2p) whatever order they were supplied in.
class CountTable final {
public:
    // Throws ZeroTrials for a row with no trials and InvalidCountTable for
    // successes > trials, a repeated label, a lone S1/S2, or a missing
    // S/S1p/S2p row.
    explicit CountTable(std::vector<CountRow> rows);

    const std::vector<CountRow>& rows() const noexcept { return rows_; }
    bool contains(ContextLabel label) const noexcept;
    const CountRow& at(ContextLabel label) const;
    bool has_reference_split() const noexcept { return contains(ContextLabel::S1); }

    bool operator==(const CountTable&) const = default;

private:
    std::vector<CountRow> rows_;
};

struct DirectScenario final {
    ContextTriple truth;
};

// Complex amplitudes a1 = m1 and a2 = m2 e^{i phase}; each slit alone gives
// m_j^2, both open give |a1 + a2|^2.
struct TwoSlitScenario final {
    double a1_modulus = 0.0;
    double a2_modulus = 0.0;
    double phase = 0.0;
};

// Reference context obeys P(B|S) = P(B|S1) + P(B|S2); the primed pair is far
// enough off that |lambda| > 1.
struct HyperbolicUrnScenario final {
    Probability p1{0.0};
    Probability p2{0.0};
    Probability p1_prime{0.0};
    Probability p2_prime{0.0};
};

class Scenario final {
public:
    using Parameters = std::variant<DirectScenario, TwoSlitScenario, HyperbolicUrnScenario>;

    static Scenario direct(ContextTriple truth);
    // Throws InvalidScenario unless m_j >= 0, m_j^2 <= 1, the phase is finite
    // and |a1 + a2|^2 <= 1.
    static Scenario two_slit(double a1_modulus, double a2_modulus, double phase);
    // Throws InvalidScenario unless p1 + p2 <= 1, both primed values are
    // positive and |lambda| > 1.
    static Scenario hyperbolic_urn(Probability p1, Probability p2,
                                   Probability p1_prime, Probability p2_prime);

    const Parameters& parameters() const noexcept { return parameters_; }

private:
    explicit Scenario(Parameters p) : parameters_(std::move(p)) {}
    Parameters parameters_;
};

ContextTriple scenario_truth(const Scenario& scenario);

// One independent Bernoulli run per context of the truth (S1/S2 included when
// defined). Context c draws from SplitMix64 keyed by (seed, c); one draw per
// trial, success iff the unit draw is below the probability.
CountTable sample_counts(const Scenario& scenario, std::uint64_t trials_per_context,
                         std::uint64_t seed);

struct Interval final {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
    bool operator==(const Interval&) const = default;
};

struct ContextEstimate final {
    ContextLabel context = ContextLabel::S;
    std::uint64_t successes = 0;
    std::uint64_t trials = 1;
    double p_hat = 0.0;
    std::optional<Interval> interval;
};

struct EstimationReport final {
    TransitionAnalysis point;
    std::vector<ContextEstimate> contexts;
    std::optional<Interval> lambda_interval;
    std::optional<double> regime_stability;
    std::optional<double> lambda_sd; // bootstrap standard deviations
    std::optional<double> theta_sd;
    double confidence = 0.95;
    std::uint64_t seed = 0;
    std::uint64_t replicates = 0;

    bool degenerate() const noexcept { return !point.lambda.has_value(); }
};

inline constexpr std::size_t kDefaultReplicates = 1000;
inline constexpr double kDefaultConfidence = 0.95;

// p_hat(s) - p_hat(a) - p_hat(b) formed over a common integer denominator and
// rounded once; exactly 0 when the proportions are exactly additive.
double proportion_difference(const CountRow& s, const CountRow& a, const CountRow& b);

// Point analysis of the S/S1p/S2p counts. delta is evaluated from the integer
// counts before rounding, so exactly additive counts give delta == 0.
TransitionAnalysis analyze_counts(const CountTable& counts);

// Parametric bootstrap: each replicate redraws every context's successes
// from Binomial(trials, p_hat) on its own substream keyed by (seed, replicate
// index). Intervals are empirical quantiles with linear interpolation.
EstimationReport estimate(const CountTable& counts,
                          std::size_t replicates = kDefaultReplicates,
                          double confidence = kDefaultConfidence,
                          std::uint64_t seed = 0);

// |theta_hat - true_theta|. Throws RegimeMismatch when the point regime is
// not of the expected kind.
double theta_recovery_error(double true_theta, RegimeKind expected,
                            const EstimationReport& report);

// Empirical quantile, linear interpolation between order statistics.
// `sorted` must be ascending and non-empty; q in [0,1].
double interpolated_quantile(const std::vector<double>& sorted, double q);

} // namespace ctxprob
