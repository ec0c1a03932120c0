#include "ctxprob/simulation.hpp"

#include "ctxprob/rng.hpp"

#include <boost/random/binomial_distribution.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace ctxprob {

namespace {

// Keeps bootstrap streams disjoint from the per-context sampling streams.
constexpr std::uint64_t kBootstrapDomain = 0x626f6f7473747261ULL; // "bootstra"

std::size_t index_of(ContextLabel label) noexcept { return static_cast<std::size_t>(label); }

double probability_of(const ContextTriple& truth, ContextLabel label) {
    switch (label) {
    case ContextLabel::S: return truth.p_s().value();
    case ContextLabel::S1: return truth.p1()->value();
    case ContextLabel::S2: return truth.p2()->value();
    case ContextLabel::S1p: return truth.p1_prime().value();
    case ContextLabel::S2p: return truth.p2_prime().value();
    }
    return 0.0;
}

std::uint64_t bernoulli_successes(double p, std::uint64_t trials, SplitMix64& gen) {
    std::uint64_t successes = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
        successes += gen.next_unit() < p ? 1U : 0U;
    }
    return successes;
}

__extension__ typedef __int128 Wide;

} // namespace

double proportion_difference(const CountRow& s, const CountRow& a, const CountRow& b) {
    const int bits = std::bit_width(s.trials) + std::bit_width(a.trials) +
                     std::bit_width(b.trials) + 2;
    if (bits > 126) return s.p_hat() - (a.p_hat() + b.p_hat());

    const Wide ns = s.trials;
    const Wide na = a.trials;
    const Wide nb = b.trials;
    const Wide numerator = static_cast<Wide>(s.successes) * na * nb -
                           static_cast<Wide>(a.successes) * ns * nb -
                           static_cast<Wide>(b.successes) * ns * na;
    if (numerator == 0) return 0.0;
    return static_cast<double>(static_cast<long double>(numerator) /
                               static_cast<long double>(ns * na * nb));
}

namespace {

TransitionAnalysis analyze_rows(const CountRow& s, const CountRow& a, const CountRow& b) {
    const Probability p1_prime(a.p_hat());
    const Probability p2_prime(b.p_hat());
    TransitionAnalysis out = analyze(ContextTriple(Probability(s.p_hat()), p1_prime, p2_prime));
    out.delta = proportion_difference(s, a, b);
    if (out.lambda) {
        out.lambda = lambda_coefficient(out.delta, p1_prime, p2_prime);
        out.regime = classify(*out.lambda);
    }
    return out;
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

Interval quantile_interval(std::vector<double>& xs, double confidence) {
    std::sort(xs.begin(), xs.end());
    const double tail = (1.0 - confidence) / 2.0;
    return {interpolated_quantile(xs, tail), interpolated_quantile(xs, 1.0 - tail)};
}

} // namespace

std::string_view to_string(ContextLabel label) noexcept {
    switch (label) {
    case ContextLabel::S: return "S";
    case ContextLabel::S1: return "S1";
    case ContextLabel::S2: return "S2";
    case ContextLabel::S1p: return "S1p";
    case ContextLabel::S2p: return "S2p";
    }
    return "?";
}

std::optional<ContextLabel> parse_context_label(std::string_view text) noexcept {
    for (ContextLabel label : kAllContexts) {
        if (to_string(label) == text) return label;
    }
    return std::nullopt;
}

CountTable::CountTable(std::vector<CountRow> rows) : rows_(std::move(rows)) {
    std::array<bool, kAllContexts.size()> seen{};
    for (const CountRow& row : rows_) {
        if (row.trials == 0) {
            throw Error(ErrorKind::ZeroTrials,
                        "context " + std::string(to_string(row.context)) + " has zero trials");
        }
        if (row.successes > row.trials) {
            throw Error(ErrorKind::InvalidCountTable,
                        "context " + std::string(to_string(row.context)) +
                            " has more successes than trials");
        }
        if (seen[index_of(row.context)]) {
            throw Error(ErrorKind::InvalidCountTable,
                        "duplicate context " + std::string(to_string(row.context)));
        }
        seen[index_of(row.context)] = true;
    }
    for (ContextLabel required : {ContextLabel::S, ContextLabel::S1p, ContextLabel::S2p}) {
        if (!seen[index_of(required)]) {
            throw Error(ErrorKind::InvalidCountTable,
                        "missing required context " + std::string(to_string(required)));
        }
    }
    if (seen[index_of(ContextLabel::S1)] != seen[index_of(ContextLabel::S2)]) {
        throw Error(ErrorKind::InvalidCountTable, "S1 and S2 must be given together");
    }
    std::sort(rows_.begin(), rows_.end(),
              [](const CountRow& l, const CountRow& r) { return l.context < r.context; });
}

bool CountTable::contains(ContextLabel label) const noexcept {
    return std::any_of(rows_.begin(), rows_.end(),
                       [label](const CountRow& r) { return r.context == label; });
}

const CountRow& CountTable::at(ContextLabel label) const {
    for (const CountRow& row : rows_) {
        if (row.context == label) return row;
    }
    throw Error(ErrorKind::InvalidCountTable,
                "no row for context " + std::string(to_string(label)));
}

Scenario Scenario::direct(ContextTriple truth) { return Scenario(DirectScenario{truth}); }

Scenario Scenario::two_slit(double a1_modulus, double a2_modulus, double phase) {
    if (!std::isfinite(a1_modulus) || !std::isfinite(a2_modulus) || !std::isfinite(phase) ||
        a1_modulus < 0.0 || a2_modulus < 0.0) {
        throw Error(ErrorKind::InvalidScenario,
                    "two-slit moduli must be finite and >= 0, phase finite");
    }
    const TwoSlitScenario s{a1_modulus, a2_modulus, phase};
    try {
        (void)scenario_truth(Scenario(s));
    } catch (const Error& e) {
        throw Error(ErrorKind::InvalidScenario, std::string("two-slit: ") + e.what());
    }
    return Scenario(s);
}

Scenario Scenario::hyperbolic_urn(Probability p1, Probability p2,
                                  Probability p1_prime, Probability p2_prime) {
    const double sum = p1.value() + p2.value();
    if (sum > 1.0 + kDefaultTolerances.probability_roundoff) {
        throw Error(ErrorKind::InvalidScenario, "hyperbolic urn needs P(B|S1)+P(B|S2) <= 1");
    }
    if (p1_prime.value() == 0.0 || p2_prime.value() == 0.0) {
        throw Error(ErrorKind::InvalidScenario,
                    "hyperbolic urn needs positive P(B|S1') and P(B|S2')");
    }
    const double lambda = lambda_coefficient(delta_componentwise(p1, p2, p1_prime, p2_prime),
                                             p1_prime, p2_prime);
    if (!(std::abs(lambda) > 1.0)) {
        throw Error(ErrorKind::InvalidScenario,
                    "hyperbolic urn has |lambda| = " + std::to_string(std::abs(lambda)) +
                        " <= 1");
    }
    return Scenario(HyperbolicUrnScenario{p1, p2, p1_prime, p2_prime});
}

ContextTriple scenario_truth(const Scenario& scenario) {
    const auto& params = scenario.parameters();
    if (const auto* d = std::get_if<DirectScenario>(&params)) return d->truth;
    if (const auto* t = std::get_if<TwoSlitScenario>(&params)) {
        const double p1 = t->a1_modulus * t->a1_modulus;
        const double p2 = t->a2_modulus * t->a2_modulus;
        const double both = p1 + p2 + 2.0 * t->a1_modulus * t->a2_modulus * std::cos(t->phase);
        return ContextTriple(Probability(both), Probability(p1), Probability(p2));
    }
    const auto& u = std::get<HyperbolicUrnScenario>(params);
    return ContextTriple(Probability(u.p1.value() + u.p2.value()), u.p1_prime, u.p2_prime,
                         u.p1, u.p2);
}

CountTable sample_counts(const Scenario& scenario, std::uint64_t trials_per_context,
                         std::uint64_t seed) {
    if (trials_per_context == 0) {
        throw Error(ErrorKind::ZeroTrials, "trials per context must be >= 1");
    }
    const ContextTriple truth = scenario_truth(scenario);
    std::vector<CountRow> rows;
    for (ContextLabel label : kAllContexts) {
        const bool reference = label == ContextLabel::S1 || label == ContextLabel::S2;
        if (reference && !truth.has_reference_split()) continue;
        SplitMix64 gen(substream_key(seed, index_of(label)));
        rows.push_back({label,
                        bernoulli_successes(probability_of(truth, label), trials_per_context, gen),
                        trials_per_context});
    }
    return CountTable(std::move(rows));
}

TransitionAnalysis analyze_counts(const CountTable& counts) {
    return analyze_rows(counts.at(ContextLabel::S), counts.at(ContextLabel::S1p),
                        counts.at(ContextLabel::S2p));
}

double interpolated_quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw Error(ErrorKind::InvalidArgument, "quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * std::clamp(q, 0.0, 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

EstimationReport estimate(const CountTable& counts, std::size_t replicates, double confidence,
                          std::uint64_t seed) {
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "confidence must lie in (0,1)");
    }
    for (const CountRow& row : counts.rows()) {
        if (row.trials == 0) throw Error(ErrorKind::ZeroTrials, "row with zero trials");
    }

    EstimationReport report;
    report.point = analyze_counts(counts);
    report.confidence = confidence;
    report.seed = seed;
    report.replicates = replicates;

    const auto& rows = counts.rows();
    for (const CountRow& row : rows) {
        report.contexts.push_back({row.context, row.successes, row.trials, row.p_hat(), {}});
    }
    if (replicates == 0) return report;

    std::vector<std::vector<double>> p_samples(rows.size());
    std::vector<double> lambdas;
    std::vector<double> thetas;
    std::size_t agreeing = 0;
    const RegimeKind point_kind = kind_of(report.point.regime);

    std::vector<CountRow> resampled = rows;
    for (std::size_t r = 0; r < replicates; ++r) {
        SplitMix64 gen(substream_key(seed ^ kBootstrapDomain, r));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const CountRow& row = rows[i];
            std::uint64_t successes = row.successes;
            if (row.successes != 0 && row.successes != row.trials) {
                boost::random::binomial_distribution<std::int64_t, double> draw(
                    static_cast<std::int64_t>(row.trials), row.p_hat());
                successes = static_cast<std::uint64_t>(draw(gen));
            }
            resampled[i].successes = successes;
            p_samples[i].push_back(resampled[i].p_hat());
        }
        const CountTable table(resampled);
        const TransitionAnalysis rep = analyze_counts(table);
        if (same_classification(rep.regime, report.point.regime)) ++agreeing;
        if (rep.lambda) {
            lambdas.push_back(*rep.lambda);
            if (kind_of(rep.regime) == point_kind) thetas.push_back(*phase_of(rep.regime));
        }
    }

    for (std::size_t i = 0; i < rows.size(); ++i) {
        report.contexts[i].interval = quantile_interval(p_samples[i], confidence);
    }
    report.regime_stability = static_cast<double>(agreeing) / static_cast<double>(replicates);

    if (report.point.lambda) {
        const double point = *report.point.lambda;
        Interval interval{point, point};
        if (!lambdas.empty()) {
            report.lambda_sd = sample_sd(lambdas);
            interval = quantile_interval(lambdas, confidence);
            interval.lo = std::min(interval.lo, point);
            interval.hi = std::max(interval.hi, point);
        }
        if (!thetas.empty()) report.theta_sd = sample_sd(thetas);
        report.lambda_interval = interval;
    }
    return report;
}

double theta_recovery_error(double true_theta, RegimeKind expected,
                            const EstimationReport& report) {
    const RegimeKind actual = kind_of(report.point.regime);
    if (actual != expected || actual == RegimeKind::Degenerate) {
        throw Error(ErrorKind::RegimeMismatch,
                    "expected " + std::string(to_string(expected)) + " regime, estimate is " +
                        std::string(to_string(actual)));
    }
    return std::abs(*phase_of(report.point.regime) - true_theta);
}

} // namespace ctxprob
