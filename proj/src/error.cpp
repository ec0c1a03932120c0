#include "ctxprob/error.hpp"

namespace ctxprob {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::ProbabilityOutOfRange: return "probability_out_of_range";
    case ErrorKind::AdditivityViolated: return "additivity_violated";
    case ErrorKind::MismatchedSubcontexts: return "mismatched_subcontexts";
    case ErrorKind::DegenerateDenominator: return "degenerate_denominator";
    case ErrorKind::NonFinite: return "non_finite";
    case ErrorKind::InadmissibleLambda: return "inadmissible_lambda";
    case ErrorKind::InvalidPerturbedProbability: return "invalid_perturbed_probability";
    case ErrorKind::DegenerateRegime: return "degenerate_regime";
    case ErrorKind::InvalidScenario: return "invalid_scenario";
    case ErrorKind::ZeroTrials: return "zero_trials";
    case ErrorKind::InvalidCountTable: return "invalid_count_table";
    case ErrorKind::RegimeMismatch: return "regime_mismatch";
    case ErrorKind::DegenerateVariance: return "degenerate_variance";
    case ErrorKind::ParseError: return "parse_error";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace ctxprob
