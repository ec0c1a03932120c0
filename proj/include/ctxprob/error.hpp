#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ctxprob {

enum class ErrorKind : std::uint8_t {
    ProbabilityOutOfRange,
    AdditivityViolated,
    MismatchedSubcontexts,
    DegenerateDenominator,
    NonFinite,
    InadmissibleLambda,
    InvalidPerturbedProbability,
    DegenerateRegime,
    InvalidScenario,
    ZeroTrials,
    InvalidCountTable,
    RegimeMismatch,
    DegenerateVariance,
    ParseError,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure in the library is reported through this type; `kind` is the
// machine-readable part, what() the human-readable one.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace ctxprob
