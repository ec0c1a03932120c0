#pragma once

// Count-file ingestion and analysis report documents.
//
// Count files are CSV:
//
//     context,successes,trials
//     S,9,10
//     S1p,1,10
//     S2p,1,10
//
// LF or CRLF line endings; blank lines and lines starting with '#' are
// skipped. Labels are S, S1, S2, S1p, S2p.

#include "ctxprob/amplitudes.hpp"
#include "ctxprob/simulation.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctxprob {

enum class ParseErrorKind : std::uint8_t {
    MissingHeader,
    BadHeader,
    MalformedRow,
    BadInteger,
    UnknownLabel,
    DuplicateLabel,
    MissingLabel,
    UnpairedReference,
    SuccessesExceedTrials,
    ZeroTrials,
    InvalidDocument,
};

std::string_view to_string(ParseErrorKind kind) noexcept;

class ParseError final : public Error {
public:
    ParseError(ParseErrorKind kind, std::size_t line, const std::string& message);

    ParseErrorKind parse_kind() const noexcept { return parse_kind_; }
    std::size_t line() const noexcept { return line_; }

private:
    ParseErrorKind parse_kind_;
    std::size_t line_;
};

struct CountFile final {
    CountTable table;
    std::string source;
    std::vector<std::pair<ContextLabel, std::size_t>> row_lines; // 1-based
};

inline constexpr std::string_view kCountHeader = "context,successes,trials";

CountFile parse_counts(std::string_view text, std::string source = "<input>");
CountFile read_counts_file(const std::filesystem::path& path);

// Header plus one row per context in canonical order, LF line endings.
std::string write_counts(const CountTable& table);

struct AdditivityResult final {
    double z_statistic = 0.0;
    bool consistent = true;
};

inline constexpr double kDefaultAdditivityThreshold = 3.0;

// z = (p_S - p_S1 - p_S2) / sqrt(v_S + v_S1 + v_S2), v = p(1-p)/n.
// Absent without S1/S2. Throws DegenerateVariance when every variance is
// zero but the difference is not.
std::optional<AdditivityResult> additivity_check(
    const CountTable& counts, double threshold = kDefaultAdditivityThreshold);

inline constexpr std::string_view kReportSchemaVersion = "1";

struct ReportInput final {
    ContextLabel context = ContextLabel::S;
    double p_hat = 0.0;
    std::optional<std::uint64_t> successes;
    std::optional<std::uint64_t> trials;
    std::optional<Interval> interval;
    bool operator==(const ReportInput&) const = default;
};

struct AdditivityEntry final {
    bool present = false;
    std::optional<double> z_statistic;
    std::optional<bool> consistent;
    bool operator==(const AdditivityEntry&) const = default;
};

struct WaveEntry final {
    std::string kind; // "complex" or "split-complex"
    double first = 0.0;
    double second = 0.0;
    bool operator==(const WaveEntry&) const = default;
};

struct Reproducibility final {
    std::optional<std::uint64_t> seed;
    std::uint64_t replicates = 0;
    std::string generator_name;
    bool operator==(const Reproducibility&) const = default;
};

struct ReportDocument final {
    std::string schema_version{kReportSchemaVersion};
    std::vector<ReportInput> inputs;
    double delta = 0.0;
    std::optional<double> lambda;
    Regime regime = Degenerate{};
    std::optional<Interval> lambda_interval;
    std::optional<double> regime_stability;
    AdditivityEntry additivity_check;
    std::optional<WaveEntry> wave;
    Reproducibility reproducibility;

    bool operator==(const ReportDocument&) const = default;
};

// Report for an exact triple: no intervals, no counts.
ReportDocument make_report(const ContextTriple& triple);

// Report for counts plus their bootstrap estimate.
ReportDocument make_report(const CountTable& counts, const EstimationReport& estimate,
                           double additivity_threshold = kDefaultAdditivityThreshold);

// Canonical JSON: fixed key order, two-space indent, doubles with 17
// significant digits, trailing newline.
std::string write_report(const ReportDocument& doc);

// Throws ParseError(InvalidDocument) on malformed input.
ReportDocument parse_report(std::string_view text);

// Same text as printf("%.17g").
std::string format_number(double x);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

} // namespace ctxprob
