#include "ctxprob/data.hpp"

#include "ctxprob/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace ctxprob {

using Json = nlohmann::ordered_json;

namespace {

std::string_view trim(std::string_view s) noexcept {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return lines;
}

bool skippable(std::string_view line) noexcept {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

std::uint64_t parse_count(std::string_view field, std::size_t line, std::string_view what) {
    const auto t = trim(field);
    std::uint64_t value = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
        throw ParseError(ParseErrorKind::BadInteger, line,
                         std::string(what) + " '" + std::string(t) +
                             "' is not a non-negative integer");
    }
    return value;
}

// -----------------------------
// Canonical JSON writer
// -----------------------------

std::string format_double(double x) {
    if (!std::isfinite(x)) {
        throw Error(ErrorKind::NonFinite, "report contains a non-finite number");
    }
    std::string s = format_number(x);
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

bool is_scalar_array(const Json& j) {
    return std::none_of(j.begin(), j.end(),
                        [](const Json& e) { return e.is_object() || e.is_array(); });
}

void emit(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(depth + 1) * 2, ' ');
    const std::string close_pad(static_cast<std::size_t>(depth) * 2, ' ');
    switch (j.type()) {
    case Json::value_t::object: {
        if (j.empty()) { out += "{}"; return; }
        out += "{\n";
        bool first = true;
        for (const auto& [key, value] : j.items()) {
            if (!first) out += ",\n";
            first = false;
            out += pad + Json(key).dump() + ": ";
            emit(value, out, depth + 1);
        }
        out += "\n" + close_pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (j.empty()) { out += "[]"; return; }
        if (is_scalar_array(j)) {
            out += "[";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ", ";
                emit(j[i], out, depth + 1);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) out += ",\n";
            out += pad;
            emit(j[i], out, depth + 1);
        }
        out += "\n" + close_pad + "]";
        return;
    }
    case Json::value_t::number_float:
        out += format_double(j.get<double>());
        return;
    default:
        out += j.dump();
        return;
    }
}

// -----------------------------
// Document <-> tree
// -----------------------------

template <class T>
Json optional_json(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json interval_json(const std::optional<Interval>& v) {
    return v ? Json::array({v->lo, v->hi}) : Json(nullptr);
}

Json regime_json(const Regime& regime) {
    Json j;
    j["tag"] = std::string(to_string(kind_of(regime)));
    if (const auto* t = std::get_if<Trigonometric>(&regime)) {
        j["theta"] = t->theta;
    } else if (const auto* h = std::get_if<Hyperbolic>(&regime)) {
        j["sign"] = h->sign;
        j["theta"] = h->theta;
    } else {
        j["reason"] = std::string(to_string(std::get<Degenerate>(regime).reason));
    }
    return j;
}

Json to_json(const ReportDocument& doc) {
    Json j;
    j["schema_version"] = doc.schema_version;
    Json inputs = Json::array();
    for (const ReportInput& in : doc.inputs) {
        Json row;
        row["context"] = std::string(to_string(in.context));
        row["p_hat"] = in.p_hat;
        row["successes"] = optional_json(in.successes);
        row["trials"] = optional_json(in.trials);
        row["interval"] = interval_json(in.interval);
        inputs.push_back(std::move(row));
    }
    j["inputs"] = std::move(inputs);
    j["delta"] = doc.delta;
    j["lambda"] = optional_json(doc.lambda);
    j["regime"] = regime_json(doc.regime);
    j["lambda_interval"] = interval_json(doc.lambda_interval);
    j["regime_stability"] = optional_json(doc.regime_stability);
    j["additivity_check"] = {{"present", doc.additivity_check.present},
                             {"z_statistic", optional_json(doc.additivity_check.z_statistic)},
                             {"consistent", optional_json(doc.additivity_check.consistent)}};
    if (doc.wave) {
        j["wave"] = {{"kind", doc.wave->kind},
                     {"components", Json::array({doc.wave->first, doc.wave->second})}};
    } else {
        j["wave"] = nullptr;
    }
    j["reproducibility"] = {{"seed", optional_json(doc.reproducibility.seed)},
                            {"replicates", doc.reproducibility.replicates},
                            {"generator_name", doc.reproducibility.generator_name}};
    return j;
}

[[noreturn]] void bad_document(const std::string& message) {
    throw ParseError(ParseErrorKind::InvalidDocument, 0, message);
}

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) bad_document(std::string("missing key '") + key + "'");
    return j.at(key);
}

double as_double(const Json& j, const char* what) {
    if (!j.is_number()) bad_document(std::string(what) + " is not a number");
    return j.get<double>();
}

std::uint64_t as_count(const Json& j, const char* what) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        bad_document(std::string(what) + " is not a non-negative integer");
    }
    return j.get<std::uint64_t>();
}

std::optional<double> opt_double(const Json& j, const char* what) {
    if (j.is_null()) return std::nullopt;
    return as_double(j, what);
}

std::optional<std::uint64_t> opt_count(const Json& j, const char* what) {
    if (j.is_null()) return std::nullopt;
    return as_count(j, what);
}

std::optional<Interval> opt_interval(const Json& j, const char* what) {
    if (j.is_null()) return std::nullopt;
    if (!j.is_array() || j.size() != 2) bad_document(std::string(what) + " is not a pair");
    return Interval{as_double(j[0], what), as_double(j[1], what)};
}

std::string as_string(const Json& j, const char* what) {
    if (!j.is_string()) bad_document(std::string(what) + " is not a string");
    return j.get<std::string>();
}

Regime regime_from_json(const Json& j) {
    const std::string tag = as_string(field(j, "tag"), "regime.tag");
    if (tag == to_string(RegimeKind::Trigonometric)) {
        return Trigonometric{as_double(field(j, "theta"), "regime.theta")};
    }
    if (tag == to_string(RegimeKind::Hyperbolic)) {
        const Json& sign = field(j, "sign");
        if (!sign.is_number_integer() || (sign.get<int>() != 1 && sign.get<int>() != -1)) {
            bad_document("regime.sign must be +1 or -1");
        }
        return Hyperbolic{sign.get<int>(), as_double(field(j, "theta"), "regime.theta")};
    }
    if (tag == to_string(RegimeKind::Degenerate)) {
        const std::string reason = as_string(field(j, "reason"), "regime.reason");
        for (auto r : {DegenerateReason::FirstSubcontextZero, DegenerateReason::SecondSubcontextZero,
                       DegenerateReason::BothSubcontextsZero}) {
            if (reason == to_string(r)) return Degenerate{r};
        }
        bad_document("unknown degenerate reason '" + reason + "'");
    }
    bad_document("unknown regime tag '" + tag + "'");
}

ReportDocument from_json(const Json& j) {
    ReportDocument doc;
    doc.schema_version = as_string(field(j, "schema_version"), "schema_version");
    const Json& inputs = field(j, "inputs");
    if (!inputs.is_array()) bad_document("inputs is not an array");
    for (const Json& row : inputs) {
        ReportInput in;
        const auto label = parse_context_label(as_string(field(row, "context"), "context"));
        if (!label) bad_document("unknown context label in inputs");
        in.context = *label;
        in.p_hat = as_double(field(row, "p_hat"), "p_hat");
        in.successes = opt_count(field(row, "successes"), "successes");
        in.trials = opt_count(field(row, "trials"), "trials");
        in.interval = opt_interval(field(row, "interval"), "interval");
        doc.inputs.push_back(in);
    }
    doc.delta = as_double(field(j, "delta"), "delta");
    doc.lambda = opt_double(field(j, "lambda"), "lambda");
    doc.regime = regime_from_json(field(j, "regime"));
    doc.lambda_interval = opt_interval(field(j, "lambda_interval"), "lambda_interval");
    doc.regime_stability = opt_double(field(j, "regime_stability"), "regime_stability");

    const Json& add = field(j, "additivity_check");
    const Json& present = field(add, "present");
    if (!present.is_boolean()) bad_document("additivity_check.present is not a boolean");
    doc.additivity_check.present = present.get<bool>();
    doc.additivity_check.z_statistic = opt_double(field(add, "z_statistic"), "z_statistic");
    const Json& consistent = field(add, "consistent");
    if (!consistent.is_null()) {
        if (!consistent.is_boolean()) bad_document("additivity_check.consistent is not a boolean");
        doc.additivity_check.consistent = consistent.get<bool>();
    }

    const Json& wave = field(j, "wave");
    if (!wave.is_null()) {
        const Json& c = field(wave, "components");
        if (!c.is_array() || c.size() != 2) bad_document("wave.components is not a pair");
        doc.wave = WaveEntry{as_string(field(wave, "kind"), "wave.kind"),
                             as_double(c[0], "wave.components"),
                             as_double(c[1], "wave.components")};
    }

    const Json& rep = field(j, "reproducibility");
    doc.reproducibility.seed = opt_count(field(rep, "seed"), "seed");
    doc.reproducibility.replicates = as_count(field(rep, "replicates"), "replicates");
    doc.reproducibility.generator_name = as_string(field(rep, "generator_name"), "generator_name");
    return doc;
}

WaveEntry wave_entry(const Wave& wave) {
    if (const auto* c = std::get_if<ComplexAmplitude>(&wave)) return {"complex", c->re, c->im};
    const auto& s = std::get<SplitComplexAmplitude>(wave);
    return {"split-complex", s.re, s.hy};
}

} // namespace

std::string_view to_string(ParseErrorKind kind) noexcept {
    switch (kind) {
    case ParseErrorKind::MissingHeader: return "missing_header";
    case ParseErrorKind::BadHeader: return "bad_header";
    case ParseErrorKind::MalformedRow: return "malformed_row";
    case ParseErrorKind::BadInteger: return "bad_integer";
    case ParseErrorKind::UnknownLabel: return "unknown_label";
    case ParseErrorKind::DuplicateLabel: return "duplicate_label";
    case ParseErrorKind::MissingLabel: return "missing_label";
    case ParseErrorKind::UnpairedReference: return "unpaired_reference";
    case ParseErrorKind::SuccessesExceedTrials: return "successes_exceed_trials";
    case ParseErrorKind::ZeroTrials: return "zero_trials";
    case ParseErrorKind::InvalidDocument: return "invalid_document";
    }
    return "unknown";
}

ParseError::ParseError(ParseErrorKind kind, std::size_t line, const std::string& message)
    : Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + message),
      parse_kind_(kind),
      line_(line) {}

CountFile parse_counts(std::string_view text, std::string source) {
    if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
    const auto lines = split_lines(text);

    std::size_t i = 0;
    while (i < lines.size() && skippable(lines[i])) ++i;
    if (i == lines.size()) {
        throw ParseError(ParseErrorKind::MissingHeader, std::max<std::size_t>(lines.size(), 1),
                         "expected header '" + std::string(kCountHeader) + "'");
    }
    if (trim(lines[i]) != kCountHeader) {
        throw ParseError(ParseErrorKind::BadHeader, i + 1,
                         "expected header '" + std::string(kCountHeader) + "', got '" +
                             std::string(lines[i]) + "'");
    }

    std::vector<CountRow> rows;
    std::vector<std::pair<ContextLabel, std::size_t>> row_lines;
    for (++i; i < lines.size(); ++i) {
        if (skippable(lines[i])) continue;
        const std::size_t line_no = i + 1;

        std::array<std::string_view, 3> fields;
        std::string_view rest = lines[i];
        std::size_t n = 0;
        for (;;) {
            const auto comma = rest.find(',');
            if (n == fields.size()) { n = fields.size() + 1; break; }
            fields[n++] = rest.substr(0, comma);
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (n != fields.size()) {
            throw ParseError(ParseErrorKind::MalformedRow, line_no,
                             "expected 3 comma-separated fields");
        }

        const auto label = parse_context_label(trim(fields[0]));
        if (!label) {
            throw ParseError(ParseErrorKind::UnknownLabel, line_no,
                             "unknown context '" + std::string(trim(fields[0])) + "'");
        }
        const std::uint64_t successes = parse_count(fields[1], line_no, "successes");
        const std::uint64_t trials = parse_count(fields[2], line_no, "trials");
        if (trials == 0) {
            throw ParseError(ParseErrorKind::ZeroTrials, line_no, "trials must be positive");
        }
        if (successes > trials) {
            throw ParseError(ParseErrorKind::SuccessesExceedTrials, line_no,
                             "successes " + std::to_string(successes) + " > trials " +
                                 std::to_string(trials));
        }
        for (const auto& [seen, where] : row_lines) {
            if (seen == *label) {
                throw ParseError(ParseErrorKind::DuplicateLabel, line_no,
                                 "context " + std::string(to_string(seen)) +
                                     " already given on line " + std::to_string(where));
            }
        }
        rows.push_back({*label, successes, trials});
        row_lines.emplace_back(*label, line_no);
    }

    const std::size_t last_line = std::max<std::size_t>(lines.size(), 1);
    auto has = [&](ContextLabel l) {
        return std::any_of(rows.begin(), rows.end(), [l](const CountRow& r) { return r.context == l; });
    };
    for (ContextLabel required : {ContextLabel::S, ContextLabel::S1p, ContextLabel::S2p}) {
        if (!has(required)) {
            throw ParseError(ParseErrorKind::MissingLabel, last_line,
                             "missing required context " + std::string(to_string(required)));
        }
    }
    if (has(ContextLabel::S1) != has(ContextLabel::S2)) {
        throw ParseError(ParseErrorKind::UnpairedReference, last_line,
                         "S1 and S2 must be given together");
    }
    std::sort(row_lines.begin(), row_lines.end());
    return CountFile{CountTable(std::move(rows)), std::move(source), std::move(row_lines)};
}

CountFile read_counts_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_counts(buf.str(), path.string());
}

std::string write_counts(const CountTable& table) {
    std::string out(kCountHeader);
    out += '\n';
    for (const CountRow& row : table.rows()) {
        out += std::string(to_string(row.context)) + ',' + std::to_string(row.successes) + ',' +
               std::to_string(row.trials) + '\n';
    }
    return out;
}

std::optional<AdditivityResult> additivity_check(const CountTable& counts, double threshold) {
    if (!counts.contains(ContextLabel::S1) || !counts.contains(ContextLabel::S2)) {
        return std::nullopt;
    }
    const CountRow& s = counts.at(ContextLabel::S);
    const CountRow& s1 = counts.at(ContextLabel::S1);
    const CountRow& s2 = counts.at(ContextLabel::S2);

    auto variance = [](const CountRow& r) {
        const double p = r.p_hat();
        return p * (1.0 - p) / static_cast<double>(r.trials);
    };
    const double difference = proportion_difference(s, s1, s2);
    // Grouped so that swapping S1 and S2 gives a bit-identical z.
    const double total_variance = variance(s) + (variance(s1) + variance(s2));
    if (total_variance == 0.0) {
        if (difference != 0.0) {
            throw Error(ErrorKind::DegenerateVariance,
                        "all proportions are 0 or 1 and P(B|S) != P(B|S1) + P(B|S2)");
        }
        return AdditivityResult{0.0, true};
    }
    const double z = difference / std::sqrt(total_variance);
    return AdditivityResult{z, std::abs(z) <= threshold};
}

ReportDocument make_report(const ContextTriple& triple) {
    ReportDocument doc;
    auto add = [&](ContextLabel label, Probability p) {
        doc.inputs.push_back({label, p.value(), std::nullopt, std::nullopt, std::nullopt});
    };
    add(ContextLabel::S, triple.p_s());
    if (triple.has_reference_split()) {
        add(ContextLabel::S1, *triple.p1());
        add(ContextLabel::S2, *triple.p2());
        // Exact inputs already passed the additivity tolerance on construction.
        doc.additivity_check = {true, std::nullopt, true};
    }
    add(ContextLabel::S1p, triple.p1_prime());
    add(ContextLabel::S2p, triple.p2_prime());

    const TransitionAnalysis analysis = analyze(triple);
    doc.delta = analysis.delta;
    doc.lambda = analysis.lambda;
    doc.regime = analysis.regime;
    if (analysis.lambda) {
        doc.wave = wave_entry(wave_from_analysis(triple.p1_prime(), triple.p2_prime(), analysis));
    }
    doc.reproducibility = {std::nullopt, 0, std::string(SplitMix64::name)};
    return doc;
}

ReportDocument make_report(const CountTable& counts, const EstimationReport& estimate,
                           double additivity_threshold) {
    ReportDocument doc;
    for (const ContextEstimate& c : estimate.contexts) {
        doc.inputs.push_back({c.context, c.p_hat, c.successes, c.trials, c.interval});
    }
    doc.delta = estimate.point.delta;
    doc.lambda = estimate.point.lambda;
    doc.regime = estimate.point.regime;
    doc.lambda_interval = estimate.lambda_interval;
    doc.regime_stability = estimate.regime_stability;

    try {
        if (const auto check = additivity_check(counts, additivity_threshold)) {
            doc.additivity_check = {true, check->z_statistic, check->consistent};
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateVariance) throw;
        doc.additivity_check = {true, std::nullopt, false};
    }

    if (estimate.point.lambda) {
        const Probability p1_prime(counts.at(ContextLabel::S1p).p_hat());
        const Probability p2_prime(counts.at(ContextLabel::S2p).p_hat());
        doc.wave = wave_entry(wave_from_analysis(p1_prime, p2_prime, estimate.point));
    }
    doc.reproducibility = {estimate.seed, estimate.replicates, std::string(SplitMix64::name)};
    return doc;
}

std::string format_number(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                   std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

std::string write_report(const ReportDocument& doc) {
    std::string out;
    emit(to_json(doc), out, 0);
    out += '\n';
    return out;
}

ReportDocument parse_report(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = 1 + static_cast<std::size_t>(
                                  std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n'));
        throw ParseError(ParseErrorKind::InvalidDocument, line, e.what());
    }
    return from_json(j);
}

void write_file_atomically(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.close();
        if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot replace " + path.string());
    }
}

} // namespace ctxprob
