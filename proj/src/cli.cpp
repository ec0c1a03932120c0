#include "ctxprob/cli.hpp"

#include "ctxprob/data.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

namespace ctxprob::cli {

namespace {

// Raised for command-line misuse that CLI11 itself cannot detect.
struct UsageError {
    std::string message;
};

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::ParseError:
    case ErrorKind::Io:
    case ErrorKind::InvalidCountTable:
    case ErrorKind::ZeroTrials:
        return kDataError;
    case ErrorKind::MismatchedSubcontexts:
    case ErrorKind::InvalidArgument:
        return kUsage;
    default:
        return kInadmissible;
    }
}

void emit_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path == "-") {
        out << text;
        out.flush();
    } else {
        write_file_atomically(path, text);
    }
}

std::optional<Probability> optional_probability(const CLI::Option* opt, double value) {
    if (opt->count() == 0) return std::nullopt;
    return Probability(value);
}

Probability required_probability(const CLI::Option* opt, double value) {
    if (opt->count() == 0) throw UsageError{opt->get_name() + " is required"};
    return Probability(value);
}

std::string regime_fields(const TransitionAnalysis& a) {
    std::string s = "lambda=" + (a.lambda ? format_number(*a.lambda) : std::string("null"));
    s += " regime=" + std::string(to_string(kind_of(a.regime)));
    if (const auto* t = std::get_if<Trigonometric>(&a.regime)) {
        s += " theta=" + format_number(t->theta);
    } else if (const auto* h = std::get_if<Hyperbolic>(&a.regime)) {
        s += " sign=" + std::string(h->sign > 0 ? "+1" : "-1");
        s += " theta=" + format_number(h->theta);
    } else {
        s += " reason=" + std::string(to_string(std::get<Degenerate>(a.regime).reason));
    }
    return s;
}

std::string truth_line(const ContextTriple& truth) {
    std::string s = "truth p_s=" + format_number(truth.p_s().value());
    if (truth.has_reference_split()) {
        s += " p1=" + format_number(truth.p1()->value());
        s += " p2=" + format_number(truth.p2()->value());
    }
    s += " p1p=" + format_number(truth.p1_prime().value());
    s += " p2p=" + format_number(truth.p2_prime().value());
    const TransitionAnalysis a = analyze(truth);
    s += " delta=" + format_number(a.delta) + " " + regime_fields(a);
    return s;
}

struct AnalyzeArgs {
    std::string input;
    double p_s = 0, p1p = 0, p2p = 0, p1 = 0, p2 = 0;
    CLI::Option *input_opt{}, *p_s_opt{}, *p1p_opt{}, *p2p_opt{}, *p1_opt{}, *p2_opt{};
    std::size_t replicates = kDefaultReplicates;
    double confidence = kDefaultConfidence;
    std::uint64_t seed = 0;
    std::string output = "-";
};

int cmd_analyze(const AnalyzeArgs& a, std::istream& in, std::ostream& out) {
    const bool file = a.input_opt->count() > 0;
    const bool direct = a.p_s_opt->count() + a.p1p_opt->count() + a.p2p_opt->count() +
                            a.p1_opt->count() + a.p2_opt->count() > 0;
    if (file == direct) {
        throw UsageError{"give exactly one of --input or the direct --p-s/--p1p/--p2p flags"};
    }
    if (!(a.confidence > 0.0 && a.confidence < 1.0)) {
        throw UsageError{"--confidence must lie in (0,1)"};
    }

    ReportDocument doc;
    if (file) {
        CountFile counts = [&] {
            if (a.input != "-") return read_counts_file(a.input);
            std::ostringstream buf;
            buf << in.rdbuf();
            return parse_counts(buf.str(), "<stdin>");
        }();
        const EstimationReport report =
            estimate(counts.table, a.replicates, a.confidence, a.seed);
        doc = make_report(counts.table, report);
    } else {
        const Probability p_s = required_probability(a.p_s_opt, a.p_s);
        const Probability p1p = required_probability(a.p1p_opt, a.p1p);
        const Probability p2p = required_probability(a.p2p_opt, a.p2p);
        const auto triple = ContextTriple::from_optional(
            p_s, p1p, p2p, optional_probability(a.p1_opt, a.p1),
            optional_probability(a.p2_opt, a.p2));
        doc = make_report(triple);
    }
    emit_output(a.output, write_report(doc), out);
    return kOk;
}

struct SimulateArgs {
    double p1 = 0, p2 = 0, p1p = 0, p2p = 0, p_s = 0, theta = 0;
    CLI::Option *p1_opt{}, *p2_opt{}, *p1p_opt{}, *p2p_opt{}, *p_s_opt{}, *theta_opt{};
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    std::string output = "-";
};

int cmd_simulate(const std::string& kind, const SimulateArgs& a, std::ostream& out,
                 std::ostream& err) {
    if (a.trials == 0) throw UsageError{"--trials must be >= 1"};

    std::optional<Scenario> scenario;
    try {
        if (kind == "two-slit") {
            const double m1 = std::sqrt(required_probability(a.p1_opt, a.p1).value());
            const double m2 = std::sqrt(required_probability(a.p2_opt, a.p2).value());
            if (a.theta_opt->count() == 0) throw UsageError{"--theta is required"};
            scenario = Scenario::two_slit(m1, m2, a.theta);
        } else if (kind == "hyperbolic-urn") {
            scenario = Scenario::hyperbolic_urn(
                required_probability(a.p1_opt, a.p1), required_probability(a.p2_opt, a.p2),
                required_probability(a.p1p_opt, a.p1p), required_probability(a.p2p_opt, a.p2p));
        } else {
            scenario = Scenario::direct(ContextTriple::from_optional(
                required_probability(a.p_s_opt, a.p_s), required_probability(a.p1p_opt, a.p1p),
                required_probability(a.p2p_opt, a.p2p), optional_probability(a.p1_opt, a.p1),
                optional_probability(a.p2_opt, a.p2)));
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::MismatchedSubcontexts) throw;
        throw Error(ErrorKind::InvalidScenario, e.what());
    }

    const CountTable counts = sample_counts(*scenario, a.trials, a.seed);
    emit_output(a.output, write_counts(counts), out);
    err << truth_line(scenario_truth(*scenario)) << '\n';
    return kOk;
}

struct SweepArgs {
    double p1p = 0, p2p = 0, lambda_min = 0, lambda_max = 0;
    std::size_t steps = 0;
    std::string output = "-";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
    if (a.steps < 2) throw UsageError{"--steps must be >= 2"};
    if (!std::isfinite(a.lambda_min) || !std::isfinite(a.lambda_max) ||
        !(a.lambda_min < a.lambda_max)) {
        throw UsageError{"--lambda-min must be below --lambda-max"};
    }
    const Probability p1p(a.p1p);
    const Probability p2p(a.p2p);
    (void)lambda_range(p1p, p2p);
    // p_s is affine in lambda, so both endpoints admissible covers the grid.
    (void)reconstruct_probability(p1p, p2p, a.lambda_min);
    (void)reconstruct_probability(p1p, p2p, a.lambda_max);

    std::string csv = "lambda,theta,regime,p_s\n";
    const double span = a.lambda_max - a.lambda_min;
    for (std::size_t i = 0; i < a.steps; ++i) {
        const double lambda = i + 1 == a.steps
                                  ? a.lambda_max
                                  : a.lambda_min + span * static_cast<double>(i) /
                                                       static_cast<double>(a.steps - 1);
        const Regime regime = classify(lambda);
        const Probability p_s = reconstruct_probability(p1p, p2p, lambda);
        csv += format_number(lambda) + ',' + format_number(*phase_of(regime)) + ',' +
               std::string(to_string(kind_of(regime))) + ',' + format_number(p_s.value()) + '\n';
    }
    emit_output(a.output, csv, out);
    return kOk;
}

int cmd_range(double p1p_value, double p2p_value, std::ostream& out) {
    const Probability p1p(p1p_value);
    const Probability p2p(p2p_value);
    const LambdaRange range = lambda_range(p1p, p2p);
    out << "endpoint,lambda,regime\n";
    out << "min," << format_number(range.min) << ','
        << to_string(kind_of(classify(range.min))) << '\n';
    out << "max," << format_number(range.max) << ','
        << to_string(kind_of(classify(range.max))) << '\n';
    return kOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
    CLI::App app{"Contextual probability interference analysis"};
    app.name(args.empty() ? "ctxprob" : args.front());
    app.require_subcommand(1);

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "Analyze a count file or direct probabilities");
    an.input_opt = analyze_cmd->add_option("--input", an.input, "Count CSV ('-' for stdin)");
    an.p_s_opt = analyze_cmd->add_option("--p-s", an.p_s, "P(B|S)");
    an.p1p_opt = analyze_cmd->add_option("--p1p", an.p1p, "P(B|S1')");
    an.p2p_opt = analyze_cmd->add_option("--p2p", an.p2p, "P(B|S2')");
    an.p1_opt = analyze_cmd->add_option("--p1", an.p1, "P(B|S1)");
    an.p2_opt = analyze_cmd->add_option("--p2", an.p2, "P(B|S2)");
    analyze_cmd->add_option("--replicates", an.replicates, "Bootstrap replicates")
        ->capture_default_str();
    analyze_cmd->add_option("--confidence", an.confidence, "Interval confidence level")
        ->capture_default_str();
    analyze_cmd->add_option("--seed", an.seed, "Bootstrap seed")->capture_default_str();
    analyze_cmd->add_option("--output", an.output, "Report path ('-' for stdout)")
        ->capture_default_str();

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Sample a scenario into a count file");
    simulate_cmd->require_subcommand(1);
    auto add_common = [&sim](CLI::App* cmd) {
        cmd->add_option("--trials", sim.trials, "Trials per context")->required();
        cmd->add_option("--seed", sim.seed, "Sampling seed")->capture_default_str();
        cmd->add_option("--output", sim.output, "Count file path ('-' for stdout)")
            ->capture_default_str();
    };
    auto* two_slit = simulate_cmd->add_subcommand("two-slit", "Two-slit amplitudes");
    auto* urn = simulate_cmd->add_subcommand("hyperbolic-urn", "Urn with |lambda| > 1");
    auto* direct = simulate_cmd->add_subcommand("direct", "Given probabilities");
    for (auto* cmd : {two_slit, urn, direct}) add_common(cmd);
    sim.p1_opt = two_slit->add_option("--p1", sim.p1, "|a1|^2, slit 1 alone");
    sim.p2_opt = two_slit->add_option("--p2", sim.p2, "|a2|^2, slit 2 alone");
    sim.theta_opt = two_slit->add_option("--theta", sim.theta, "Relative phase");
    auto* urn_p1 = urn->add_option("--p1", sim.p1, "P(B|S1)");
    auto* urn_p2 = urn->add_option("--p2", sim.p2, "P(B|S2)");
    auto* urn_p1p = urn->add_option("--p1p", sim.p1p, "P(B|S1')");
    auto* urn_p2p = urn->add_option("--p2p", sim.p2p, "P(B|S2')");
    auto* d_ps = direct->add_option("--p-s", sim.p_s, "P(B|S)");
    auto* d_p1p = direct->add_option("--p1p", sim.p1p, "P(B|S1')");
    auto* d_p2p = direct->add_option("--p2p", sim.p2p, "P(B|S2')");
    auto* d_p1 = direct->add_option("--p1", sim.p1, "P(B|S1)");
    auto* d_p2 = direct->add_option("--p2", sim.p2, "P(B|S2)");

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Tabulate classification and P(B|S) over lambda");
    sweep_cmd->add_option("--p1p", sw.p1p, "P(B|S1')")->required();
    sweep_cmd->add_option("--p2p", sw.p2p, "P(B|S2')")->required();
    sweep_cmd->add_option("--lambda-min", sw.lambda_min, "Lowest lambda")->required();
    sweep_cmd->add_option("--lambda-max", sw.lambda_max, "Highest lambda")->required();
    sweep_cmd->add_option("--steps", sw.steps, "Grid points (>= 2)")->required();
    sweep_cmd->add_option("--output", sw.output, "CSV path ('-' for stdout)")
        ->capture_default_str();

    double range_p1p = 0, range_p2p = 0;
    auto* range_cmd = app.add_subcommand("range", "Admissible lambda interval");
    range_cmd->add_option("--p1p", range_p1p, "P(B|S1')")->required();
    range_cmd->add_option("--p2p", range_p2p, "P(B|S2')")->required();

    auto fail = [&err](int code, std::string_view kind, std::string_view message) {
        std::string flat(message);
        std::replace(flat.begin(), flat.end(), '\n', ' ');
        err << "error: " << kind << ": " << flat << '\n';
        return code;
    };

    try {
        std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
        std::reverse(rest.begin(), rest.end());
        app.parse(rest);

        if (analyze_cmd->parsed()) return cmd_analyze(an, in, out);
        if (simulate_cmd->parsed()) {
            if (urn->parsed()) {
                sim.p1_opt = urn_p1;
                sim.p2_opt = urn_p2;
                sim.p1p_opt = urn_p1p;
                sim.p2p_opt = urn_p2p;
                return cmd_simulate("hyperbolic-urn", sim, out, err);
            }
            if (direct->parsed()) {
                sim.p_s_opt = d_ps;
                sim.p1p_opt = d_p1p;
                sim.p2p_opt = d_p2p;
                sim.p1_opt = d_p1;
                sim.p2_opt = d_p2;
                return cmd_simulate("direct", sim, out, err);
            }
            return cmd_simulate("two-slit", sim, out, err);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(sw, out);
        return cmd_range(range_p1p, range_p2p, out);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        return fail(kUsage, "usage", e.what());
    } catch (const UsageError& e) {
        return fail(kUsage, "usage", e.message);
    } catch (const ParseError& e) {
        return fail(kDataError, to_string(e.parse_kind()), e.what());
    } catch (const Error& e) {
        return fail(exit_code_for(e.kind()), to_string(e.kind()), e.what());
    }
}

} // namespace ctxprob::cli
