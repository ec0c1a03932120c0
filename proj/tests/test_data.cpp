#include "ctxprob/data.hpp"

#include <catch_amalgamated.hpp>

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

using namespace ctxprob;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kGoldenZ = 42.600643361512920; // 0.7 / sqrt(3 * 0.09 / 1000), mpmath
constexpr double kAcoshThreeHalf = 1.9248473002384137900;

struct ParseFailure {
    ParseErrorKind kind;
    std::size_t line;
};

ParseFailure parse_failure(std::string_view text) {
    try {
        (void)parse_counts(text);
    } catch (const ParseError& e) {
        CHECK(e.kind() == ErrorKind::ParseError);
        return {e.parse_kind(), e.line()};
    }
    FAIL("parse_counts accepted: " << text);
    return {};
}

CountTable counts(std::string_view body) {
    return parse_counts(std::string(kCountHeader) + "\n" + std::string(body)).table;
}

} // namespace

TEST_CASE("parse_counts examples", "[data][parse]") {
    const CountFile f = parse_counts("context,successes,trials\nS,9,10\nS1p,1,10\nS2p,1,10");
    REQUIRE(f.table.rows().size() == 3);
    CHECK(f.table.at(ContextLabel::S).p_hat() == 0.9);
    CHECK(f.table.at(ContextLabel::S1p).p_hat() == 0.1);
    CHECK(f.table.at(ContextLabel::S2p).p_hat() == 0.1);
    CHECK(f.source == "<input>");

    const CountFile zeros = parse_counts("context,successes,trials\nS,0,10\nS1p,0,10\nS2p,0,10");
    CHECK(analyze_counts(zeros.table).regime == Regime{Degenerate{DegenerateReason::BothSubcontextsZero}});

    const auto over = parse_failure("context,successes,trials\nS,11,10");
    CHECK(over.kind == ParseErrorKind::SuccessesExceedTrials);
    CHECK(over.line == 2);
}

TEST_CASE("parse_counts accepts CRLF, comments, blanks, BOM and any row order", "[data][parse]") {
    const std::string text =
        "\xEF\xBB\xBF# counts from run 4\r\ncontext,successes,trials\r\n\r\nS2p,2,20\r\n"
        "# reference\r\nS1,4,10\r\nS2,5,10\r\nS,9,10\r\nS1p,1,10\r\n";
    const CountFile f = parse_counts(text, "run4.csv");
    CHECK(f.source == "run4.csv");
    CHECK(f.table.rows().size() == 5);
    CHECK(f.table.has_reference_split());
    CHECK(f.table.at(ContextLabel::S2p).successes == 2);

    bool saw_s2p = false;
    for (const auto& [label, line] : f.row_lines) {
        if (label == ContextLabel::S2p) {
            CHECK(line == 4);
            saw_s2p = true;
        }
        if (label == ContextLabel::S) CHECK(line == 8);
    }
    CHECK(saw_s2p);
}

TEST_CASE("parse_counts error kinds carry line numbers", "[data][parse]") {
    struct Case {
        std::string text;
        ParseErrorKind kind;
        std::size_t line;
    };
    const std::vector<Case> cases{
        {"", ParseErrorKind::MissingHeader, 1},
        {"# only a comment\n", ParseErrorKind::MissingHeader, 1},
        {"label,successes,trials\nS,1,2", ParseErrorKind::BadHeader, 1},
        {"context,successes,trials\nS,1", ParseErrorKind::MalformedRow, 2},
        {"context,successes,trials\nS,1,2,3", ParseErrorKind::MalformedRow, 2},
        {"context,successes,trials\nS,x,2", ParseErrorKind::BadInteger, 2},
        {"context,successes,trials\nS,-1,2", ParseErrorKind::BadInteger, 2},
        {"context,successes,trials\nS,0.5,2", ParseErrorKind::BadInteger, 2},
        {"context,successes,trials\nS,1,2\nT,1,2", ParseErrorKind::UnknownLabel, 3},
        {"context,successes,trials\nS,1,2\nS1p,1,2\nS,1,2", ParseErrorKind::DuplicateLabel, 4},
        {"context,successes,trials\nS,1,2\nS1p,1,2", ParseErrorKind::MissingLabel, 3},
        {"context,successes,trials\nS,1,2\nS1p,1,2\nS2p,1,2\nS1,1,2", ParseErrorKind::UnpairedReference, 5},
        {"context,successes,trials\nS,1,2\nS1p,3,2\nS2p,1,2", ParseErrorKind::SuccessesExceedTrials, 3},
        {"context,successes,trials\nS,0,0\nS1p,1,2\nS2p,1,2", ParseErrorKind::ZeroTrials, 2},
    };
    for (const auto& c : cases) {
        CAPTURE(c.text);
        const auto failure = parse_failure(c.text);
        CHECK(failure.kind == c.kind);
        CHECK(failure.line == c.line);
    }

    try {
        (void)parse_counts("context,successes,trials\nS,11,10", "bad.csv");
    } catch (const ParseError& e) {
        CHECK_THAT(e.what(), ContainsSubstring("line 2"));
        CHECK(to_string(e.parse_kind()) == "successes_exceed_trials");
    }
}

TEST_CASE("read_counts_file", "[data][parse]") {
    const auto path = std::filesystem::temp_directory_path() / "ctxprob_test_counts.csv";
    write_file_atomically(path, "context,successes,trials\nS,9,10\nS1p,1,10\nS2p,1,10\n");
    const CountFile f = read_counts_file(path);
    CHECK(f.source == path.string());
    CHECK(f.table.at(ContextLabel::S).successes == 9);
    std::filesystem::remove(path);

    try {
        (void)read_counts_file(path);
        FAIL("expected Io error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
    }
}

TEST_CASE("write_counts round-trips randomized tables", "[data][property]") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::uint64_t> n_dist(1, 1ULL << 40);
    std::bernoulli_distribution coin(0.5);
    for (int i = 0; i < 2000; ++i) {
        std::vector<CountRow> rows;
        const bool split = coin(rng);
        for (ContextLabel l : kAllContexts) {
            if (!split && (l == ContextLabel::S1 || l == ContextLabel::S2)) continue;
            const std::uint64_t n = n_dist(rng);
            std::uniform_int_distribution<std::uint64_t> s_dist(0, n);
            rows.push_back({l, s_dist(rng), n});
        }
        std::shuffle(rows.begin(), rows.end(), rng);
        const CountTable t(rows);
        const std::string text = write_counts(t);
        CHECK(parse_counts(text).table == t);
        CHECK(write_counts(parse_counts(text).table) == text);
    }
}

TEST_CASE("additivity_check examples", "[data][additivity]") {
    const auto additive = additivity_check(
        counts("S,900,1000\nS1,400,1000\nS2,500,1000\nS1p,100,1000\nS2p,100,1000"));
    REQUIRE(additive);
    CHECK(additive->z_statistic == 0.0);
    CHECK(additive->consistent);

    const auto broken = additivity_check(
        counts("S,900,1000\nS1,100,1000\nS2,100,1000\nS1p,100,1000\nS2p,100,1000"));
    REQUIRE(broken);
    CHECK_THAT(broken->z_statistic, WithinAbs(kGoldenZ, 1e-9));
    CHECK_FALSE(broken->consistent);

    CHECK_FALSE(additivity_check(counts("S,900,1000\nS1p,100,1000\nS2p,100,1000")));

    // Threshold is configurable.
    CHECK(additivity_check(
              counts("S,900,1000\nS1,100,1000\nS2,100,1000\nS1p,100,1000\nS2p,100,1000"), 50.0)
              ->consistent);

    try {
        (void)additivity_check(counts("S,10,10\nS1,0,10\nS2,0,10\nS1p,1,10\nS2p,1,10"));
        FAIL("expected DegenerateVariance");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateVariance);
    }
    const auto flat = additivity_check(counts("S,10,10\nS1,10,10\nS2,0,10\nS1p,1,10\nS2p,1,10"));
    REQUIRE(flat);
    CHECK(flat->z_statistic == 0.0);
}

TEST_CASE("additivity_check is symmetric in S1/S2 and row order", "[data][property]") {
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<std::uint64_t> n_dist(10, 100000);
    for (int i = 0; i < 2000; ++i) {
        std::vector<std::uint64_t> n(3), s(3);
        for (int k = 0; k < 3; ++k) {
            n[k] = n_dist(rng);
            s[k] = std::uniform_int_distribution<std::uint64_t>(1, n[k] - 1)(rng);
        }
        const std::vector<CountRow> forward{{ContextLabel::S, s[0], n[0]},
                                            {ContextLabel::S1, s[1], n[1]},
                                            {ContextLabel::S2, s[2], n[2]},
                                            {ContextLabel::S1p, 1, 2},
                                            {ContextLabel::S2p, 1, 2}};
        std::vector<CountRow> swapped{{ContextLabel::S2p, 1, 2},
                                      {ContextLabel::S2, s[1], n[1]},
                                      {ContextLabel::S1p, 1, 2},
                                      {ContextLabel::S1, s[2], n[2]},
                                      {ContextLabel::S, s[0], n[0]}};
        const auto a = additivity_check(CountTable(forward));
        const auto b = additivity_check(CountTable(swapped));
        REQUIRE(a);
        REQUIRE(b);
        CHECK(a->z_statistic == b->z_statistic);
        CHECK(a->consistent == b->consistent);
    }
}

TEST_CASE("write_report encodings", "[data][report]") {
    SECTION("degenerate") {
        const auto doc = make_report(ContextTriple(Probability(0.3), Probability(0.0), Probability(0.2)));
        CHECK_FALSE(doc.lambda);
        CHECK_FALSE(doc.wave);
        const std::string text = write_report(doc);
        CHECK_THAT(text, ContainsSubstring("\"lambda\": null"));
        CHECK_THAT(text, ContainsSubstring("\"tag\": \"degenerate\""));
        CHECK_THAT(text, ContainsSubstring("\"reason\": \"first_subcontext_zero\""));
        CHECK(text.back() == '\n');
    }
    SECTION("hyperbolic") {
        const auto doc = make_report(ContextTriple(Probability(0.9), Probability(0.1), Probability(0.1)));
        const auto& h = std::get<Hyperbolic>(doc.regime);
        CHECK(h.sign == 1);
        CHECK_THAT(h.theta, WithinAbs(kAcoshThreeHalf, 1e-12));
        const std::string text = write_report(doc);
        CHECK_THAT(text, ContainsSubstring("\"tag\": \"hyperbolic\""));
        CHECK_THAT(text, ContainsSubstring("\"sign\": 1"));
        CHECK_THAT(text, ContainsSubstring("\"kind\": \"split-complex\""));
        CHECK_THAT(text, ContainsSubstring("\"generator_name\": \"splitmix64\""));
        CHECK_THAT(text, ContainsSubstring("\"seed\": null"));
    }
    SECTION("key order") {
        const auto doc = make_report(ContextTriple(Probability(0.5), Probability(0.3), Probability(0.2),
                                                   Probability(0.3), Probability(0.2)));
        const std::string text = write_report(doc);
        std::size_t last = 0;
        for (const char* key : {"schema_version", "inputs", "delta", "lambda", "regime",
                                "lambda_interval", "regime_stability", "additivity_check",
                                "wave", "reproducibility"}) {
            const auto at = text.find("\"" + std::string(key) + "\":");
            REQUIRE(at != std::string::npos);
            CHECK(at >= last);
            last = at;
        }
        CHECK(doc.additivity_check.present);
        CHECK(*doc.additivity_check.consistent);
    }
}

TEST_CASE("report from counts", "[data][report]") {
    const CountTable t = counts("S,900,1000\nS1,100,1000\nS2,100,1000\nS1p,100,1000\nS2p,100,1000");
    const auto est = estimate(t, 200, 0.95, 11);
    const auto doc = make_report(t, est);
    CHECK(doc.inputs.size() == 5);
    CHECK(*doc.inputs.front().successes == 900);
    CHECK(doc.inputs.front().interval);
    CHECK(doc.lambda_interval == est.lambda_interval);
    CHECK(*doc.reproducibility.seed == 11);
    CHECK(doc.reproducibility.replicates == 200);
    CHECK_THAT(*doc.additivity_check.z_statistic, WithinAbs(kGoldenZ, 1e-9));
    CHECK_FALSE(*doc.additivity_check.consistent);
    CHECK(parse_report(write_report(doc)) == doc);

    const CountTable bad = counts("S,10,10\nS1,0,10\nS2,0,10\nS1p,1,10\nS2p,1,10");
    const auto flagged = make_report(bad, estimate(bad, 10, 0.95, 1));
    CHECK(flagged.additivity_check.present);
    CHECK_FALSE(flagged.additivity_check.z_statistic);
    CHECK_FALSE(*flagged.additivity_check.consistent);
}

TEST_CASE("report round-trips randomized documents", "[data][property]") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> wide(-1e6, 1e6);
    std::uniform_int_distribution<std::uint64_t> big(0, ~0ULL);
    std::bernoulli_distribution coin(0.5);

    for (int i = 0; i < 2000; ++i) {
        ReportDocument doc;
        for (ContextLabel l : kAllContexts) {
            if (coin(rng)) continue;
            ReportInput in;
            in.context = l;
            in.p_hat = u(rng);
            if (coin(rng)) {
                in.successes = big(rng);
                in.trials = big(rng);
            }
            if (coin(rng)) in.interval = Interval{u(rng) * 0.5, 0.5 + u(rng) * 0.5};
            doc.inputs.push_back(in);
        }
        doc.delta = wide(rng) * 1e-6;
        switch (i % 3) {
        case 0:
            doc.lambda = u(rng) * 2.0 - 1.0;
            doc.regime = Trigonometric{std::acos(*doc.lambda)};
            break;
        case 1:
            doc.lambda = wide(rng);
            doc.regime = Hyperbolic{*doc.lambda > 0 ? 1 : -1, u(rng) * 10.0};
            break;
        default:
            doc.regime = Degenerate{static_cast<DegenerateReason>(i % 3 == 2 ? (i / 3) % 3 : 0)};
            break;
        }
        if (doc.lambda && coin(rng)) {
            doc.lambda_interval = Interval{*doc.lambda - u(rng), *doc.lambda + u(rng)};
            doc.regime_stability = u(rng);
        }
        if (coin(rng)) {
            doc.additivity_check.present = true;
            if (coin(rng)) doc.additivity_check.z_statistic = wide(rng);
            doc.additivity_check.consistent = coin(rng);
        }
        if (doc.lambda && coin(rng)) {
            doc.wave = WaveEntry{coin(rng) ? "complex" : "split-complex", wide(rng), u(rng) * 1e-300};
        }
        if (coin(rng)) doc.reproducibility.seed = big(rng);
        doc.reproducibility.replicates = big(rng) % 100000;
        doc.reproducibility.generator_name = "splitmix64";

        const std::string text = write_report(doc);
        const ReportDocument back = parse_report(text);
        CHECK(back == doc);
        CHECK(write_report(back) == text);
    }
}

TEST_CASE("parse_report rejects malformed documents", "[data][report]") {
    for (const char* text : {"", "{", "[]", "{\"schema_version\": \"1\"}", "not json"}) {
        CAPTURE(text);
        try {
            (void)parse_report(text);
            FAIL("accepted");
        } catch (const ParseError& e) {
            CHECK(e.parse_kind() == ParseErrorKind::InvalidDocument);
        }
    }
}

TEST_CASE("format_number", "[data][report]") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(3.5) == "3.5");
    CHECK(format_number(1.0) == "1");
    CHECK(std::stod(format_number(std::numbers::pi)) == std::numbers::pi);
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 10000; ++i) {
        const double x = std::bit_cast<double>(bits(rng));
        if (!std::isfinite(x)) continue;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        CHECK(format_number(x) == buf);
    }
}
