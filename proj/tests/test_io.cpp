#include <gtest/gtest.h>

#include <limits>
#include <random>
#include <sstream>

#include "gridframe/io.hpp"
#include "test_util.hpp"

using namespace gridframe;
using gridframe::testing::balanced_config;

TEST(CsvNumbers, ShortestRoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e3, 1e3);
    std::uniform_int_distribution<int> ex(-300, 300);
    for (int i = 0; i < 20000; ++i) {
        const double x = i % 2 ? u(rng) : std::ldexp(u(rng), ex(rng));
        ASSERT_EQ(io::parse_number(io::format_number(x), 1), x);
    }
    EXPECT_EQ(io::format_number(0.5), "0.5");
    EXPECT_EQ(io::format_number(-2.0), "-2");
}

TEST(CsvSamples, WriteThenReadIsExact) {
    std::mt19937_64 rng(2);
    ThreePhaseConfig c = gridframe::testing::random_config(rng);
    c.noise_variance = 0.01;
    const SampleSeries s = synth(c, 500, 9);
    std::stringstream buf;
    io::write_samples(buf, s);
    const SampleSeries back = io::to_samples(io::read_csv(buf));
    ASSERT_EQ(back.size(), s.size());
    EXPECT_EQ(back.start_index, 0);
    for (std::size_t k = 0; k < s.size(); ++k) ASSERT_EQ(back[k], s[k]);
}

TEST(CsvSamples, HeaderAndLineEndings) {
    std::ostringstream out;
    io::write_samples(out, SampleSeries{5, {{1.0, -0.5, -0.5}}});
    EXPECT_EQ(out.str(), "k,va,vb,vc\n5,1,-0.5,-0.5\n");
}

TEST(CsvParse, ReportsLineNumbers) {
    std::istringstream bad_number("k,va,vb,vc\n0,1,2,3\n1,1,x,3\n");
    try {
        io::read_csv(bad_number);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    std::istringstream short_row("k,va,vb,vc\n0,1,2\n");
    try {
        io::read_csv(short_row);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    std::istringstream gap("k,va,vb,vc\n0,1,2,3\n2,1,2,3\n");
    EXPECT_THROW(io::to_samples(io::read_csv(gap)), ParseError);
    std::istringstream empty("");
    EXPECT_THROW(io::read_csv(empty), ParseError);
    std::istringstream crlf("k,re,im\r\n3,1,2\r\n");
    const ComplexSeries s = io::to_complex(io::read_csv(crlf));
    EXPECT_EQ(s.start_index, 3);
    EXPECT_EQ(s[0], cplx(1.0, 2.0));
}

TEST(CsvInputs, AllKindsGiveTheSameClarkeVoltage) {
    const SampleSeries s = synth(balanced_config(), 50);
    std::stringstream raw, full, cpx;
    io::write_samples(raw, s);
    io::write_clarke(full, clarke_full(s));
    io::write_complex(cpx, clarke_complex(s));
    const ComplexSeries a = io::to_complex(io::read_csv(raw));
    const ComplexSeries b = io::to_complex(io::read_csv(full));
    const ComplexSeries c = io::to_complex(io::read_csv(cpx));
    for (std::size_t k = 0; k < s.size(); ++k) {
        ASSERT_NEAR(std::abs(a[k] - b[k]), 0.0, 1e-15);
        ASSERT_EQ(a[k], c[k]);
    }
}

TEST(ConfigJson, ParsesAllKeys) {
    const auto j = io::parse_json(R"({
        "amplitudes": [1, 0.9, 1.1], "phases_rad": [0, 0.1, -0.1],
        "sample_rate_hz": 2000, "base_frequency_hz": 60,
        "frequency_events": [{"start_index": 100, "new_frequency_hz": 59.5}],
        "sag_events": [{"type": "D", "depth": 0.5, "start_index": 10, "end_index": 50}],
        "noise_variance": 0.001})");
    const ThreePhaseConfig c = io::config_from_json(j);
    EXPECT_EQ(c.amplitudes[2], 1.1);
    EXPECT_EQ(c.sample_rate_hz, 2000.0);
    ASSERT_EQ(c.frequency_events.size(), 1u);
    EXPECT_EQ(c.frequency_events[0].new_frequency_hz, 59.5);
    ASSERT_EQ(c.sag_events.size(), 1u);
    EXPECT_EQ(c.sag_events[0].type, SagType::TypeD);
    EXPECT_EQ(c.noise_variance, 0.001);

    // to_json and back
    const ThreePhaseConfig again = io::config_from_json(io::to_json(c));
    EXPECT_EQ(again.amplitudes, c.amplitudes);
    EXPECT_EQ(again.sag_events[0].end_index, 50);
}

TEST(ConfigJson, Errors) {
    EXPECT_THROW(io::parse_json("{\"amplitudes\": [1,\n 2,,]}"), ParseError);
    try {
        io::parse_json("{\n\"a\": 1,\n\"b\": }");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
    EXPECT_THROW(io::config_from_json(io::parse_json(R"({"amplitudes": [1,1,1]})")), ConfigError);
    EXPECT_THROW(io::config_from_json(io::parse_json(
                     R"({"amplitudes": [1,1,1], "phases_rad": [0,0,0], "sample_rate_hz": 1000,
                         "base_frequency_hz": 50, "sag_events": [{"type": "E", "depth": 0.5,
                         "start_index": 0, "end_index": 5}]})")),
                 ConfigError);
    EXPECT_THROW(io::config_from_json(io::parse_json(
                     R"({"amplitudes": [1,-1,1], "phases_rad": [0,0,0], "sample_rate_hz": 1000,
                         "base_frequency_hz": 50})")),
                 ConfigError);
}

TEST(ScenarioJson, Validation) {
    const std::string base = R"("amplitudes": [1,1,1], "phases_rad": [0,0,0], "sample_rate_hz": 1000,
                                "base_frequency_hz": 50)";
    const io::Scenario s = io::scenario_from_json(io::parse_json(
        "{" + base + R"(, "duration": 10, "estimator": {"mu": 0.02, "h0": [0.1, 0.2]}, "outputs": ["raw", "trace"]})"));
    EXPECT_EQ(s.duration, 10);
    EXPECT_EQ(s.estimator.mu, 0.02);
    EXPECT_EQ(s.estimator.h0, cplx(0.1, 0.2));
    EXPECT_EQ(s.outputs.size(), 2u);
    EXPECT_THROW(io::scenario_from_json(io::parse_json("{" + base + R"(, "duration": 0})")), ConfigError);
    EXPECT_THROW(io::scenario_from_json(io::parse_json("{" + base + R"(, "duration": 5, "outputs": []})")),
                 ConfigError);
    EXPECT_THROW(io::scenario_from_json(io::parse_json("{" + base + R"(, "duration": 5, "estimator": {"mu": -1}})")),
                 ConfigError);
}

TEST(ReportJson, Shapes) {
    const auto seq = io::to_json(SequencePhasors{{1, 2}, {3, 4}, {5, 6}});
    EXPECT_EQ(seq["positive"]["im"], 4.0);
    Covariance3 cov;
    cov.entries = {{{2, 0, 0}, {0, 1, 0}, {0, 0, 3}}};
    const auto j = io::to_json(cov, eigen3(cov));
    EXPECT_EQ(j["eigenvalues"][0], 3.0);
    EXPECT_EQ(j["matrix"][2][2], 3.0);
    EXPECT_EQ(j["eigenvectors"].size(), 3u);
    const auto v = io::to_json(BalanceVerdict{BalanceState::Unbalanced, 0.3, ""});
    EXPECT_EQ(v["state"], "Unbalanced");
    EXPECT_FALSE(v.contains("notes"));
}

TEST(TraceCsv, Columns) {
    const EstimatorTrace t = run_pipeline(synth(balanced_config(), 3), EstimatorOptions{});
    std::stringstream out;
    io::write_trace(out, t);
    const io::CsvTable table = io::read_csv(out);
    EXPECT_EQ(table.header.size(), 14u);
    EXPECT_EQ(table.header.front(), "k");
    EXPECT_EQ(table.header.back(), "low_confidence");
    EXPECT_EQ(table.rows.size(), 3u);
}
