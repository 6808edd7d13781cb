#include <gtest/gtest.h>

#include "kagents/text.hpp"

using namespace kagents::text;

TEST(Text, TrimAndSplit) {
    EXPECT_EQ(trim("  a b \t\n"), "a b");
    EXPECT_EQ(trim("   "), "");
    EXPECT_EQ(split("a,,b", ','), (std::vector<std::string>{"a", "", "b"}));
    EXPECT_EQ(split_lines("x\r\ny\n\nz"), (std::vector<std::string>{"x", "y", "", "z"}));
}

TEST(Text, CaseInsensitiveHelpers) {
    EXPECT_TRUE(starts_with_ci("If it fails", "if "));
    EXPECT_FALSE(starts_with_ci("If", "if it"));
    EXPECT_TRUE(contains_ci("Go Back to Stage1", "back to stage"));
    EXPECT_EQ(replace_all("aaa", "a", "bb"), "bbbbbb");
    EXPECT_EQ(replace_all("abc", "", "x"), "abc");
}

TEST(Text, CamelCaseSplitsAcronyms) {
    EXPECT_EQ(split_camel_case("GHZStateTomography"), (std::vector<std::string>{"GHZ", "State", "Tomography"}));
    EXPECT_EQ(split_camel_case("SimpleT1"), (std::vector<std::string>{"Simple", "T1"}));
    EXPECT_EQ(split_camel_case("MeasurementCalibrationMultilevelGMM"),
              (std::vector<std::string>{"Measurement", "Calibration", "Multilevel", "GMM"}));
}

TEST(Text, StemFoldsCommonSuffixes) {
    EXPECT_EQ(stem("oscillations"), stem("oscillation"));
    EXPECT_EQ(stem("benchmarking"), stem("benchmark"));
    EXPECT_EQ(stem("status"), "status");
}

TEST(Text, ExperimentTermsDropGenericWords) {
    EXPECT_EQ(experiment_terms("SimpleRamseyMultilevel"), (std::set<std::string>{"ramsey"}));
    EXPECT_EQ(experiment_terms("NormalisedRabi"), (std::set<std::string>{"rabi"}));
    auto pingpong = experiment_terms("AmpPingpongCalibrationSingleQubitMultilevel");
    EXPECT_EQ(pingpong, (std::set<std::string>{"pingpong"}));
}

TEST(Text, ContentTermsIgnoreVariablesNumbersAndStopwords) {
    auto t = content_terms("Run a Ramsey experiment on `dut` with stop time=3 us");
    EXPECT_TRUE(t.count("ramsey"));
    EXPECT_FALSE(t.count("dut"));
    EXPECT_FALSE(t.count("3"));
    EXPECT_FALSE(t.count("run"));
    EXPECT_TRUE(content_terms("Run the ping-pong calibration").count("pingpong"));
    auto rb = content_terms("Do RB on the qubit");
    EXPECT_TRUE(rb.count(stem("randomized")));
    EXPECT_TRUE(rb.count(stem("benchmarking")));
}

TEST(Text, BacktickedNamesInOrder) {
    EXPECT_EQ(backticked_names("on `a` and ` b ` but `"), (std::vector<std::string>{"a", "b"}));
}

TEST(Text, TagContent) {
    EXPECT_EQ(tag_content("x<k>v</k>y", "k").value(), "v");
    EXPECT_FALSE(tag_content("<k>v", "k"));
    EXPECT_FALSE(tag_content("", "k"));
}

TEST(Text, NumberFormatting) {
    EXPECT_EQ(format_number(3.0), "3");
    EXPECT_EQ(format_number(0.02), "0.02");
    EXPECT_EQ(std::stod(format_number(0.1 + 0.2)), 0.1 + 0.2);
    EXPECT_EQ(fixed(1.23456, 2), "1.23");
    EXPECT_EQ(quote("a\"b"), "\"a\\\"b\"");
}
