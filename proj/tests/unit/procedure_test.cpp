#include <gtest/gtest.h>

#include "testing.hpp"

#include "kagents/errors.hpp"
#include "kagents/procedure/procedure_doc.hpp"

using namespace kagents;
using procedure::parse;

namespace {
const char* kDoc = R"(# Frequency Calibration on `dut`

## Background

Two Ramsey scans.

## Steps

- Run a coarse Ramsey on `dut`.
- Run a fine Ramsey on `dut`.
  If it fails, retry up to 3 times.

## Results

- The corrected frequency
)";
}

TEST(Procedure, ParsesSections) {
    auto d = parse(kDoc, "freq.md");
    EXPECT_EQ(d.title, "Frequency Calibration on `dut`");
    ASSERT_TRUE(d.background);
    EXPECT_EQ(*d.background, "Two Ramsey scans.");
    ASSERT_EQ(d.steps.size(), 2u);
    EXPECT_EQ(d.steps[1], "Run a fine Ramsey on `dut`. If it fails, retry up to 3 times.");
    ASSERT_TRUE(d.results);
    EXPECT_TRUE(procedure::validate(d).ok());
}

TEST(Procedure, RenderRoundTrips) {
    auto d = parse(kDoc);
    EXPECT_EQ(parse(procedure::render(d)), d);
}

TEST(Procedure, OptionalSectionsAreNotes) {
    auto d = parse("# T\n\n## Steps\n\n- one\n");
    auto v = procedure::validate(d);
    EXPECT_TRUE(v.ok());
    EXPECT_EQ(v.notes.size(), 2u);
}

TEST(Procedure, ParseErrors) {
    EXPECT_THROW(parse("## Steps\n- a\n"), MissingTitle);
    EXPECT_THROW(parse("# \n## Steps\n- a\n"), MissingTitle);
    EXPECT_THROW(parse("# T\n## Background\nx\n"), MissingSteps);
    EXPECT_THROW(parse("# T\n## Steps\n"), MissingSteps);
    EXPECT_THROW(parse("# T\n## Steps\n- a\n## Steps\n- b\n"), DuplicateSection);
    EXPECT_THROW(parse("# T\n# U\n## Steps\n- a\n"), DuplicateSection);
    EXPECT_THROW(parse("# T\n## Notes\nx\n## Steps\n- a\n"), UnknownSection);
    EXPECT_THROW(parse("# T\n## Steps\n- a\n  - nested\n"), MalformedStep);
    EXPECT_THROW(parse("# T\n## Steps\n1. a\n"), MalformedStep);
}

TEST(Procedure, ErrorsNameTheLine) {
    try {
        parse("# T\n## Steps\n- a\n## Extra\n", "p.md");
        FAIL();
    } catch (const UnknownSection& e) {
        EXPECT_NE(std::string(e.what()).find("p.md:4"), std::string::npos) << e.what();
    }
}

TEST(Procedure, LoadMissingFile) {
    EXPECT_THROW(procedure::load("/nonexistent/x.md"), NotFound);
}

TEST(Procedure, ShippedProceduresAreValid) {
    for (const char* f : {"frequency_calibration.md", "amplitude_calibration.md", "single_qubit_calibration.md",
                          "sizzle_search.md", "ghz_tomography.md"}) {
        auto d = procedure::load(kagents::testing::data_path(std::string("procedures/") + f).string());
        EXPECT_TRUE(procedure::validate(d).ok()) << f;
    }
}
