#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "testing.hpp"

#include "kagents/errors.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/procedure/procedure_doc.hpp"
#include "kagents/translation/translator.hpp"

using namespace kagents;
using namespace kagents::translation;

namespace {

TranslationContext context(const kagents::testing::EscalationFixture& f) {
    TranslationContext ctx;
    ctx.instruction = f.instruction;
    ctx.available_variables = f.table.listing();
    return ctx;
}

} // namespace

TEST(Scores, DescendingWithStableTies) {
    auto f = kagents::testing::escalation_fixture(true);
    Translator t(*f.registry, *f.gateway);
    auto s = t.score(f.instruction);
    ASSERT_EQ(s.size(), 10u);
    for (std::size_t i = 1; i < s.size(); ++i) EXPECT_GE(s[i - 1].score, s[i].score);
    EXPECT_EQ(s[0].agent_id, "DecoyAlpha");
    EXPECT_EQ(s[1].agent_id, "DecoyBeta");
    EXPECT_EQ(s[2].agent_id, "DecoyGamma");
    EXPECT_EQ(s[3].agent_id, f.target);
    EXPECT_THROW(score_agents(f.gateway->embed("x"), {}), NoAgents);
}

TEST(Escalation, WidensUntilACandidateAppears) {
    auto f = kagents::testing::escalation_fixture(true);
    Translator t(*f.registry, *f.gateway);
    auto out = t.translate(context(f));
    EXPECT_EQ(out.widths, (std::vector<int>{3, 5}));
    EXPECT_EQ(out.selected_agent, f.target);
    EXPECT_NE(out.code.find("SimpleRamseyMultilevel(dut=dut"), std::string::npos) << out.code;
    EXPECT_NE(out.code.find("stop=3"), std::string::npos) << out.code;
}

TEST(Escalation, FailsAfterThreeWidths) {
    auto f = kagents::testing::escalation_fixture(false);
    Translator t(*f.registry, *f.gateway);
    try {
        t.translate(context(f));
        FAIL() << "expected TranslationFailed";
    } catch (const TranslationFailed& e) {
        EXPECT_NE(std::string(e.what()).find("3,5,7"), std::string::npos) << e.what();
    }
    EXPECT_EQ(t.last_outcome().widths, (std::vector<int>{3, 5, 7}));
    EXPECT_TRUE(t.last_outcome().candidates.empty());
}

TEST(Escalation, StartsAtNkAndStopsAtRegistrySize) {
    auto f = kagents::testing::escalation_fixture(false);
    Translator t(*f.registry, *f.gateway);
    auto ctx = context(f);
    ctx.n_k = 1;
    ctx.n_max = 20;
    EXPECT_THROW(t.translate(ctx), TranslationFailed);
    EXPECT_EQ(t.last_outcome().widths, (std::vector<int>{1, 3, 5, 7, 9}));
    ctx.n_k = 4;
    ctx.n_max = 3;
    EXPECT_THROW(t.translate(ctx), std::invalid_argument);
}

TEST(CheckCode, RejectsUnknownNames) {
    auto f = kagents::testing::escalation_fixture(true);
    Translator t(*f.registry, *f.gateway);
    auto ctx = context(f);
    EXPECT_NO_THROW(t.check_code("experiment_r = SimpleRamseyMultilevel(dut=dut)", ctx));
    EXPECT_THROW(t.check_code("experiment_r = Unknown(dut=dut)", ctx), MalformedCandidate);
    EXPECT_THROW(t.check_code("experiment_r = SimpleRamseyMultilevel(qubit=dut)", ctx), MalformedCandidate);
    EXPECT_THROW(t.check_code("experiment_r = SimpleRamseyMultilevel(dut=ghost)", ctx), MalformedCandidate);
    EXPECT_THROW(t.check_code("experiment_r = SimpleRamseyMultilevel(dut=", ctx), MalformedCandidate);
}

TEST(ProcedureAgents, RewriteMapsParameters) {
    llm::Gateway g(std::make_unique<llm::RulesBackend>());
    knowledge::Registry r(&g);
    r.register_experiment(knowledge::builtin("SimpleRamseyMultilevel"));
    auto doc = procedure::load(kagents::testing::data_path("procedures/frequency_calibration.md").string());
    r.register_procedure(doc);
    Translator t(r, g);
    TranslationContext ctx;
    ctx.instruction = "Do frequency calibration on `q3`";
    ctx.available_variables = {{"q3", "qubit Q0"}};
    auto out = t.translate(ctx);
    EXPECT_EQ(out.selected_agent, knowledge::procedure_agent_id(doc.title));
    EXPECT_NE(out.code.find("ExecuteProcedure("), std::string::npos);
    EXPECT_NE(out.code.find("dut=q3"), std::string::npos) << out.code;
}

TEST(ProcedureAgents, ExecuteProcedureCode) {
    auto code = execute_procedure_code("T `dut`", "Do T on `q`", {{"dut", "q"}});
    EXPECT_EQ(code.rfind("experiment_", 0), 0u);
    EXPECT_NE(code.find("mapping=[\"dut=q\"]"), std::string::npos) << code;
}

TEST(Rag, SingleShotOverTopDescriptors) {
    auto f = kagents::testing::escalation_fixture(true);
    Translator t(*f.registry, *f.gateway);
    auto out = t.rag_translate(context(f), 2);
    EXPECT_EQ(out.widths, std::vector<int>{2});
    // The top two are decoys, so the baseline cannot see the right experiment.
    EXPECT_EQ(out.code.find("SimpleRamseyMultilevel("), std::string::npos) << out.code;
}
