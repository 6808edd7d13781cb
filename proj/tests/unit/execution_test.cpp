#include <gtest/gtest.h>

#include "testing.hpp"

#include "kagents/errors.hpp"
#include "kagents/execution/call_script.hpp"
#include "kagents/execution/state_machine.hpp"
#include "kagents/execution/transcript.hpp"
#include "kagents/execution/variables.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/knowledge/registry.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/procedure/procedure_doc.hpp"

using namespace kagents;
using namespace kagents::execution;
using nlohmann::json;

TEST(Variables, DeviceReferencesAreChecked) {
    VariableTable t;
    t.set_device("dut", "Q0", VarKind::qubit);
    t.set_device("duts", json::array({"Q0", "Q1"}), VarKind::pair);
    EXPECT_THROW(t.set_device("bad", json::array({"Q0"}), VarKind::pair), std::invalid_argument);
    EXPECT_THROW(t.set_device("bad", 3, VarKind::qubit), std::invalid_argument);
    EXPECT_THROW(t.set_device("1x", "Q0", VarKind::qubit), std::invalid_argument);
    EXPECT_THROW(t.set("a-b", 1, "initial"), std::invalid_argument);
    EXPECT_THROW(t.get("missing"), UnboundVariable);
    EXPECT_EQ(t.get("duts").kind, VarKind::pair);
    EXPECT_EQ(t.names(), (std::vector<std::string>{"dut", "duts"}));
}

TEST(Variables, JsonRoundTrip) {
    VariableTable t;
    t.set_device("dut", "Q0", VarKind::qubit, "under test");
    t.set("frequency", 4800.5, "StarkFrequencyProposal");
    auto back = VariableTable::from_json(t.to_json());
    EXPECT_EQ(back.to_json(), t.to_json());
    EXPECT_EQ(back.get("frequency").provenance, "StarkFrequencyProposal");
    EXPECT_EQ(back.listing_text(), t.listing_text());
}

TEST(Variables, IdentifierRule) {
    EXPECT_TRUE(is_identifier("a_1"));
    EXPECT_TRUE(is_identifier("_x"));
    EXPECT_FALSE(is_identifier(""));
    EXPECT_FALSE(is_identifier("9a"));
    EXPECT_EQ(var_kind_from_string(to_string(VarKind::qubits)), VarKind::qubits);
}

TEST(CallScript, ParsesAssignmentsAndCall) {
    auto p = parse_call_script("f = 4800\n\nexperiment_x = StarkThing(frequency=f, amps=[0.1, 0.2], name=\"a b\", "
                               "echo=True, n=-3, t=1e-3,)\n");
    EXPECT_EQ(p.experiment_name, "StarkThing");
    EXPECT_EQ(p.result_binding, "experiment_x");
    ASSERT_EQ(p.assignments.size(), 1u);
    ASSERT_EQ(p.arguments.size(), 6u);
    EXPECT_EQ(p.arguments[0].value.kind, Value::Kind::ref);
    EXPECT_EQ(p.arguments[1].value.items.size(), 2u);
    EXPECT_EQ(p.arguments[2].value.literal, "a b");
    EXPECT_EQ(p.arguments[3].value.literal, true);
    EXPECT_EQ(p.arguments[4].value.literal, -3);
    EXPECT_DOUBLE_EQ(p.arguments[5].value.literal.get<double>(), 1e-3);
    EXPECT_EQ(render(p.arguments[1].value), "[0.1, 0.2]");
}

TEST(CallScript, GrammarErrorsCarryPosition) {
    auto pos = [](const std::string& text) {
        try {
            parse_call_script(text);
        } catch (const GrammarError& e) {
            return std::make_pair(e.line(), e.column());
        }
        return std::make_pair(std::size_t{0}, std::size_t{0});
    };
    EXPECT_EQ(pos("experiment_a = X(a=1 b=2)"), std::make_pair(std::size_t{1}, std::size_t{22}));
    EXPECT_EQ(pos("x = 1\nexperiment_a = X(a=@)").first, 2u);
    EXPECT_NE(pos("x = 1").first, 0u);                        // no call
    EXPECT_NE(pos("result = X()").first, 0u);                 // wrong binding name
    EXPECT_NE(pos("experiment_a = X()\ny = 2").first, 0u);    // call not last
    EXPECT_NE(pos("experiment_a = X(a=1, a=2)").first, 0u);   // duplicate
    EXPECT_NE(pos("experiment_a = X(a=[[1]])").first, 0u);    // nested list
    EXPECT_NE(pos("experiment_a = X(a=\"open)").first, 0u);   // unterminated
    EXPECT_NE(pos("experiment_a = X(a=1))").first, 0u);       // unbalanced
}

class BindTest : public ::testing::Test {
protected:
    void SetUp() override {
        registry.register_experiment(knowledge::builtin("SimpleRamseyMultilevel"), std::vector<std::string>{"r"});
        table.set_device("dut", "Q0", VarKind::qubit);
    }
    llm::Gateway gateway{std::make_unique<llm::RulesBackend>()};
    knowledge::Registry registry{&gateway};
    VariableTable table;
};

TEST_F(BindTest, FillsDefaultsAndResolvesRefs) {
    auto b = parse_and_bind("s = 2.5\nexperiment_r = SimpleRamseyMultilevel(dut=dut, stop=s)", registry, table);
    EXPECT_EQ(b.arguments["dut"], "Q0");
    EXPECT_EQ(b.arguments["stop"], 2.5);
    EXPECT_EQ(b.arguments["set_offset"], 1.0);
}

TEST_F(BindTest, Errors) {
    EXPECT_THROW(parse_and_bind("experiment_r = Nope(dut=dut)", registry, table), UnknownExperiment);
    EXPECT_THROW(parse_and_bind("experiment_r = SimpleRamseyMultilevel(dut=dut, colour=1)", registry, table),
                 UnknownParameter);
    EXPECT_THROW(parse_and_bind("experiment_r = SimpleRamseyMultilevel(dut=other)", registry, table), UnboundVariable);
    EXPECT_THROW(parse_and_bind("experiment_r = SimpleRamseyMultilevel(stop=2)", registry, table), MissingArgument);
}

TEST(NumericVars, ExtractsKeyWordsAndOffsets) {
    std::string s = "Run Ramsey with frequency offset=1 MHz, stop time=1.5 us, step size=0.02 us.";
    auto v = extract_numeric_vars(s);
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[0].name, "frequency_offset");
    EXPECT_EQ(v[1].name, "stop_time");
    EXPECT_DOUBLE_EQ(v[1].value, 1.5);
    EXPECT_EQ(s.substr(v[1].offset, v[1].length), "1.5");
    EXPECT_TRUE(extract_numeric_vars("a == 3 and =4").empty());
    EXPECT_EQ(extract_numeric_vars("x=-2e-3")[0].value, -2e-3);
}

TEST(NumericVars, UpdatesMatchBySignificantWords) {
    Stage st;
    st.instruction = "Ramsey with stop time=1.5 us, step size=0.02 us.";
    st.numeric_vars = extract_numeric_vars(st.instruction);
    auto r = apply_parameter_updates(st, {{"stop", 3.0}, {"colour", 1.0}});
    EXPECT_EQ(r.applied.at("stop"), "stop_time");
    EXPECT_EQ(r.skipped, std::vector<std::string>{"colour"});
    EXPECT_EQ(st.rendered_instruction(), "Ramsey with stop time=3 us, step size=0.02 us.");
    // Offsets follow the new text.
    apply_parameter_updates(st, {{"step_size", 0.125}});
    EXPECT_EQ(st.rendered_instruction(), "Ramsey with stop time=3 us, step size=0.125 us.");
    EXPECT_DOUBLE_EQ(st.numeric_map().at("step_size"), 0.125);
}

TEST(StateMachineTest, RulesAndLabels) {
    Stage a;
    a.label = "Stage1";
    a.transition_rule = "If it fails, retry up to 3 times. Otherwise go to Stage2.";
    Stage b;
    b.label = "Stage2";
    b.transition_rule = "If it fails, go back to Stage1.";
    StateMachine m({a, b});
    EXPECT_EQ(m.current(), "Stage1");
    EXPECT_EQ(m.labels(), (std::vector<std::string>{"Stage1", "Stage2", kComplete, kFailed}));
    EXPECT_EQ(m.normalise(" 'stage 2'. "), "Stage2");
    EXPECT_EQ(m.normalise("Completed"), kComplete);
    EXPECT_EQ(m.normalise("failure"), kFailed);
    EXPECT_FALSE(m.normalise("Stage9"));
    EXPECT_THROW(m.move_to("Stage9"), InvalidNextStage);
    m.move_to(kComplete);
    EXPECT_TRUE(StateMachine::is_terminal(m.current()));
    EXPECT_EQ(rule_attempt_cap(a.transition_rule), 3);
    EXPECT_EQ(rule_attempt_cap("at most 5 attempts"), 5);
    EXPECT_FALSE(rule_attempt_cap(b.transition_rule));

    b.transition_rule = "go to Stage7";
    EXPECT_THROW(StateMachine({a, b}), InvalidNextStage);
    EXPECT_THROW(StateMachine(std::vector<Stage>{}), EmptyStages);
}

TEST(StateMachineTest, DecomposeWithRules) {
    llm::Gateway g(std::make_unique<llm::RulesBackend>());
    auto doc = procedure::load(kagents::testing::data_path("procedures/sizzle_search.md").string());
    auto m = decompose(doc, g);
    ASSERT_EQ(m.stages().size(), 2u);
    EXPECT_EQ(rule_attempt_cap(m.stages()[1].transition_rule), 50);
    EXPECT_NE(m.stages()[1].transition_rule.find("Stage1"), std::string::npos);
}

TEST(TranscriptTest, LogicalClockAndKinds) {
    auto dir = kagents::testing::temp_dir("transcript");
    {
        Transcript t(dir / "t.jsonl");
        t.emit("run_started", {{"depth", 0}});
        t.emit("stage_entered", {{"label", "Stage1"}, {"path", "Stage1"}});
        t.emit("stage_entered", {{"label", "Stage2"}, {"path", "Stage1/Stage2"}});
        t.emit("run_completed", {{"depth", 0}});
        EXPECT_THROW(t.emit("gossip", json::object()), std::invalid_argument);
    }
    auto ev = load_transcript(dir / "t.jsonl");
    ASSERT_EQ(ev.size(), 4u);
    EXPECT_EQ(ev[1]["timestamp"], "1970-01-01T00:00:00.001Z");
    EXPECT_EQ(stage_label_sequence(ev), (std::vector<std::string>{"Stage1", "Stage1/Stage2"}));
}

TEST(TranscriptTest, LoadErrors) {
    auto dir = kagents::testing::temp_dir("transcript-bad");
    EXPECT_THROW(load_transcript(dir / "none.jsonl"), ConfigError);
    kagents::testing::write_file(dir / "a.jsonl", "{\"kind\":\"stage_entered\",\"payload\":{}}\n");
    EXPECT_THROW(load_transcript(dir / "a.jsonl"), ConfigError);
    kagents::testing::write_file(dir / "b.jsonl", "{\"kind\":\"run_started\",\"payload\":{}}\n");
    EXPECT_THROW(load_transcript(dir / "b.jsonl"), ConfigError);
    kagents::testing::write_file(dir / "c.jsonl", "{\"kind\":\"run_started\",\"payload\":{}}\n{\"kind\":\"run_comp");
    EXPECT_THROW(load_transcript(dir / "c.jsonl"), ConfigError);
}
