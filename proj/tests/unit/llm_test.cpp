#include <gtest/gtest.h>

#include "testing.hpp"

#include "kagents/errors.hpp"
#include "kagents/llm/digest.hpp"
#include "kagents/llm/embedding.hpp"
#include "kagents/llm/gateway.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/llm/scripted_backend.hpp"
#include "kagents/execution/variables.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/prompts.hpp"

using namespace kagents;
using namespace kagents::llm;

namespace {

// Answers from a fixed list, one reply per call, and counts the calls.
class QueueBackend : public Backend {
public:
    explicit QueueBackend(std::vector<std::string> replies, int* calls) : replies_(std::move(replies)), calls_(calls) {}
    BackendKind kind() const override { return BackendKind::scripted; }
    BackendReply chat(const ChatRequest&, const std::string&) override {
        std::size_t i = static_cast<std::size_t>((*calls_)++);
        return {replies_.at(std::min(i, replies_.size() - 1)), {1, 1}};
    }
    EmbeddingVector embed(const std::string& t) override { return hashed_embedding(t); }

private:
    std::vector<std::string> replies_;
    int* calls_;
};

ChatRequest simple(const std::string& text) {
    ChatRequest r;
    r.template_id = "t";
    r.messages = {Message::user(text)};
    return r;
}

} // namespace

TEST(LlmTypes, ParseJsonObjectToleratesFencesAndProse) {
    auto a = parse_json_object("```json\n{\"x\": 1}\n```");
    ASSERT_TRUE(a);
    EXPECT_EQ((*a)["x"], 1);
    auto b = parse_json_object("Sure. Here it is: {\"y\": \"}\"} and that is all.");
    ASSERT_TRUE(b);
    EXPECT_EQ((*b)["y"], "}");
    EXPECT_FALSE(parse_json_object("no json here"));
    EXPECT_FALSE(parse_json_object("[1, 2]"));
}

TEST(LlmTypes, HasKeys) {
    nlohmann::json j = {{"a", 1}, {"b", 2}};
    EXPECT_TRUE(has_keys(j, {"a", "b"}));
    EXPECT_FALSE(has_keys(j, {"a", "c"}));
}

TEST(LlmTypes, ValidateRejectsBadRequests) {
    ChatRequest r;
    EXPECT_THROW(validate(r), std::invalid_argument);
    r = simple("x");
    r.temperature = 3.0;
    EXPECT_THROW(validate(r), std::invalid_argument);
    r.temperature = 0.0;
    EXPECT_NO_THROW(validate(r));
}

TEST(LlmDigest, KnownSha256) {
    EXPECT_EQ(sha256_hex(std::string_view("abc")),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(base64_encode({'M', 'a', 'n'}), "TWFu");
    EXPECT_EQ(base64_encode({'M', 'a'}), "TWE=");
}

TEST(LlmDigest, DependsOnContentAndImages) {
    auto a = simple("hello");
    auto b = simple("hello");
    EXPECT_EQ(request_digest(a), request_digest(b));
    b.temperature = 0.5;
    EXPECT_NE(request_digest(a), request_digest(b));
    auto c = simple("hello");
    c.messages[0].parts.push_back(ImagePart{{1, 2, 3}, "image/png", "f"});
    auto d = simple("hello");
    d.messages[0].parts.push_back(ImagePart{{1, 2, 4}, "image/png", "f"});
    EXPECT_NE(request_digest(c), request_digest(d));
    EXPECT_TRUE(c.has_images());
}

TEST(LlmEmbedding, NormalisedAndDeterministic) {
    auto v = hashed_embedding("Ramsey fringe on the qubit");
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_EQ(v.values, hashed_embedding("Ramsey fringe on the qubit").values);
    EXPECT_NEAR(v.dot(v), 1.0, 1e-12);
    EXPECT_THROW(hashed_embedding("  ,, "), EmptyText);
}

TEST(LlmGateway, CachesByDigest) {
    int calls = 0;
    Gateway g(std::make_unique<QueueBackend>(std::vector<std::string>{"one", "two"}, &calls));
    auto a = g.complete(simple("q"));
    auto b = g.complete(simple("q"));
    EXPECT_EQ(calls, 1);
    EXPECT_EQ(a.text, "one");
    EXPECT_EQ(b.text, "one");
    EXPECT_TRUE(b.cache_hit);
    EXPECT_EQ(g.usage_snapshot().cache_hits, 1u);
    EXPECT_EQ(g.usage_snapshot().calls, 1u);
}

TEST(LlmGateway, DiskCacheSurvivesGateways) {
    auto dir = kagents::testing::temp_dir("cache");
    GatewayOptions o;
    o.cache_dir = dir;
    int calls = 0;
    {
        Gateway g(std::make_unique<QueueBackend>(std::vector<std::string>{"stored"}, &calls), o);
        g.complete(simple("q"));
    }
    Gateway h(std::make_unique<QueueBackend>(std::vector<std::string>{"fresh"}, &calls), o);
    auto r = h.complete(simple("q"));
    EXPECT_EQ(r.text, "stored");
    EXPECT_TRUE(r.cache_hit);
    EXPECT_EQ(calls, 1);
}

TEST(LlmGateway, StructuredRepairsThenSucceeds) {
    int calls = 0;
    Gateway g(std::make_unique<QueueBackend>(std::vector<std::string>{"garbage", "{\"a\": 1}", "{\"a\": 1, \"b\": 2}"},
                                             &calls));
    auto j = g.complete_structured(simple("q"), {"a", "b"});
    EXPECT_EQ(calls, 3);
    EXPECT_EQ(j["b"], 2);
}

TEST(LlmGateway, StructuredGivesUp) {
    int calls = 0;
    Gateway g(std::make_unique<QueueBackend>(std::vector<std::string>{"nope"}, &calls));
    EXPECT_THROW(g.complete_structured(simple("q"), {"a"}), StructureError);
    EXPECT_EQ(calls, 3);
    EXPECT_THROW(g.complete_structured(simple("q"), {}), std::invalid_argument);
}

TEST(LlmGateway, ExchangeLogRoundTrips) {
    auto log = std::make_shared<ExchangeLog>();
    Gateway g(std::make_unique<RulesBackend>());
    g.attach_log(log);
    g.complete(prompts::report_judgement("The fit converged."));
    g.complete(prompts::report_judgement("The fit converged."));
    auto entries = log->entries();
    ASSERT_EQ(entries.size(), 1u);
    auto back = ExchangeLog::from_json(log->to_json());
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0].digest, entries[0].digest);
    EXPECT_EQ(back[0].response_text, entries[0].response_text);

    Gateway replay(std::make_unique<ScriptedBackend>(ScriptedBackend::from_exchanges(back)));
    EXPECT_EQ(replay.complete(prompts::report_judgement("The fit converged.")).text, entries[0].response_text);
}

TEST(LlmScripted, PatternsAndMisses) {
    auto dir = kagents::testing::temp_dir("scripted");
    kagents::testing::write_file(dir / "f.jsonl",
                        "{\"template_id\":\"t\",\"contains\":[\"alpha\"],\"response_text\":\"A\"}\n\n"
                        "{\"template_id\":\"t\",\"contains\":\"beta\",\"response_text\":\"B\"}\n");
    Gateway g(std::make_unique<ScriptedBackend>(ScriptedBackend::from_jsonl(dir / "f.jsonl")));
    EXPECT_EQ(g.complete(simple("x beta alpha")).text, "A");
    EXPECT_EQ(g.complete(simple("x beta")).text, "B");
    EXPECT_THROW(g.complete(simple("gamma")), FixtureMiss);
    kagents::testing::write_file(dir / "bad.jsonl", "{\"template_id\": \n");
    EXPECT_THROW(ScriptedBackend::from_jsonl(dir / "bad.jsonl"), ConfigError);
    EXPECT_THROW(ScriptedBackend::from_jsonl(dir / "missing.jsonl"), ConfigError);
}

TEST(LlmRules, UnknownTemplateIsABackendError) {
    RulesBackend b;
    EXPECT_THROW(b.respond(simple("x")), BackendError);
}

TEST(LlmRules, CodeCandidateNeedsEveryNameTerm) {
    Gateway g(std::make_unique<RulesBackend>());
    execution::VariableTable vars;
    vars.set_device("dut", "Q0", execution::VarKind::qubit, "the qubit under test");
    std::string doc = knowledge::describe(knowledge::builtin("SimpleRamseyMultilevel"));
    auto yes = prompts::code_candidate("SimpleRamseyMultilevel", doc, "Run Ramsey on `dut` with stop=2",
                                       vars.listing_text());
    auto j = g.complete_structured(yes, prompts::code_candidate_keys());
    EXPECT_TRUE(j["applicable"].get<bool>());
    EXPECT_NE(j["code"].get<std::string>().find("SimpleRamseyMultilevel("), std::string::npos);
    auto no = prompts::code_candidate("SimpleRamseyMultilevel", doc, "Run Rabi on `dut`", vars.listing_text());
    EXPECT_FALSE(g.complete_structured(no, prompts::code_candidate_keys())["applicable"].get<bool>());
}

TEST(LlmRules, ReportJudgementReadsFailureWords) {
    Gateway g(std::make_unique<RulesBackend>());
    auto bad = g.complete_structured(prompts::report_judgement("The fit did not converge."),
                                     prompts::report_judgement_keys());
    auto good = g.complete_structured(prompts::report_judgement("Frequency 17.6 MHz, amplitude 0.99."),
                                      prompts::report_judgement_keys());
    EXPECT_FALSE(bad["success"].get<bool>());
    EXPECT_TRUE(good["success"].get<bool>());
}
