#include <gtest/gtest.h>

#include "testing.hpp"

#include "kagents/errors.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/knowledge/registry.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/procedure/procedure_doc.hpp"

using namespace kagents;
using namespace kagents::knowledge;

TEST(Descriptor, JsonRoundTrip) {
    for (const auto& d : builtin_descriptors()) {
        auto back = descriptor_from_json(to_json(d));
        EXPECT_EQ(back.name, d.name);
        EXPECT_EQ(back.parameters.size(), d.parameters.size());
        EXPECT_EQ(describe(back), describe(d));
        EXPECT_NO_THROW(check_doc(d)) << d.name;
    }
}

TEST(Descriptor, CheckDocRejects) {
    ExperimentDescriptor d = builtin("SimpleT1");
    auto bad = d;
    bad.name = "Not an id";
    EXPECT_THROW(check_doc(bad), InvalidDoc);
    bad = d;
    bad.doc = " ";
    EXPECT_THROW(check_doc(bad), InvalidDoc);
    bad = d;
    bad.parameters.push_back(bad.parameters.front());
    EXPECT_THROW(check_doc(bad), InvalidDoc);
    bad = d;
    bad.parameters.front().description.clear();
    EXPECT_THROW(check_doc(bad), InvalidDoc);
    bad = d;
    bad.run_hook.clear();
    EXPECT_THROW(check_doc(bad), InvalidDoc);
    EXPECT_THROW(descriptor_from_json({{"doc", "x"}}), InvalidDoc);
}

TEST(Catalog, NamesResolve) {
    for (const auto& n : benchmark_experiment_names()) EXPECT_NO_THROW(builtin(n)) << n;
    EXPECT_THROW(builtin("NoSuchExperiment"), NotFound);
    EXPECT_GT(benchmark_experiment_names().size(), default_experiment_names().size());
}

class RegistryTest : public ::testing::Test {
protected:
    llm::Gateway gateway{std::make_unique<llm::RulesBackend>()};
    Registry registry{&gateway};
};

TEST_F(RegistryTest, RegistersAgentsWithFingerprints) {
    registry.register_experiment(builtin("SimpleRamseyMultilevel"));
    auto doc = procedure::parse("# Calibrate `dut`\n## Steps\n- Run Ramsey on `dut`\n");
    auto id = registry.register_procedure(doc);
    EXPECT_EQ(id, procedure_agent_id(doc.title));
    ASSERT_EQ(registry.agents().size(), 2u);
    for (const auto& a : registry.agents()) {
        EXPECT_FALSE(a.fingerprint.sentences.empty());
        EXPECT_EQ(a.fingerprint.sentences.size(), a.fingerprint.embeddings.size());
    }
    EXPECT_TRUE(registry.fingerprint_sentences().contains(id));
}

TEST_F(RegistryTest, ExplicitSentencesWin) {
    registry.register_experiment(builtin("SimpleT1"), std::vector<std::string>{"measure t1"});
    EXPECT_EQ(registry.agent("SimpleT1").fingerprint.sentences, std::vector<std::string>{"measure t1"});
}

TEST_F(RegistryTest, Errors) {
    registry.register_experiment(builtin("SimpleT1"));
    EXPECT_THROW(registry.register_experiment(builtin("SimpleT1")), DuplicateName);
    auto d = builtin("SimpleT1");
    d.name = "OtherT1";
    d.run_hook = "no_such_hook";
    EXPECT_THROW(registry.register_experiment(d), UnresolvableHook);
    d.run_hook = builtin("SimpleT1").run_hook;
    d.text_hooks = {"no_such_producer"};
    EXPECT_THROW(registry.register_experiment(d), UnresolvableHook);
    EXPECT_THROW(registry.lookup("Nope"), NotFound);
    EXPECT_THROW(registry.agent("Nope"), NotFound);
    EXPECT_THROW(registry.lookup_procedure("Nope"), NotFound);
    procedure::ProcedureDoc empty;
    empty.title = "x";
    EXPECT_THROW(registry.register_procedure(empty), InvalidDoc);
    auto doc = procedure::parse("# P\n## Steps\n- a\n");
    registry.register_procedure(doc);
    EXPECT_THROW(registry.register_procedure(doc), DuplicateName);
}

TEST_F(RegistryTest, NestedRunDescriptorIsBuiltInWithoutAgent) {
    EXPECT_THROW(registry.register_experiment(execute_procedure_descriptor()), DuplicateName);
    EXPECT_TRUE(registry.agents().empty());
    EXPECT_NO_THROW(registry.lookup(kExecuteProcedure));
}

TEST_F(RegistryTest, FingerprintCacheIsReused) {
    auto dir = kagents::testing::temp_dir("fp");
    RegistryOptions o;
    o.fingerprint_cache = dir;
    Registry a(&gateway, o);
    a.register_experiment(builtin("SimpleT1"));
    Registry b(&gateway, o);
    b.register_experiment(builtin("SimpleT1"));
    EXPECT_EQ(a.agent("SimpleT1").fingerprint, b.agent("SimpleT1").fingerprint);
    if (builtin("SimpleT1").activation_sentences.empty())
        EXPECT_FALSE(std::filesystem::is_empty(dir));
}

TEST(Registry, WithoutGatewayListsOnly) {
    Registry r(nullptr);
    r.register_experiment(builtin("SimpleT1"));
    EXPECT_TRUE(r.agent("SimpleT1").fingerprint.embeddings.empty());
}

TEST(Manifest, LoadsShippedManifests) {
    auto m = load_manifest(kagents::testing::data_path("manifests/default.json"));
    EXPECT_EQ(m.experiments.size(), default_experiment_names().size());
    EXPECT_EQ(m.procedures.size(), 5u);
    auto b = load_manifest(kagents::testing::data_path("manifests/benchmark.json"));
    EXPECT_EQ(b.experiments.size(), benchmark_experiment_names().size());
}

TEST(Manifest, Errors) {
    auto dir = kagents::testing::temp_dir("manifest");
    EXPECT_THROW(load_manifest(dir / "missing.json"), ManifestError);
    kagents::testing::write_file(dir / "a.json", "[1]");
    EXPECT_THROW(load_manifest(dir / "a.json"), ManifestError);
    kagents::testing::write_file(dir / "b.json", R"({"experiments": 3})");
    EXPECT_THROW(load_manifest(dir / "b.json"), ManifestError);
    kagents::testing::write_file(dir / "c.json", R"({"experiments": ["Nope"]})");
    EXPECT_THROW(load_manifest(dir / "c.json"), ManifestError);
    kagents::testing::write_file(dir / "bad.md", "no title\n");
    kagents::testing::write_file(dir / "d.json", R"({"procedures": ["bad.md"]})");
    EXPECT_THROW(load_manifest(dir / "d.json"), ManifestError);
    kagents::testing::write_file(dir / "e.json", R"({"asset_dir": "assets"})");
    EXPECT_EQ(load_manifest(dir / "e.json").asset_dir, dir / "assets");
}
