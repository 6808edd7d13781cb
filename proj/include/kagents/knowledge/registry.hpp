#pragma once

#include <deque>
#include <functional>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/knowledge/descriptor.hpp"
#include "kagents/llm/gateway.hpp"
#include "kagents/procedure/procedure_doc.hpp"

namespace kagents::knowledge {

struct ActivationFingerprint {
    std::vector<std::string> sentences;
    std::vector<llm::EmbeddingVector> embeddings;

    bool operator==(const ActivationFingerprint& other) const;
};

enum class AgentKind { code, procedure };

struct Agent {
    std::string id;
    AgentKind kind = AgentKind::code;
    std::string target; // descriptor name or procedure title
    ActivationFingerprint fingerprint;
};

struct ProcedureKnowledge {
    procedure::ProcedureDoc doc;
    ActivationFingerprint fingerprint;
};

struct RegistryOptions {
    int sentence_count = 4;
    std::filesystem::path fingerprint_cache; // empty: no disk cache
    std::filesystem::path asset_dir;         // Image("...") references resolve here
};

std::vector<std::string> generate_activation_sentences(llm::Gateway& gateway, const ExperimentDescriptor& d,
                                                       int count);
std::vector<std::string> generate_title_variants(llm::Gateway& gateway, const procedure::ProcedureDoc& doc,
                                                 int count);
// Throws EmptyText.
ActivationFingerprint build_fingerprint(llm::Gateway& gateway, const std::vector<std::string>& sentences);

std::string procedure_agent_id(const std::string& title);

// Built once, then read-only. Without a gateway agents carry empty fingerprints (listing only).
class Registry {
public:
    explicit Registry(llm::Gateway* gateway, RegistryOptions options = {});

    // sentences, when given, replace generation (used by replay and hand-written fingerprints).
    std::string register_experiment(const ExperimentDescriptor& d,
                                    std::optional<std::vector<std::string>> sentences = std::nullopt);
    std::string register_procedure(const procedure::ProcedureDoc& doc,
                                   std::optional<std::vector<std::string>> sentences = std::nullopt);

    const ExperimentDescriptor& lookup(const std::string& name) const;
    const ExperimentDescriptor* find(const std::string& name) const;
    const ProcedureKnowledge& lookup_procedure(const std::string& title) const;
    const ProcedureKnowledge* find_procedure(const std::string& title) const;

    std::vector<std::string> list_agents() const;
    const std::vector<Agent>& agents() const { return agents_; }
    const Agent& agent(const std::string& id) const;
    std::vector<std::string> experiment_names() const;
    const std::deque<ProcedureKnowledge>& procedures() const { return procedures_; }

    // agent id -> fingerprint sentences, for transcripts.
    nlohmann::json fingerprint_sentences() const;

    const RegistryOptions& options() const { return options_; }
    llm::Gateway* gateway() const { return gateway_; }

private:
    ActivationFingerprint fingerprint_for(const std::string& cache_key_text,
                                          const std::function<std::vector<std::string>()>& generate,
                                          std::optional<std::vector<std::string>> sentences);
    void check_hooks(const ExperimentDescriptor& d) const;

    llm::Gateway* gateway_;
    RegistryOptions options_;
    std::deque<ExperimentDescriptor> experiments_;
    std::deque<ProcedureKnowledge> procedures_;
    std::vector<Agent> agents_;
};

// Manifest JSON:
//   {"experiments": "default" | "benchmark" | [names], "descriptors": [...], "procedures": [paths],
//    "asset_dir": path}
// Relative paths resolve against the manifest's directory. Throws ManifestError.
struct Manifest {
    std::vector<ExperimentDescriptor> experiments;
    std::vector<procedure::ProcedureDoc> procedures;
    std::filesystem::path asset_dir;
};

Manifest load_manifest(const std::filesystem::path& path);
Manifest default_manifest();

} // namespace kagents::knowledge
