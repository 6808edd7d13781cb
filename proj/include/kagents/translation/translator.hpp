#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/knowledge/registry.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::translation {

struct ActivationScore {
    std::string agent_id;
    double score = 0;
};

// Max inner product between the instruction embedding and each agent's sentence embeddings,
// descending; ties keep registration order. Throws NoAgents.
std::vector<ActivationScore> score_agents(const llm::EmbeddingVector& instruction,
                                          const std::vector<knowledge::Agent>& agents);

struct TranslationCandidate {
    std::string agent_id;
    std::string code;
    std::string explanation;
    bool suitable = false;
    knowledge::AgentKind kind = knowledge::AgentKind::code;
};

struct TranslationContext {
    std::string instruction;
    std::vector<std::pair<std::string, std::string>> available_variables; // name, description
    int n_k = 3;
    int n_max = 9;
};

struct TranslationOutcome {
    std::string code;
    std::string selected_agent;
    std::vector<int> widths;
    std::vector<ActivationScore> scores;
    std::vector<TranslationCandidate> candidates;
    std::vector<std::string> notes; // dropped candidates and the like

    nlohmann::json to_json(std::size_t top_scores = 9) const;
};

class Translator {
public:
    Translator(const knowledge::Registry& registry, llm::Gateway& gateway);

    std::vector<ActivationScore> score(const std::string& instruction) const;

    // Throws StructureError; a candidate failing the call grammar raises MalformedCandidate.
    std::optional<TranslationCandidate> code_candidate(const std::string& agent_id, const TranslationContext& ctx);
    std::optional<TranslationCandidate> procedure_candidate(const std::string& agent_id, const TranslationContext& ctx);

    // Throws SelectionError.
    std::string select_final(const std::vector<TranslationCandidate>& candidates, const TranslationContext& ctx);

    // Escalating candidate search. Throws TranslationFailed (with the outcome's widths in the message)
    // or SelectionError. The partial outcome is kept in last_outcome() either way.
    TranslationOutcome translate(const TranslationContext& ctx);
    const TranslationOutcome& last_outcome() const { return last_; }

    // Plain retrieval baseline: top_k descriptors by the same scores, one generation prompt.
    TranslationOutcome rag_translate(const TranslationContext& ctx, int top_k = 2);

    // Throws MalformedCandidate when the code does not parse, names an unknown experiment,
    // uses an undeclared parameter or refers to an unknown variable.
    void check_code(const std::string& code, const TranslationContext& ctx) const;

private:
    std::string variables_text(const TranslationContext& ctx) const;

    const knowledge::Registry& registry_;
    llm::Gateway& gateway_;
    TranslationOutcome last_;
};

// Code for a nested run; mapping entries are "<stored name>=<value or variable>".
std::string execute_procedure_code(const std::string& title, const std::string& instruction,
                                   const std::vector<std::pair<std::string, std::string>>& mapping);

} // namespace kagents::translation
