#pragma once

#include <cstddef>
#include <string>

#include "kagents/llm/backend.hpp"
#include "kagents/llm/embedding.hpp"

namespace kagents::llm {

// Deterministic offline stand-in for a language model. It reads the tagged fields of each known
// template and answers with fixed heuristics; image parts are ignored in favour of the feature
// digest that accompanies them.
class RulesBackend : public Backend {
public:
    explicit RulesBackend(std::size_t embedding_dim = kDefaultEmbeddingDim) : dim_(embedding_dim) {}

    BackendKind kind() const override { return BackendKind::rules; }
    BackendReply chat(const ChatRequest& request, const std::string& digest) override;
    EmbeddingVector embed(const std::string& text) override;

    // The JSON reply for a request, before serialisation.
    nlohmann::json respond(const ChatRequest& request) const;

private:
    std::size_t dim_;
};

// Visual verdict thresholds per figure kind; shared with the inspection benchmark labels.
bool visual_rule_verdict(const std::string& figure_kind, const std::string& features_text,
                         std::string* analysis);

} // namespace kagents::llm
