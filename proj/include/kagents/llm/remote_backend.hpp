#pragma once

#include <string>

#include "kagents/llm/backend.hpp"

namespace kagents::llm {

// OpenAI-compatible chat-completions and embeddings endpoints.
struct RemoteOptions {
    std::string base_url = "https://api.openai.com/v1";
    std::string api_key;
    std::string chat_model = "gpt-4o";
    std::string vision_model; // used for model_hint "vision"; falls back to chat_model
    std::string embedding_model = "text-embedding-3-large";
    int timeout_seconds = 120;
    int max_retries = 2; // on 429 and 5xx
};

class RemoteBackend : public Backend {
public:
    explicit RemoteBackend(RemoteOptions options);

    BackendKind kind() const override { return BackendKind::remote; }
    BackendReply chat(const ChatRequest& request, const std::string& digest) override;
    EmbeddingVector embed(const std::string& text) override;
    bool accepts_images() const override { return true; }

    // Request body for chat/completions; exposed for tests.
    nlohmann::json chat_body(const ChatRequest& request) const;

private:
    nlohmann::json post(const std::string& path, const nlohmann::json& body);

    RemoteOptions options_;
    std::string origin_;
    std::string prefix_;
};

} // namespace kagents::llm
