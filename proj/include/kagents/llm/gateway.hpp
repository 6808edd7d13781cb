#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/llm/backend.hpp"
#include "kagents/llm/types.hpp"

namespace kagents::llm {

struct Exchange {
    std::string kind; // "chat" or "embedding"
    std::string digest;
    std::string template_id;
    std::string response_text;
    std::vector<double> embedding;
};

// Every response the gateway hands out, in first-seen order. Enough to replay a run.
class ExchangeLog {
public:
    void record(Exchange exchange);
    std::vector<Exchange> entries() const;
    nlohmann::json to_json() const;
    static std::vector<Exchange> from_json(const nlohmann::json& j);

private:
    mutable std::mutex mutex_;
    std::vector<Exchange> entries_;
    std::map<std::string, std::size_t> seen_;
};

struct GatewayOptions {
    int structured_attempts = 3;
    double input_token_rate = 0.0;  // cost per input token
    double output_token_rate = 0.0; // cost per output token
    std::filesystem::path cache_dir; // empty: memory cache only
};

class Gateway {
public:
    explicit Gateway(std::unique_ptr<Backend> backend, GatewayOptions options = {});

    ChatResponse complete(const ChatRequest& request);

    // Re-asks with a repair message until the reply parses into an object holding every key.
    nlohmann::json complete_structured(ChatRequest request, const std::vector<std::string>& keys);

    EmbeddingVector embed(std::string_view text);

    UsageSnapshot usage_snapshot() const;

    BackendKind backend_kind() const { return backend_->kind(); }
    bool accepts_images() const { return backend_->accepts_images(); }
    const GatewayOptions& options() const { return options_; }

    void attach_log(std::shared_ptr<ExchangeLog> log);
    std::shared_ptr<ExchangeLog> log() const;

private:
    struct CachedReply {
        std::string text;
        Usage usage;
    };

    std::optional<CachedReply> lookup(const std::string& digest);
    void store(const std::string& digest, const CachedReply& reply);
    void record(Exchange exchange);

    std::unique_ptr<Backend> backend_;
    GatewayOptions options_;
    mutable std::mutex mutex_;
    std::map<std::string, CachedReply> cache_;
    std::map<std::string, EmbeddingVector> embeddings_;
    UsageSnapshot usage_;
    std::shared_ptr<ExchangeLog> log_;
};

std::string repair_message(const std::vector<std::string>& keys);

} // namespace kagents::llm
