#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "kagents/llm/types.hpp"

namespace kagents::llm {

enum class BackendKind { remote, scripted, rules };

std::string to_string(BackendKind kind);
BackendKind backend_kind_from_string(std::string_view name);

struct BackendReply {
    std::string text;
    Usage usage;
};

class Backend {
public:
    virtual ~Backend() = default;
    virtual BackendKind kind() const = 0;
    virtual BackendReply chat(const ChatRequest& request, const std::string& digest) = 0;
    virtual EmbeddingVector embed(const std::string& text) = 0;
    virtual bool accepts_images() const { return false; }
};

} // namespace kagents::llm
