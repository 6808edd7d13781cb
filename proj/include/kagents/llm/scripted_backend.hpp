#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kagents/llm/backend.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::llm {

// Replays recorded responses. Lookup is by request digest; entries without a digest match on
// template id plus substrings of the request text, first match wins.
class ScriptedBackend : public Backend {
public:
    struct Entry {
        std::string digest;
        std::string template_id;
        std::vector<std::string> contains;
        std::string response_text;
    };

    ScriptedBackend() = default;
    explicit ScriptedBackend(std::vector<Entry> entries);

    static ScriptedBackend from_jsonl(const std::filesystem::path& path);
    static ScriptedBackend from_exchanges(const std::vector<Exchange>& exchanges);

    void add(Entry entry);
    void add_embedding(const std::string& digest, std::vector<double> values);

    BackendKind kind() const override { return BackendKind::scripted; }
    BackendReply chat(const ChatRequest& request, const std::string& digest) override;
    EmbeddingVector embed(const std::string& text) override;
    bool accepts_images() const override { return images_; }
    // Replays must mirror the recorded backend, which may not have taken images.
    void set_accepts_images(bool v) { images_ = v; }

private:
    bool images_ = true;
    std::map<std::string, std::string> by_digest_;
    std::vector<Entry> patterns_;
    std::map<std::string, std::vector<double>> embeddings_;
};

} // namespace kagents::llm
