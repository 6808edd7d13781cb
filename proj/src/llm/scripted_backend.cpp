#include "kagents/llm/scripted_backend.hpp"

#include <fstream>

#include "kagents/errors.hpp"
#include "kagents/llm/digest.hpp"
#include "kagents/llm/embedding.hpp"
#include "kagents/text.hpp"

namespace kagents::llm {

ScriptedBackend::ScriptedBackend(std::vector<Entry> entries) {
    for (auto& e : entries) add(std::move(e));
}

void ScriptedBackend::add(Entry entry) {
    if (!entry.digest.empty()) {
        by_digest_.emplace(entry.digest, entry.response_text);
    } else {
        patterns_.push_back(std::move(entry));
    }
}

void ScriptedBackend::add_embedding(const std::string& digest, std::vector<double> values) {
    embeddings_[digest] = std::move(values);
}

ScriptedBackend ScriptedBackend::from_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open fixture file " + path.string());
    ScriptedBackend backend;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        auto j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": not a JSON object");
        if (j.contains("embedding")) {
            backend.add_embedding(j.at("digest").get<std::string>(),
                                  j.at("embedding").get<std::vector<double>>());
            continue;
        }
        Entry e;
        e.digest = j.value("digest", "");
        e.template_id = j.value("template_id", "");
        if (j.contains("contains")) {
            if (j["contains"].is_string()) e.contains.push_back(j["contains"].get<std::string>());
            else e.contains = j["contains"].get<std::vector<std::string>>();
        }
        e.response_text = j.value("response_text", "");
        backend.add(std::move(e));
    }
    return backend;
}

ScriptedBackend ScriptedBackend::from_exchanges(const std::vector<Exchange>& exchanges) {
    ScriptedBackend backend;
    for (const auto& x : exchanges) {
        if (x.kind == "embedding") backend.add_embedding(x.digest, x.embedding);
        else backend.add({x.digest, x.template_id, {}, x.response_text});
    }
    return backend;
}

BackendReply ScriptedBackend::chat(const ChatRequest& request, const std::string& digest) {
    auto reply = [&](const std::string& text) {
        return BackendReply{text, {estimate_tokens(request), estimate_tokens(text)}};
    };
    if (auto it = by_digest_.find(digest); it != by_digest_.end()) return reply(it->second);
    std::string all = request.all_text();
    for (const auto& p : patterns_) {
        if (!p.template_id.empty() && p.template_id != request.template_id) continue;
        bool ok = true;
        for (const auto& c : p.contains)
            if (all.find(c) == std::string::npos) ok = false;
        if (ok) return reply(p.response_text);
    }
    throw FixtureMiss("no scripted response for template '" + request.template_id + "' (digest " +
                      digest + ")");
}

EmbeddingVector ScriptedBackend::embed(const std::string& text) {
    if (auto it = embeddings_.find(embedding_digest(text)); it != embeddings_.end())
        return EmbeddingVector{it->second};
    return hashed_embedding(text);
}

} // namespace kagents::llm
