#include "kagents/llm/remote_backend.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

#include "kagents/errors.hpp"
#include "kagents/llm/digest.hpp"
#include "kagents/llm/embedding.hpp"

namespace kagents::llm {

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {
    const std::string& url = options_.base_url;
    std::size_t scheme = url.find("://");
    std::size_t path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    origin_ = path == std::string::npos ? url : url.substr(0, path);
    prefix_ = path == std::string::npos ? "" : url.substr(path);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
}

nlohmann::json RemoteBackend::chat_body(const ChatRequest& request) const {
    std::string model = options_.chat_model;
    if (request.model_hint == "vision") {
        if (!options_.vision_model.empty()) model = options_.vision_model;
    } else if (!request.model_hint.empty()) {
        model = request.model_hint;
    }
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        nlohmann::json content = nlohmann::json::array();
        for (const auto& p : m.parts) {
            if (const auto* t = std::get_if<TextPart>(&p)) {
                content.push_back({{"type", "text"}, {"text", t->text}});
            } else {
                const auto& img = std::get<ImagePart>(p);
                content.push_back({{"type", "image_url"},
                                   {"image_url",
                                    {{"url", "data:" + img.media_type + ";base64," +
                                                 base64_encode(img.bytes)}}}});
            }
        }
        messages.push_back({{"role", to_string(m.role)}, {"content", content}});
    }
    nlohmann::json body = {{"model", model}, {"messages", messages},
                           {"temperature", request.temperature}};
    if (!request.response_keys.empty()) body["response_format"] = {{"type", "json_object"}};
    return body;
}

nlohmann::json RemoteBackend::post(const std::string& path, const nlohmann::json& body) {
    httplib::Client client(origin_);
    client.set_connection_timeout(options_.timeout_seconds, 0);
    client.set_read_timeout(options_.timeout_seconds, 0);
    client.set_write_timeout(options_.timeout_seconds, 0);
    httplib::Headers headers;
    if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);
    std::string payload = body.dump();
    for (int attempt = 0;; ++attempt) {
        auto res = client.Post(prefix_ + path, headers, payload, "application/json");
        if (!res) throw NetworkError("request to " + origin_ + prefix_ + path + " failed: " +
                                     httplib::to_string(res.error()));
        bool retryable = res->status == 429 || res->status >= 500;
        if (retryable && attempt < options_.max_retries) {
            std::this_thread::sleep_for(std::chrono::milliseconds(200 * (1 << attempt)));
            continue;
        }
        if (res->status < 200 || res->status >= 300)
            throw BackendError("backend returned HTTP " + std::to_string(res->status) + ": " +
                               res->body.substr(0, 300));
        auto j = nlohmann::json::parse(res->body, nullptr, false);
        if (j.is_discarded()) throw BackendError("backend returned a non-JSON body");
        return j;
    }
}

BackendReply RemoteBackend::chat(const ChatRequest& request, const std::string&) {
    nlohmann::json j = post("/chat/completions", chat_body(request));
    BackendReply reply;
    try {
        reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw BackendError("backend reply has no choices[0].message.content");
    }
    if (j.contains("usage")) {
        reply.usage.input_tokens = j["usage"].value("prompt_tokens", 0);
        reply.usage.output_tokens = j["usage"].value("completion_tokens", 0);
    }
    return reply;
}

EmbeddingVector RemoteBackend::embed(const std::string& text) {
    nlohmann::json j = post("/embeddings", {{"model", options_.embedding_model}, {"input", text}});
    try {
        return normalised(EmbeddingVector{j.at("data").at(0).at("embedding").get<std::vector<double>>()});
    } catch (const nlohmann::json::exception&) {
        throw BackendError("backend reply has no data[0].embedding");
    }
}

} // namespace kagents::llm
