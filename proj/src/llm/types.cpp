#include "kagents/llm/types.hpp"

#include <cmath>
#include <stdexcept>

namespace kagents::llm {

std::string to_string(Role role) {
    switch (role) {
    case Role::system: return "system";
    case Role::user: return "user";
    case Role::assistant: return "assistant";
    }
    return "user";
}

Message Message::system(std::string text) { return {Role::system, {TextPart{std::move(text)}}}; }
Message Message::user(std::string text) { return {Role::user, {TextPart{std::move(text)}}}; }
Message Message::assistant(std::string text) { return {Role::assistant, {TextPart{std::move(text)}}}; }

std::string Message::text() const {
    std::string out;
    for (const auto& part : parts) {
        if (const auto* t = std::get_if<TextPart>(&part)) out += t->text;
    }
    return out;
}

bool ChatRequest::has_images() const {
    for (const auto& m : messages)
        for (const auto& p : m.parts)
            if (std::holds_alternative<ImagePart>(p)) return true;
    return false;
}

std::string ChatRequest::all_text() const {
    std::string out;
    for (const auto& m : messages) {
        out += m.text();
        out += "\n";
    }
    return out;
}

void validate(const ChatRequest& request) {
    if (request.messages.empty()) throw std::invalid_argument("chat request has no messages");
    if (!(request.temperature >= 0.0 && request.temperature <= 2.0))
        throw std::invalid_argument("temperature must lie in [0, 2]");
    for (const auto& m : request.messages)
        if (m.parts.empty()) throw std::invalid_argument("chat message has no parts");
}

double EmbeddingVector::norm() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return std::sqrt(s);
}

double EmbeddingVector::dot(const EmbeddingVector& other) const {
    if (values.size() != other.values.size())
        throw std::invalid_argument("embedding dimensions differ");
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * other.values[i];
    return s;
}

std::size_t estimate_tokens(const std::string& text) { return (text.size() + 3) / 4; }

std::size_t estimate_tokens(const ChatRequest& request) {
    std::size_t n = 0;
    for (const auto& m : request.messages) {
        for (const auto& p : m.parts) {
            if (const auto* t = std::get_if<TextPart>(&p)) n += estimate_tokens(t->text);
            else n += 765;
        }
    }
    return n;
}

std::optional<nlohmann::json> parse_json_object(const std::string& text) {
    auto try_parse = [](const std::string& s) -> std::optional<nlohmann::json> {
        auto j = nlohmann::json::parse(s, nullptr, false);
        if (j.is_discarded() || !j.is_object()) return std::nullopt;
        return j;
    };
    if (auto j = try_parse(text)) return j;
    // Fenced block first, then the widest brace span.
    std::size_t fence = text.find("```");
    while (fence != std::string::npos) {
        std::size_t body = text.find('\n', fence);
        if (body == std::string::npos) break;
        std::size_t end = text.find("```", body);
        if (end == std::string::npos) break;
        if (auto j = try_parse(text.substr(body + 1, end - body - 1))) return j;
        fence = text.find("```", end + 3);
    }
    std::size_t b = text.find('{');
    std::size_t e = text.rfind('}');
    if (b != std::string::npos && e != std::string::npos && e > b) {
        if (auto j = try_parse(text.substr(b, e - b + 1))) return j;
    }
    return std::nullopt;
}

bool has_keys(const nlohmann::json& object, const std::vector<std::string>& keys) {
    if (!object.is_object()) return false;
    for (const auto& k : keys)
        if (!object.contains(k)) return false;
    return true;
}

} // namespace kagents::llm
