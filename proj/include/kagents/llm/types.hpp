#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace kagents::llm {

enum class Role { system, user, assistant };

std::string to_string(Role role);

struct TextPart {
    std::string text;
};

struct ImagePart {
    std::vector<std::uint8_t> bytes;
    std::string media_type = "image/png";
    std::string source; // file name or figure id, informational
};

using Part = std::variant<TextPart, ImagePart>;

struct Message {
    Role role = Role::user;
    std::vector<Part> parts;

    static Message system(std::string text);
    static Message user(std::string text);
    static Message assistant(std::string text);

    // Concatenation of the text parts.
    std::string text() const;
};

struct ChatRequest {
    std::string template_id;
    std::vector<Message> messages;
    double temperature = 0.0;
    std::string model_hint;
    std::vector<std::string> response_keys;

    bool has_images() const;
    std::string all_text() const;
};

// Throws std::invalid_argument when messages are empty or the temperature is out of range.
void validate(const ChatRequest& request);

struct Usage {
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
};

struct ChatResponse {
    std::string text;
    std::optional<nlohmann::json> structured;
    Usage usage;
    bool cache_hit = false;
    std::string digest;
};

struct EmbeddingVector {
    std::vector<double> values;

    double norm() const;
    double dot(const EmbeddingVector& other) const;
};

struct UsageSnapshot {
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    std::size_t calls = 0;
    std::size_t cache_hits = 0;
    double estimated_cost = 0.0;
};

// Rough size estimate used by offline backends.
std::size_t estimate_tokens(const std::string& text);
std::size_t estimate_tokens(const ChatRequest& request);

// Best-effort extraction of one JSON object from model output (tolerates code fences and prose).
std::optional<nlohmann::json> parse_json_object(const std::string& text);

bool has_keys(const nlohmann::json& object, const std::vector<std::string>& keys);

} // namespace kagents::llm
