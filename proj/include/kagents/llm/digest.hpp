#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kagents/llm/types.hpp"

namespace kagents::llm {

std::string sha256_hex(std::string_view data);
std::string sha256_hex(const std::vector<std::uint8_t>& data);
std::string base64_encode(const std::vector<std::uint8_t>& data);

// Stable identity of a request: template, messages (image bytes included), temperature, model hint.
std::string request_digest(const ChatRequest& request);

std::string embedding_digest(std::string_view text);

} // namespace kagents::llm
