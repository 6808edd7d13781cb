#include "kagents/llm/digest.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <stdexcept>

#include "kagents/text.hpp"

namespace kagents::llm {

namespace {

std::string hex(const unsigned char* bytes, std::size_t n) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(digits[bytes[i] >> 4]);
        out.push_back(digits[bytes[i] & 0xF]);
    }
    return out;
}

} // namespace

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md.data());
    return hex(md.data(), md.size());
}

std::string sha256_hex(const std::vector<std::uint8_t>& data) {
    return sha256_hex(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()));
}

std::string base64_encode(const std::vector<std::uint8_t>& data) {
    if (data.empty()) return {};
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                            static_cast<int>(data.size()));
    if (n < 0) throw std::runtime_error("base64 encoding failed");
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string request_digest(const ChatRequest& request) {
    nlohmann::json canonical;
    canonical["template"] = request.template_id;
    canonical["temperature"] = text::format_number(request.temperature);
    canonical["model"] = request.model_hint;
    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : request.messages) {
        nlohmann::json parts = nlohmann::json::array();
        for (const auto& p : m.parts) {
            if (const auto* t = std::get_if<TextPart>(&p)) {
                parts.push_back({{"text", t->text}});
            } else {
                const auto& img = std::get<ImagePart>(p);
                parts.push_back({{"image", sha256_hex(img.bytes)}, {"media", img.media_type}});
            }
        }
        messages.push_back({{"role", to_string(m.role)}, {"parts", parts}});
    }
    canonical["messages"] = messages;
    return sha256_hex(canonical.dump());
}

std::string embedding_digest(std::string_view text) {
    return sha256_hex("embedding\n" + std::string(text));
}

} // namespace kagents::llm
