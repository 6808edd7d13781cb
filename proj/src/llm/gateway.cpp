#include "kagents/llm/gateway.hpp"

#include <fstream>
#include <sstream>

#include "kagents/errors.hpp"
#include "kagents/llm/digest.hpp"
#include "kagents/text.hpp"

namespace kagents::llm {

std::string to_string(BackendKind kind) {
    switch (kind) {
    case BackendKind::remote: return "remote";
    case BackendKind::scripted: return "scripted";
    case BackendKind::rules: return "rules";
    }
    return "rules";
}

BackendKind backend_kind_from_string(std::string_view name) {
    std::string n = text::to_lower(name);
    if (n == "remote") return BackendKind::remote;
    if (n == "scripted") return BackendKind::scripted;
    if (n == "rules") return BackendKind::rules;
    throw ConfigError("unknown backend '" + std::string(name) + "'");
}

void ExchangeLog::record(Exchange exchange) {
    std::lock_guard lock(mutex_);
    std::string key = exchange.kind + ":" + exchange.digest;
    if (seen_.count(key)) return;
    seen_[key] = entries_.size();
    entries_.push_back(std::move(exchange));
}

std::vector<Exchange> ExchangeLog::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

nlohmann::json ExchangeLog::to_json() const {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : entries()) {
        nlohmann::json j = {{"kind", e.kind}, {"digest", e.digest}};
        if (e.kind == "embedding") {
            j["embedding"] = e.embedding;
        } else {
            j["template_id"] = e.template_id;
            j["response_text"] = e.response_text;
        }
        out.push_back(std::move(j));
    }
    return out;
}

std::vector<Exchange> ExchangeLog::from_json(const nlohmann::json& j) {
    std::vector<Exchange> out;
    for (const auto& e : j) {
        Exchange x;
        x.kind = e.value("kind", "chat");
        x.digest = e.at("digest").get<std::string>();
        x.template_id = e.value("template_id", "");
        x.response_text = e.value("response_text", "");
        if (e.contains("embedding")) x.embedding = e.at("embedding").get<std::vector<double>>();
        out.push_back(std::move(x));
    }
    return out;
}

std::string repair_message(const std::vector<std::string>& keys) {
    return "Your previous reply could not be used. Reply with one JSON object holding exactly "
           "the keys " + text::join(keys, ", ") + ". Output only the requested keys.";
}

Gateway::Gateway(std::unique_ptr<Backend> backend, GatewayOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
    if (!backend_) throw std::invalid_argument("gateway needs a backend");
    if (options_.structured_attempts < 1) options_.structured_attempts = 1;
}

void Gateway::attach_log(std::shared_ptr<ExchangeLog> log) {
    std::lock_guard lock(mutex_);
    log_ = std::move(log);
}

std::shared_ptr<ExchangeLog> Gateway::log() const {
    std::lock_guard lock(mutex_);
    return log_;
}

void Gateway::record(Exchange exchange) {
    std::shared_ptr<ExchangeLog> log;
    {
        std::lock_guard lock(mutex_);
        log = log_;
    }
    if (log) log->record(std::move(exchange));
}

std::optional<Gateway::CachedReply> Gateway::lookup(const std::string& digest) {
    {
        std::lock_guard lock(mutex_);
        auto it = cache_.find(digest);
        if (it != cache_.end()) return it->second;
    }
    if (options_.cache_dir.empty()) return std::nullopt;
    std::ifstream in(options_.cache_dir / "responses" / (digest + ".txt"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    CachedReply reply{buf.str(), {}};
    std::lock_guard lock(mutex_);
    cache_[digest] = reply;
    return reply;
}

void Gateway::store(const std::string& digest, const CachedReply& reply) {
    {
        std::lock_guard lock(mutex_);
        cache_[digest] = reply;
    }
    if (options_.cache_dir.empty()) return;
    std::error_code ec;
    auto dir = options_.cache_dir / "responses";
    std::filesystem::create_directories(dir, ec);
    auto tmp = dir / (digest + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary);
        out << reply.text;
    }
    std::filesystem::rename(tmp, dir / (digest + ".txt"), ec);
}

ChatResponse Gateway::complete(const ChatRequest& request) {
    validate(request);
    ChatResponse response;
    response.digest = request_digest(request);
    if (auto hit = lookup(response.digest)) {
        response.text = hit->text;
        response.usage = hit->usage;
        response.cache_hit = true;
        std::lock_guard lock(mutex_);
        usage_.cache_hits += 1;
    } else {
        BackendReply reply = backend_->chat(request, response.digest);
        response.text = reply.text;
        response.usage = reply.usage;
        store(response.digest, {reply.text, reply.usage});
        std::lock_guard lock(mutex_);
        usage_.calls += 1;
        usage_.input_tokens += reply.usage.input_tokens;
        usage_.output_tokens += reply.usage.output_tokens;
    }
    record({"chat", response.digest, request.template_id, response.text, {}});
    if (!request.response_keys.empty()) {
        auto parsed = parse_json_object(response.text);
        if (parsed && has_keys(*parsed, request.response_keys)) response.structured = std::move(parsed);
    }
    return response;
}

nlohmann::json Gateway::complete_structured(ChatRequest request, const std::vector<std::string>& keys) {
    if (keys.empty()) throw std::invalid_argument("structured completion needs at least one key");
    request.response_keys = keys;
    std::string last;
    for (int attempt = 0; attempt < options_.structured_attempts; ++attempt) {
        ChatResponse r = complete(request);
        if (r.structured) return *r.structured;
        last = r.text;
        request.messages.push_back(Message::assistant(r.text));
        request.messages.push_back(Message::user(repair_message(keys)));
    }
    throw StructureError("no well-formed reply for template '" + request.template_id + "' after " +
                         std::to_string(options_.structured_attempts) + " attempts; last reply: " +
                         last.substr(0, 200));
}

EmbeddingVector Gateway::embed(std::string_view text) {
    std::string key(text);
    {
        std::lock_guard lock(mutex_);
        auto it = embeddings_.find(key);
        if (it != embeddings_.end()) return it->second;
    }
    EmbeddingVector v = backend_->embed(key);
    {
        std::lock_guard lock(mutex_);
        embeddings_[key] = v;
    }
    if (backend_->kind() == BackendKind::remote)
        record({"embedding", embedding_digest(text), "", "", v.values});
    return v;
}

UsageSnapshot Gateway::usage_snapshot() const {
    std::lock_guard lock(mutex_);
    UsageSnapshot s = usage_;
    s.estimated_cost = static_cast<double>(s.input_tokens) * options_.input_token_rate +
                       static_cast<double>(s.output_tokens) * options_.output_token_rate;
    return s;
}

} // namespace kagents::llm
