#include "kagents/execution/transcript.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <stdexcept>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::execution {

using nlohmann::json;

const std::vector<std::string>& transcript_kinds() {
    static const std::vector<std::string> k = {
        "run_started", "stage_entered",   "translation",      "code_selected", "experiment_started", "figure_emitted",
        "inspection_report", "summary", "transition", "variables_updated", "run_completed"};
    return k;
}

namespace {

std::string iso_time(std::chrono::system_clock::time_point tp) {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(tp.time_since_epoch()).count();
    std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[48];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
    return out;
}

} // namespace

Transcript::Transcript(std::filesystem::path path, bool wall_clock) : path_(std::move(path)), wall_clock_(wall_clock) {
    if (path_.empty()) return;
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    out_ = std::make_unique<std::ofstream>(path_, std::ios::binary | std::ios::trunc);
    if (!*out_) throw ConfigError("cannot write transcript " + path_.string());
}

void Transcript::emit(const std::string& kind, json payload) {
    const auto& kinds = transcript_kinds();
    if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
        throw std::invalid_argument("unknown transcript event kind '" + kind + "'");
    std::lock_guard lock(mutex_);
    std::size_t seq = events_.size();
    auto tp = wall_clock_ ? std::chrono::system_clock::now()
                          : std::chrono::system_clock::time_point(std::chrono::milliseconds(seq));
    json e = {{"seq", seq}, {"timestamp", iso_time(tp)}, {"kind", kind}, {"payload", std::move(payload)}};
    if (out_) {
        *out_ << e.dump() << '\n';
        out_->flush();
    }
    events_.push_back(std::move(e));
}

std::vector<json> Transcript::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::vector<json> load_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read transcript " + path.string());
    std::vector<json> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (text::trim(line).empty()) continue;
        json e = json::parse(line, nullptr, false);
        if (e.is_discarded() || !e.is_object() || !e.contains("kind") || !e.contains("payload"))
            throw ConfigError(path.string() + ":" + std::to_string(n) + ": not a transcript event");
        out.push_back(std::move(e));
    }
    if (out.empty() || out.front()["kind"] != "run_started")
        throw ConfigError(path.string() + ": transcript does not start with run_started");
    bool completed = std::any_of(out.begin(), out.end(), [](const json& e) {
        return e["kind"] == "run_completed" && e["payload"].value("depth", 0) == 0;
    });
    if (!completed) throw ConfigError(path.string() + ": transcript is truncated (no run_completed)");
    return out;
}

std::vector<std::string> stage_label_sequence(const std::vector<json>& events) {
    std::vector<std::string> out;
    for (const auto& e : events)
        if (e.value("kind", "") == "stage_entered") out.push_back(e["payload"].value("path", e["payload"].value("label", "")));
    return out;
}

std::string default_transcript_name() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[40];
    std::strftime(buf, sizeof buf, "transcript-%Y%m%d-%H%M%S.jsonl", &tm);
    return buf;
}

} // namespace kagents::execution
