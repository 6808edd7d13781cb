#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kagents::execution {

const std::vector<std::string>& transcript_kinds();

// JSON Lines, one {seq, timestamp, kind, payload} object per event, flushed as it is emitted.
// With a logical clock the timestamp is the epoch plus seq milliseconds, so offline runs are
// byte-reproducible.
class Transcript {
public:
    explicit Transcript(std::filesystem::path path = {}, bool wall_clock = false);

    void emit(const std::string& kind, nlohmann::json payload); // throws std::invalid_argument on unknown kinds
    std::vector<nlohmann::json> events() const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    bool wall_clock_;
    std::unique_ptr<std::ofstream> out_;
    mutable std::mutex mutex_;
    std::vector<nlohmann::json> events_;
};

// Throws ConfigError when the file is missing, truncated or not a transcript.
std::vector<nlohmann::json> load_transcript(const std::filesystem::path& path);

// Stage labels of stage_entered events, nested ones prefixed by their parent path ("Stage1/Stage2").
std::vector<std::string> stage_label_sequence(const std::vector<nlohmann::json>& events);

std::string default_transcript_name();

} // namespace kagents::execution
