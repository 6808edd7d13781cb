#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "kagents/execution/agent.hpp"
#include "kagents/llm/backend.hpp"

namespace kagents::app {

struct BackendConfig {
    llm::BackendKind kind = llm::BackendKind::rules;
    std::string base_url = "https://api.openai.com/v1";
    std::string chat_model = "gpt-4o";
    std::string vision_model;
    std::string embed_model = "text-embedding-3-large";
    std::string api_key_env_name = "OPENAI_API_KEY";
    std::filesystem::path fixture_file; // scripted backend responses (JSON Lines)
};

struct BenchConfig {
    std::filesystem::path translation_cases;
    std::filesystem::path translation_manifest;
    int inspection_success = 100;
    int inspection_failure = 100;
    int workers = 1;
};

// Relative paths in a config file resolve against the file's directory; the built-in defaults
// point into the shipped data directory.
struct Config {
    BackendConfig backend;
    std::filesystem::path cache_dir;
    std::uint64_t seed = 7;
    std::filesystem::path device_file;
    std::filesystem::path manifest_file;
    execution::Limits limits;
    int n_k = 3;
    int n_max = 9;
    bool render_figures = false;
    lab::SearchSettings search;
    int search_budget = 100;
    BenchConfig bench;
};

Config default_config();
Config config_from_json(const nlohmann::json& j, const std::filesystem::path& base = {});
nlohmann::json to_json(const Config& c);
// Throws ConfigError.
Config load_config(const std::filesystem::path& path);
void validate(const Config& c);

std::filesystem::path data_dir();

} // namespace kagents::app
