#include "kagents/app/config.hpp"

#include <fstream>
#include <set>

#include "kagents/errors.hpp"

namespace kagents::app {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path data_dir() { return fs::path(KAGENTS_DATA_DIR); }

Config default_config() {
    Config c;
    c.device_file = data_dir() / "devices" / "default.json";
    c.manifest_file = data_dir() / "manifests" / "default.json";
    c.bench.translation_cases = data_dir() / "bench" / "translation_cases.jsonl";
    c.bench.translation_manifest = data_dir() / "manifests" / "benchmark.json";
    return c;
}

namespace {

fs::path resolve(const json& v, const fs::path& base) {
    fs::path p = v.get<std::string>();
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> k = {"backend", "cache_dir", "seed", "device_file", "manifest_file", "limits",
                                            "translation", "render_figures", "search", "bench"};
    return k;
}

} // namespace

Config config_from_json(const json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items())
        if (!known_keys().count(k)) throw ConfigError("unknown config key '" + k + "'");
    Config c = default_config();
    try {
        if (j.contains("backend")) {
            const json& b = j["backend"];
            if (b.contains("kind")) c.backend.kind = llm::backend_kind_from_string(b["kind"].get<std::string>());
            c.backend.base_url = b.value("base_url", c.backend.base_url);
            c.backend.chat_model = b.value("chat_model", c.backend.chat_model);
            c.backend.vision_model = b.value("vision_model", c.backend.vision_model);
            c.backend.embed_model = b.value("embed_model", c.backend.embed_model);
            c.backend.api_key_env_name = b.value("api_key_env_name", c.backend.api_key_env_name);
            if (b.contains("fixture_file")) c.backend.fixture_file = resolve(b["fixture_file"], base);
        }
        if (j.contains("cache_dir")) c.cache_dir = resolve(j["cache_dir"], base);
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("device_file")) c.device_file = resolve(j["device_file"], base);
        if (j.contains("manifest_file")) c.manifest_file = resolve(j["manifest_file"], base);
        if (j.contains("limits")) {
            const json& l = j["limits"];
            c.limits.max_stage_attempts = l.value("max_stage_attempts", c.limits.max_stage_attempts);
            c.limits.max_total_steps = l.value("max_total_steps", c.limits.max_total_steps);
            c.limits.nested_depth = l.value("nested_depth", c.limits.nested_depth);
        }
        if (j.contains("translation")) {
            c.n_k = j["translation"].value("n_k", c.n_k);
            c.n_max = j["translation"].value("n_max", c.n_max);
        }
        c.render_figures = j.value("render_figures", c.render_figures);
        if (j.contains("search")) {
            const json& s = j["search"];
            c.search.max_frequencies = s.value("max_frequencies", c.search.max_frequencies);
            c.search.max_amplitude = s.value("max_amplitude", c.search.max_amplitude);
            c.search.frequency_step = s.value("frequency_step", c.search.frequency_step);
            c.search_budget = s.value("budget", c.search_budget);
        }
        if (j.contains("bench")) {
            const json& b = j["bench"];
            if (b.contains("translation_cases")) c.bench.translation_cases = resolve(b["translation_cases"], base);
            if (b.contains("translation_manifest"))
                c.bench.translation_manifest = resolve(b["translation_manifest"], base);
            c.bench.inspection_success = b.value("inspection_success", c.bench.inspection_success);
            c.bench.inspection_failure = b.value("inspection_failure", c.bench.inspection_failure);
            c.bench.workers = b.value("workers", c.bench.workers);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config has a value of the wrong type: ") + e.what());
    }
    validate(c);
    return c;
}

void validate(const Config& c) {
    if (c.limits.max_stage_attempts < 1 || c.limits.max_total_steps < 1 || c.limits.nested_depth < 1)
        throw ConfigError("limits must be positive");
    if (c.n_k < 1 || c.n_max < c.n_k) throw ConfigError("translation needs 1 <= n_k <= n_max");
    if (c.search.max_frequencies < 1 || !(c.search.max_amplitude > 0) || !(c.search.frequency_step > 0))
        throw ConfigError("search settings must be positive");
    if (c.search_budget < 1) throw ConfigError("search budget must be positive");
    if (c.bench.inspection_success < 1 || c.bench.inspection_failure < 1 || c.bench.workers < 1)
        throw ConfigError("bench counts must be positive");
    if (c.backend.kind == llm::BackendKind::scripted && c.backend.fixture_file.empty())
        throw ConfigError("the scripted backend needs backend.fixture_file");
}

json to_json(const Config& c) {
    return {{"backend",
             {{"kind", llm::to_string(c.backend.kind)},
              {"base_url", c.backend.base_url},
              {"chat_model", c.backend.chat_model},
              {"vision_model", c.backend.vision_model},
              {"embed_model", c.backend.embed_model},
              {"api_key_env_name", c.backend.api_key_env_name},
              {"fixture_file", c.backend.fixture_file.string()}}},
            {"cache_dir", c.cache_dir.string()},
            {"seed", c.seed},
            {"device_file", c.device_file.string()},
            {"manifest_file", c.manifest_file.string()},
            {"limits",
             {{"max_stage_attempts", c.limits.max_stage_attempts},
              {"max_total_steps", c.limits.max_total_steps},
              {"nested_depth", c.limits.nested_depth}}},
            {"translation", {{"n_k", c.n_k}, {"n_max", c.n_max}}},
            {"render_figures", c.render_figures},
            {"search",
             {{"max_frequencies", c.search.max_frequencies},
              {"max_amplitude", c.search.max_amplitude},
              {"frequency_step", c.search.frequency_step},
              {"budget", c.search_budget}}},
            {"bench",
             {{"translation_cases", c.bench.translation_cases.string()},
              {"translation_manifest", c.bench.translation_manifest.string()},
              {"inspection_success", c.bench.inspection_success},
              {"inspection_failure", c.bench.inspection_failure},
              {"workers", c.bench.workers}}}};
}

Config load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
    return config_from_json(j, path.parent_path());
}

} // namespace kagents::app
