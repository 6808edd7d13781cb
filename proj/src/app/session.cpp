#include "kagents/app/session.hpp"

#include <cstdlib>

#include "kagents/errors.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/llm/remote_backend.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/llm/scripted_backend.hpp"
#include "kagents/procedure/procedure_doc.hpp"

namespace kagents::app {

using nlohmann::json;
namespace fs = std::filesystem;

std::unique_ptr<llm::Backend> make_backend(const BackendConfig& b) {
    switch (b.kind) {
    case llm::BackendKind::rules: return std::make_unique<llm::RulesBackend>();
    case llm::BackendKind::scripted:
        return std::make_unique<llm::ScriptedBackend>(llm::ScriptedBackend::from_jsonl(b.fixture_file));
    case llm::BackendKind::remote: {
        const char* key = std::getenv(b.api_key_env_name.c_str());
        if (!key || !*key) throw ConfigError("environment variable " + b.api_key_env_name + " holds no API key");
        llm::RemoteOptions o;
        o.base_url = b.base_url;
        o.api_key = key;
        o.chat_model = b.chat_model;
        o.vision_model = b.vision_model;
        o.embedding_model = b.embed_model;
        return std::make_unique<llm::RemoteBackend>(o);
    }
    }
    throw ConfigError("unknown backend kind");
}

void register_manifest(knowledge::Registry& registry, const knowledge::Manifest& manifest, const json& fingerprints) {
    auto sentences = [&](const std::string& id) -> std::optional<std::vector<std::string>> {
        if (!fingerprints.contains(id)) return std::nullopt;
        return fingerprints[id].get<std::vector<std::string>>();
    };
    for (const auto& d : manifest.experiments) registry.register_experiment(d, sentences(d.name));
    for (const auto& p : manifest.procedures)
        registry.register_procedure(p, sentences(knowledge::procedure_agent_id(p.title)));
}

Session open_session(const Config& config, std::unique_ptr<llm::Backend> backend, const lab::DeviceSpec& device,
                     const knowledge::Manifest& manifest, const json& fingerprints) {
    Session s;
    s.config = config;
    s.log = std::make_shared<llm::ExchangeLog>();
    llm::GatewayOptions go;
    go.cache_dir = config.cache_dir;
    s.gateway = std::make_unique<llm::Gateway>(std::move(backend), go);
    s.gateway->attach_log(s.log);
    s.device = device;
    s.lab = std::make_unique<lab::Lab>(device, config.seed);
    s.manifest = manifest;
    knowledge::RegistryOptions ro;
    ro.asset_dir = manifest.asset_dir;
    s.registry = std::make_unique<knowledge::Registry>(s.gateway.get(), ro);
    register_manifest(*s.registry, manifest, fingerprints);
    return s;
}

Session open_session(const Config& config) {
    auto backend = make_backend(config.backend);
    lab::DeviceSpec device;
    try {
        device = lab::load_device(config.device_file);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError("device file " + config.device_file.string() + ": " + e.what());
    }
    knowledge::Manifest m;
    try {
        m = knowledge::load_manifest(config.manifest_file);
    } catch (const ProcedureParseError& e) {
        throw ManifestError(config.manifest_file.string() + ": " + e.what());
    }
    return open_session(config, std::move(backend), device, m);
}

execution::VariableTable device_variables(const lab::DeviceSpec& device) {
    execution::VariableTable t;
    for (const auto& [name, v] : device.variables.items()) {
        if (v.is_string()) t.set_device(name, v, execution::VarKind::qubit);
        else if (v.is_array() && v.size() == 2) t.set_device(name, v, execution::VarKind::pair);
        else t.set_device(name, v, execution::VarKind::qubits);
    }
    return t;
}

execution::ExecutionOptions execution_options(const Config& config) {
    execution::ExecutionOptions o;
    o.limits = config.limits;
    o.n_k = config.n_k;
    o.n_max = config.n_max;
    o.search = config.search;
    o.render_figures = config.render_figures;
    return o;
}

RunOutcome run_procedure(Session& session, const procedure::ProcedureDoc& doc, execution::VariableTable table,
                         const fs::path& transcript_path, const std::string& command,
                         std::optional<execution::ExecutionOptions> options) {
    execution::ExecutionOptions o = options ? *options : execution_options(session.config);
    if (o.render_figures && o.figure_dir.empty())
        o.figure_dir = (transcript_path.has_parent_path() ? transcript_path.parent_path() : fs::path(".")) / "figures";
    json experiments = json::array();
    for (const auto& d : session.manifest.experiments) experiments.push_back(knowledge::to_json(d));
    json procedures = json::array();
    for (const auto& p : session.manifest.procedures) procedures.push_back(procedure::render(p));
    o.run_context = {{"command", command},
                     {"config", to_json(session.config)},
                     {"backend", llm::to_string(session.gateway->backend_kind())},
                     {"accepts_images", session.gateway->accepts_images()},
                     {"device", lab::to_json(session.device)},
                     {"manifest",
                      {{"experiments", experiments},
                       {"procedures", procedures},
                       {"asset_dir", session.manifest.asset_dir.string()}}},
                     {"fingerprints", session.registry->fingerprint_sentences()},
                     {"execution",
                      {{"n_k", o.n_k},
                       {"n_max", o.n_max},
                       {"max_stage_attempts", o.limits.max_stage_attempts},
                       {"max_total_steps", o.limits.max_total_steps},
                       {"nested_depth", o.limits.nested_depth},
                       {"max_frequencies", o.search.max_frequencies},
                       {"max_amplitude", o.search.max_amplitude},
                       {"frequency_step", o.search.frequency_step}}}};
    o.exchange_log = session.log;
    execution::Transcript transcript(transcript_path);
    execution::ExecutionAgent agent(*session.registry, *session.gateway, *session.lab, transcript, o);
    RunOutcome out;
    out.report = agent.run(doc, table);
    out.transcript = transcript_path;
    return out;
}

} // namespace kagents::app
