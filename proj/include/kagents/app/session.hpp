#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "kagents/app/config.hpp"
#include "kagents/execution/agent.hpp"
#include "kagents/knowledge/registry.hpp"
#include "kagents/lab/lab.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::app {

// Throws ConfigError when the remote API key is missing or the fixture file is unreadable.
std::unique_ptr<llm::Backend> make_backend(const BackendConfig& b);

// Everything one invocation needs: gateway with an exchange log, lab, registry.
struct Session {
    Config config;
    std::shared_ptr<llm::ExchangeLog> log;
    std::unique_ptr<llm::Gateway> gateway;
    lab::DeviceSpec device;
    std::unique_ptr<lab::Lab> lab;
    knowledge::Manifest manifest;
    std::unique_ptr<knowledge::Registry> registry;
};

// fingerprints (agent id -> sentences) replace generation, for replay.
void register_manifest(knowledge::Registry& registry, const knowledge::Manifest& manifest,
                       const nlohmann::json& fingerprints = nlohmann::json::object());

Session open_session(const Config& config);
Session open_session(const Config& config, std::unique_ptr<llm::Backend> backend, const lab::DeviceSpec& device,
                     const knowledge::Manifest& manifest, const nlohmann::json& fingerprints = nlohmann::json::object());

// Device references from the device file: a string names a qubit, two names a pair, more a list.
execution::VariableTable device_variables(const lab::DeviceSpec& device);

struct RunOutcome {
    execution::FinalReport report;
    std::filesystem::path transcript;
};

execution::ExecutionOptions execution_options(const Config& config);

// Runs a procedure and records everything replay needs in the transcript.
RunOutcome run_procedure(Session& session, const procedure::ProcedureDoc& doc, execution::VariableTable table,
                         const std::filesystem::path& transcript_path, const std::string& command = "run",
                         std::optional<execution::ExecutionOptions> options = std::nullopt);

} // namespace kagents::app
