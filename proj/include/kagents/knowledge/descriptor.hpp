#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kagents::knowledge {

enum class ParamKind { number, string, boolean, list, device_ref };

std::string to_string(ParamKind kind);
ParamKind param_kind_from_string(const std::string& name);

struct ParameterSpec {
    std::string name;
    ParamKind kind = ParamKind::number;
    std::string unit;
    std::optional<nlohmann::json> default_value;
    bool required = false;
    std::string description;
    std::string device_kind; // "qubit", "pair" or "qubits" for device references
};

struct VisualHook {
    std::string figure_id;
    std::string prompt; // may hold Image("file.png") references
};

struct ExperimentDescriptor {
    std::string name;
    std::string doc;
    std::vector<ParameterSpec> parameters;
    std::string analysis_instructions;
    std::string run_hook;
    std::vector<VisualHook> visual_hooks;
    std::vector<std::string> text_hooks;
    std::vector<std::string> activation_sentences; // hand-written; generated when empty
    bool internal = false; // registered without a translation agent

    const ParameterSpec* parameter(const std::string& name) const;
};

// Listing used in prompts; the rules backend parses it back.
std::string describe(const ExperimentDescriptor& d);

// Throws InvalidDoc.
void check_doc(const ExperimentDescriptor& d);

nlohmann::json to_json(const ExperimentDescriptor& d);
ExperimentDescriptor descriptor_from_json(const nlohmann::json& j);

} // namespace kagents::knowledge
