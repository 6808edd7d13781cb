#include "kagents/knowledge/descriptor.hpp"

#include <cctype>
#include <set>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::knowledge {

std::string to_string(ParamKind kind) {
    switch (kind) {
    case ParamKind::number: return "number";
    case ParamKind::string: return "string";
    case ParamKind::boolean: return "boolean";
    case ParamKind::list: return "list";
    case ParamKind::device_ref: return "device";
    }
    return "number";
}

ParamKind param_kind_from_string(const std::string& name) {
    if (name == "number") return ParamKind::number;
    if (name == "string") return ParamKind::string;
    if (name == "boolean") return ParamKind::boolean;
    if (name == "list") return ParamKind::list;
    if (name == "device") return ParamKind::device_ref;
    throw InvalidDoc("unknown parameter kind '" + name + "'");
}

const ParameterSpec* ExperimentDescriptor::parameter(const std::string& pname) const {
    for (const auto& p : parameters)
        if (p.name == pname) return &p;
    return nullptr;
}

std::string describe(const ExperimentDescriptor& d) {
    std::string out = "Name: " + d.name + "\nSummary: " + d.doc + "\nParameters:\n";
    for (const auto& p : d.parameters) {
        std::vector<std::string> attrs;
        if (p.kind == ParamKind::device_ref) {
            if (p.device_kind == "pair") attrs.push_back("qubit pair reference");
            else if (p.device_kind == "qubits") attrs.push_back("qubit list reference");
            else attrs.push_back("qubit reference");
        } else {
            attrs.push_back(to_string(p.kind));
        }
        if (!p.unit.empty()) attrs.push_back("unit " + p.unit);
        if (p.required) attrs.push_back("required");
        else if (p.default_value) attrs.push_back("default " + p.default_value->dump());
        else attrs.push_back("optional");
        out += "- " + p.name + " (" + text::join(attrs, ", ") + "): " + p.description + "\n";
    }
    return out;
}

void check_doc(const ExperimentDescriptor& d) {
    if (d.name.empty()) throw InvalidDoc("experiment has no name");
    for (char c : d.name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
            throw InvalidDoc("experiment name '" + d.name + "' is not an identifier");
    if (text::trim(d.doc).empty()) throw InvalidDoc(d.name + ": empty documentation");
    std::set<std::string> seen;
    for (const auto& p : d.parameters) {
        if (p.name.empty()) throw InvalidDoc(d.name + ": parameter without a name");
        if (!seen.insert(p.name).second) throw InvalidDoc(d.name + ": parameter '" + p.name + "' declared twice");
        if (text::trim(p.description).empty())
            throw InvalidDoc(d.name + ": parameter '" + p.name + "' has no description");
        if (p.required && p.default_value)
            throw InvalidDoc(d.name + ": required parameter '" + p.name + "' has a default");
    }
    if (d.run_hook.empty()) throw InvalidDoc(d.name + ": no run hook");
}

nlohmann::json to_json(const ExperimentDescriptor& d) {
    nlohmann::json params = nlohmann::json::array();
    for (const auto& p : d.parameters) {
        nlohmann::json j = {{"name", p.name}, {"kind", to_string(p.kind)}, {"unit", p.unit},
                            {"required", p.required}, {"description", p.description},
                            {"device_kind", p.device_kind}};
        if (p.default_value) j["default"] = *p.default_value;
        params.push_back(std::move(j));
    }
    nlohmann::json hooks = nlohmann::json::array();
    for (const auto& h : d.visual_hooks) hooks.push_back({{"figure_id", h.figure_id}, {"prompt", h.prompt}});
    return {{"name", d.name}, {"doc", d.doc}, {"parameters", params},
            {"analysis_instructions", d.analysis_instructions}, {"run_hook", d.run_hook},
            {"visual_hooks", hooks}, {"text_hooks", d.text_hooks},
            {"activation_sentences", d.activation_sentences}, {"internal", d.internal}};
}

ExperimentDescriptor descriptor_from_json(const nlohmann::json& j) {
    ExperimentDescriptor d;
    try {
        d.name = j.at("name").get<std::string>();
        d.doc = j.value("doc", "");
        for (const auto& p : j.value("parameters", nlohmann::json::array())) {
            ParameterSpec s;
            s.name = p.at("name").get<std::string>();
            s.kind = param_kind_from_string(p.value("kind", "number"));
            s.unit = p.value("unit", "");
            s.required = p.value("required", false);
            s.description = p.value("description", "");
            s.device_kind = p.value("device_kind", "");
            if (p.contains("default")) s.default_value = p["default"];
            d.parameters.push_back(std::move(s));
        }
        d.analysis_instructions = j.value("analysis_instructions", "");
        d.run_hook = j.value("run_hook", "");
        for (const auto& h : j.value("visual_hooks", nlohmann::json::array()))
            d.visual_hooks.push_back({h.at("figure_id").get<std::string>(), h.value("prompt", "")});
        d.text_hooks = j.value("text_hooks", std::vector<std::string>{});
        d.activation_sentences = j.value("activation_sentences", std::vector<std::string>{});
        d.internal = j.value("internal", false);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidDoc(std::string("malformed experiment descriptor: ") + e.what());
    }
    return d;
}

} // namespace kagents::knowledge
