#include "kagents/execution/variables.hpp"

#include <cctype>
#include <stdexcept>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::execution {

using nlohmann::json;

bool is_identifier(const std::string& name) {
    if (name.empty() || !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) return false;
    for (char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::string to_string(VarKind kind) {
    switch (kind) {
    case VarKind::value: return "value";
    case VarKind::qubit: return "qubit";
    case VarKind::pair: return "pair";
    case VarKind::qubits: return "qubits";
    }
    return "value";
}

VarKind var_kind_from_string(const std::string& s) {
    if (s == "value") return VarKind::value;
    if (s == "qubit") return VarKind::qubit;
    if (s == "pair") return VarKind::pair;
    if (s == "qubits") return VarKind::qubits;
    throw std::invalid_argument("unknown variable kind '" + s + "'");
}

namespace {

std::string device_description(const json& value, VarKind kind) {
    auto names = [&] {
        std::vector<std::string> out;
        for (const auto& q : value) out.push_back(q.get<std::string>());
        return "[" + text::join(out, ", ") + "]";
    };
    switch (kind) {
    case VarKind::qubit: return "device reference to qubit " + value.get<std::string>();
    case VarKind::pair: return "device reference to qubit pair " + names();
    case VarKind::qubits: return "device reference to qubits " + names();
    case VarKind::value: break;
    }
    return {};
}

} // namespace

void VariableTable::set_device(const std::string& name, const json& value, VarKind kind, std::string description) {
    if (!is_identifier(name)) throw std::invalid_argument("invalid variable name '" + name + "'");
    bool ok = false;
    switch (kind) {
    case VarKind::qubit: ok = value.is_string(); break;
    case VarKind::pair: ok = value.is_array() && value.size() == 2; break;
    case VarKind::qubits: ok = value.is_array() && !value.empty(); break;
    case VarKind::value: ok = false; break;
    }
    if (ok && value.is_array())
        for (const auto& q : value) ok = ok && q.is_string();
    if (!ok) throw std::invalid_argument("variable '" + name + "' is not a valid " + to_string(kind) + " reference");
    Variable v;
    v.value = value;
    v.kind = kind;
    v.description = device_description(value, kind);
    if (!description.empty()) v.description += " (" + description + ")";
    vars_[name] = std::move(v);
}

void VariableTable::set(const std::string& name, const json& value, const std::string& provenance) {
    if (!is_identifier(name)) throw std::invalid_argument("invalid variable name '" + name + "'");
    Variable v;
    v.value = value;
    v.provenance = provenance;
    v.description = "value " + (value.is_number() ? text::format_number(value.get<double>()) : value.dump()) +
                    (provenance == "initial" ? "" : " (from " + provenance + ")");
    vars_[name] = std::move(v);
}

const Variable* VariableTable::find(const std::string& name) const {
    auto it = vars_.find(name);
    return it == vars_.end() ? nullptr : &it->second;
}

const Variable& VariableTable::get(const std::string& name) const {
    if (const Variable* v = find(name)) return *v;
    throw UnboundVariable("variable '" + name + "' is not defined");
}

std::vector<std::string> VariableTable::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : vars_) out.push_back(k);
    return out;
}

std::vector<std::pair<std::string, std::string>> VariableTable::listing() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [k, v] : vars_) out.emplace_back(k, v.description);
    return out;
}

std::string VariableTable::listing_text() const {
    std::string out;
    for (const auto& [k, d] : listing()) out += "- " + k + ": " + d + "\n";
    return out;
}

json VariableTable::to_json() const {
    json out = json::object();
    for (const auto& [k, v] : vars_)
        out[k] = {{"value", v.value}, {"kind", to_string(v.kind)}, {"provenance", v.provenance},
                  {"description", v.description}};
    return out;
}

VariableTable VariableTable::from_json(const json& j) {
    VariableTable t;
    for (const auto& [k, v] : j.items()) {
        Variable var;
        var.value = v.at("value");
        var.kind = var_kind_from_string(v.value("kind", "value"));
        var.provenance = v.value("provenance", "initial");
        var.description = v.value("description", "");
        if (!is_identifier(k)) throw std::invalid_argument("invalid variable name '" + k + "'");
        t.vars_[k] = std::move(var);
    }
    return t;
}

} // namespace kagents::execution
