#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace kagents::execution {

enum class VarKind { value, qubit, pair, qubits };

struct Variable {
    nlohmann::json value;
    std::string provenance = "initial"; // or the experiment that injected it
    VarKind kind = VarKind::value;
    std::string description;
};

bool is_identifier(const std::string& name);

// Throws std::invalid_argument on malformed names or device values.
class VariableTable {
public:
    void set_device(const std::string& name, const nlohmann::json& value, VarKind kind, std::string description = "");
    void set(const std::string& name, const nlohmann::json& value, const std::string& provenance);

    bool has(const std::string& name) const { return vars_.count(name) > 0; }
    const Variable* find(const std::string& name) const;
    const Variable& get(const std::string& name) const; // throws UnboundVariable
    std::vector<std::string> names() const;

    // (name, description) in name order; device descriptions are read back by the rules backend.
    std::vector<std::pair<std::string, std::string>> listing() const;
    std::string listing_text() const;

    nlohmann::json to_json() const;
    static VariableTable from_json(const nlohmann::json& j);

private:
    std::map<std::string, Variable> vars_;
};

std::string to_string(VarKind kind);
VarKind var_kind_from_string(const std::string& s);

} // namespace kagents::execution
