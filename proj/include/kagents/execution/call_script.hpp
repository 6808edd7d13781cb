#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/execution/variables.hpp"
#include "kagents/knowledge/registry.hpp"

// Call scripts: optional `name = value` lines, then a final
//   experiment_<id> = <ExperimentName>(k=v, ...)
// Values are numbers, quoted strings, booleans, flat lists, or bare identifiers (variable refs).
namespace kagents::execution {

struct Value {
    enum class Kind { literal, ref, list };
    Kind kind = Kind::literal;
    nlohmann::json literal;
    std::string ref;
    std::vector<Value> items;
};

struct Argument {
    std::string name;
    Value value;
};

struct CallPlan {
    std::string experiment_name;
    std::string result_binding; // experiment_<id>
    std::vector<Argument> arguments;
    std::vector<std::pair<std::string, Value>> assignments;
};

// Throws GrammarError with line and column.
CallPlan parse_call_script(const std::string& text);

struct BoundCall {
    std::string experiment;
    std::string result_binding;
    nlohmann::json arguments = nlohmann::json::object(); // defaults filled, refs resolved
};

// Throws UnknownExperiment, UnknownParameter, UnboundVariable, MissingArgument.
BoundCall bind_call(const CallPlan& plan, const knowledge::Registry& registry, const VariableTable& table);

// Grammar plus registry checks in one go.
BoundCall parse_and_bind(const std::string& text, const knowledge::Registry& registry, const VariableTable& table);

std::string render(const Value& v);

} // namespace kagents::execution
