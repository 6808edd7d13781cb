#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/llm/gateway.hpp"
#include "kagents/procedure/procedure_doc.hpp"

namespace kagents::execution {

inline constexpr const char* kComplete = "COMPLETE";
inline constexpr const char* kFailed = "FAILED";

// A `key = number` occurrence inside an instruction. Offsets point at the number token.
struct NumericVar {
    std::string name; // key words joined by '_', e.g. stop_time
    double value = 0;
    std::size_t offset = 0;
    std::size_t length = 0;
};

std::vector<NumericVar> extract_numeric_vars(const std::string& instruction);

struct Stage {
    std::string label;
    std::string instruction; // as extracted; numbers are re-rendered from numeric_vars
    std::string transition_rule;
    std::vector<NumericVar> numeric_vars;
    int n_executed = 0;
    int n_failed = 0;
    int n_success = 0;

    std::string rendered_instruction() const;
    std::map<std::string, double> numeric_map() const;
};

struct UpdateResult {
    std::map<std::string, std::string> applied; // update name -> numeric var name
    std::vector<std::string> skipped;           // UnknownVariableName, logged by the caller
};

// Overlays numbers by name. An update matches a numeric var when its significant words all occur
// in the var's name (so "stop" hits "stop_time"); the first match wins.
UpdateResult apply_parameter_updates(Stage& stage, const std::map<std::string, double>& updates);

// Attempt cap stated in a rule ("at most N attempts"), if any.
std::optional<int> rule_attempt_cap(const std::string& rule);

class StateMachine {
public:
    StateMachine() = default;
    // Throws EmptyStages, InvalidNextStage (a rule names an unknown stage).
    explicit StateMachine(std::vector<Stage> stages);

    const std::vector<Stage>& stages() const { return stages_; }
    Stage& stage(const std::string& label);
    const Stage& stage(const std::string& label) const;
    bool has_label(const std::string& label) const;
    static bool is_terminal(const std::string& label);

    const std::string& current() const { return current_; }
    void move_to(const std::string& label); // throws InvalidNextStage

    // Stage labels followed by the two terminals.
    std::vector<std::string> labels() const;
    // Accepts any case, "Stage 2" and the like; nullopt when no label matches.
    std::optional<std::string> normalise(const std::string& raw) const;

    nlohmann::json to_json() const;

private:
    std::vector<Stage> stages_;
    std::string current_;
};

// Two gateway calls: stage extraction, then one transition rule per stage.
// Throws StructureError, EmptyStages.
StateMachine decompose(const procedure::ProcedureDoc& doc, llm::Gateway& gateway);

} // namespace kagents::execution
