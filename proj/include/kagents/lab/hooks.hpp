#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/lab/lab.hpp"
#include "kagents/lab/stark_search.hpp"
#include "kagents/llm/gateway.hpp"

// Run hooks connect registered experiments to the simulated lab. Arguments arrive as a JSON
// object keyed by the descriptor's parameter names, with device references already resolved
// to qubit names.
namespace kagents::lab {

struct HookInfo {
    std::string id;
    std::vector<std::string> parameters; // names the hook reads
    std::vector<std::string> figures;    // figure ids it emits
    bool needs_gateway = false;
};

const std::vector<HookInfo>& hook_table();
const HookInfo* find_hook(const std::string& id);

// The nested-procedure hook is listed but run by the execution agent itself.
inline constexpr const char* kExecuteProcedureHook = "execute_procedure";

// Throws LabError (and subclasses), NotFound for unknown hooks.
ExperimentRecord run_hook(const std::string& id, const nlohmann::json& args, Lab& lab, llm::Gateway* gateway,
                          const SearchSettings& search = {});

} // namespace kagents::lab
