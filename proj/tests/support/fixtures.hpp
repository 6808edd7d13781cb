#pragma once

#include <memory>
#include <string>

#include "kagents/execution/variables.hpp"
#include "kagents/knowledge/registry.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::testing {

// Three decoy agents whose fingerprints copy the instruction outrank the one agent that can
// translate it, followed by six unrelated fillers. Without the target nothing is applicable.
struct EscalationFixture {
    std::unique_ptr<llm::Gateway> gateway;
    std::unique_ptr<knowledge::Registry> registry;
    execution::VariableTable table;
    std::string instruction;
    std::string target;
};

EscalationFixture escalation_fixture(bool with_target);

} // namespace kagents::testing
