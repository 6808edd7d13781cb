#include "fixtures.hpp"

#include "kagents/knowledge/catalog.hpp"
#include "kagents/llm/rules_backend.hpp"

namespace kagents::testing {

EscalationFixture escalation_fixture(bool with_target) {
    EscalationFixture f;
    f.instruction = "Run a Ramsey experiment on `dut` with stop time=3 us";
    f.target = "SimpleRamseyMultilevel";
    f.gateway = std::make_unique<llm::Gateway>(std::make_unique<llm::RulesBackend>());
    f.registry = std::make_unique<knowledge::Registry>(f.gateway.get());
    const auto& base = knowledge::builtin(f.target);
    auto clone = [&](const std::string& name) {
        knowledge::ExperimentDescriptor d = base;
        d.name = name;
        return d;
    };
    for (const char* name : {"DecoyAlpha", "DecoyBeta", "DecoyGamma"})
        f.registry->register_experiment(clone(name), std::vector<std::string>{f.instruction});
    if (with_target)
        f.registry->register_experiment(base, std::vector<std::string>{"Measure a Ramsey fringe"});
    for (const char* name : {"FillerOne", "FillerTwo", "FillerThree", "FillerFour", "FillerFive", "FillerSix"})
        f.registry->register_experiment(clone(name), std::vector<std::string>{"Sweep the readout resonator"});
    f.table.set_device("dut", "Q0", execution::VarKind::qubit, "the qubit under test");
    return f;
}

} // namespace kagents::testing
