#pragma once

#include <optional>
#include <string>

#include "kagents/lab/lab.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::lab {

struct StarkProposal {
    double frequency = 0;
    double amp_control = 0;
    double rise = 0.015;
    double width = 0;
    double phase_diff = 0;
    bool zz_positive = true;
    std::string analysis;
};

struct SearchSettings {
    int max_frequencies = 20;
    double max_amplitude = 0.4;
    double frequency_step = 40;
};

// One step of the siZZle parameter search. focus is "frequency" or "amplitude"; the amplitude
// focus keeps current_frequency. Throws SearchBudgetExceeded when a new frequency would exceed
// max_frequencies, StructureError on unusable model output.
StarkProposal propose_stark_params(llm::Gateway& gateway, const Lab& lab, const std::string& control,
                                   const std::string& target, const std::string& focus,
                                   std::optional<double> current_frequency, const SearchSettings& settings = {});

int distinct_frequencies(const std::vector<StarkAttempt>& attempts);

} // namespace kagents::lab
