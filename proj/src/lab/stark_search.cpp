#include "kagents/lab/stark_search.hpp"

#include <cmath>
#include <set>

#include "kagents/errors.hpp"
#include "kagents/prompts.hpp"

namespace kagents::lab {

int distinct_frequencies(const std::vector<StarkAttempt>& attempts) {
    std::set<long long> seen;
    for (const auto& a : attempts) seen.insert(std::llround(a.frequency * 1e6));
    return static_cast<int>(seen.size());
}

StarkProposal propose_stark_params(llm::Gateway& gateway, const Lab& lab, const std::string& control,
                                   const std::string& target, const std::string& focus,
                                   std::optional<double> current_frequency, const SearchSettings& settings) {
    if (focus != "frequency" && focus != "amplitude") throw LabError("unknown proposal focus '" + focus + "'");
    const PairTruth& pair = lab.pair(control, target);
    auto attempts = lab.stark_attempts(control, target);
    prompts::ProposalView v;
    v.focus = focus;
    v.control = control;
    v.target = target;
    v.control_frequency = lab.calibration(control).f01;
    v.target_frequency = lab.calibration(target).f01;
    v.current_frequency = current_frequency.value_or(0.0);
    v.zz_min = pair.zz_min;
    v.zz_max = pair.zz_max;
    v.max_amplitude = settings.max_amplitude;
    v.frequency_step = settings.frequency_step;
    for (const auto& a : attempts) {
        nlohmann::json j = {{"frequency", a.frequency}, {"amp_control", a.amp_control}, {"outcome", a.outcome},
                            {"zz", a.zz}};
        v.history_jsonl += j.dump() + "\n";
    }
    auto out = gateway.complete_structured(prompts::stark_proposal(v), prompts::stark_proposal_keys());
    StarkProposal p;
    try {
        p.frequency = out.at("frequency").get<double>();
        p.amp_control = out.at("amp_control").get<double>();
        p.rise = out.at("rise").get<double>();
        p.width = out.at("width").get<double>();
        p.phase_diff = out.at("phase_diff").get<double>();
        p.zz_positive = out.at("zz_interaction_positive").get<bool>();
        p.analysis = out.value("analysis", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw StructureError(std::string("stark proposal has a field of the wrong type: ") + e.what());
    }
    if (!(p.frequency > 0) || !(p.amp_control > 0)) throw StructureError("stark proposal is not physical");
    p.amp_control = std::min(p.amp_control, settings.max_amplitude);
    bool fresh = true;
    for (const auto& a : attempts)
        if (std::abs(a.frequency - p.frequency) < 1e-6) fresh = false;
    if (fresh && distinct_frequencies(attempts) >= settings.max_frequencies)
        throw SearchBudgetExceeded("already tried " + std::to_string(settings.max_frequencies) + " drive frequencies");
    return p;
}

} // namespace kagents::lab
