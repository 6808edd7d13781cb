#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/execution/state_machine.hpp"
#include "kagents/execution/transcript.hpp"
#include "kagents/execution/variables.hpp"
#include "kagents/inspection/inspector.hpp"
#include "kagents/knowledge/registry.hpp"
#include "kagents/lab/lab.hpp"
#include "kagents/lab/stark_search.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::execution {

struct Limits {
    int max_stage_attempts = 3;
    int max_total_steps = 100;
    int nested_depth = 4;
};

struct ExecutionOptions {
    Limits limits;
    int n_k = 3;
    int n_max = 9;
    lab::SearchSettings search;
    bool render_figures = false;
    std::filesystem::path figure_dir;
    // Merged into the top-level run_started payload; replay reads its setup from here.
    nlohmann::json run_context = nlohmann::json::object();
    // When set, its entries are stored in the top-level run_completed payload.
    std::shared_ptr<llm::ExchangeLog> exchange_log;
};

struct FinalReport {
    std::string title;
    std::string text;
    bool success = false;
    std::string terminal;
    int steps = 0;
    std::vector<std::string> label_sequence;
    nlohmann::json stages = nlohmann::json::array(); // per-stage counters and last summary
    std::string error;                               // StepBudgetExceeded and the like

    nlohmann::json to_json() const;
};

struct Transition {
    std::string next;
    std::string analysis;
    bool forced = false;
    std::map<std::string, double> updates;
};

class ExecutionAgent {
public:
    ExecutionAgent(const knowledge::Registry& registry, llm::Gateway& gateway, lab::Lab& lab, Transcript& transcript,
                   ExecutionOptions options = {});

    // Algorithm loop from the first stage to a terminal. Always returns a report.
    FinalReport run(const procedure::ProcedureDoc& doc, VariableTable& table);

    // One stage: translate, bind, run, inspect, summarise. Errors turn into a failure summary.
    inspection::SummaryReport execute_stage(Stage& stage, VariableTable& table, int depth = 0,
                                            const std::string& path = "");

    Transition decide_transition(const Stage& stage, const inspection::SummaryReport& summary,
                                 const StateMachine& machine);

    const ExecutionOptions& options() const { return options_; }

private:
    FinalReport run_at(const procedure::ProcedureDoc& doc, VariableTable& table, int depth, const std::string& prefix);
    lab::ExperimentRecord run_nested(const nlohmann::json& args, const VariableTable& table, int depth,
                                     const std::string& path);
    void emit(const std::string& kind, nlohmann::json payload, int depth);

    const knowledge::Registry& registry_;
    llm::Gateway& gateway_;
    lab::Lab& lab_;
    Transcript& transcript_;
    ExecutionOptions options_;
    inspection::Inspector inspector_;
    int figure_count_ = 0;
};

// "Experiment success: ..." header followed by the inspector reports; read by the transition prompt.
std::string transition_reports(const inspection::SummaryReport& summary);

} // namespace kagents::execution
