#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kagents/llm/types.hpp"

// Prompt templates shared by the agents. Every template wraps its inputs in XML-like tags so
// the rules backend can read them back; the remote backend just sees prose.
namespace kagents::prompts {

namespace ids {
inline constexpr const char* instruction_generation = "instruction_generation";
inline constexpr const char* title_variants = "title_variants";
inline constexpr const char* code_candidate = "code_candidate";
inline constexpr const char* procedure_rewrite = "procedure_rewrite";
inline constexpr const char* code_selection = "code_selection";
inline constexpr const char* rag_translation = "rag_translation";
inline constexpr const char* stage_extraction = "stage_extraction";
inline constexpr const char* transition_rules = "transition_rules";
inline constexpr const char* stage_transition = "stage_transition";
inline constexpr const char* visual_inspection = "visual_inspection";
inline constexpr const char* result_summary = "result_summary";
inline constexpr const char* report_judgement = "report_judgement";
inline constexpr const char* final_report = "final_report";
inline constexpr const char* stark_proposal = "stark_proposal";
} // namespace ids

const std::vector<std::string>& instruction_generation_keys(); // "0".."n-1" are checked by caller
const std::vector<std::string>& code_candidate_keys();
const std::vector<std::string>& procedure_rewrite_keys();
const std::vector<std::string>& code_selection_keys();
const std::vector<std::string>& rag_translation_keys();
const std::vector<std::string>& stage_extraction_keys();
const std::vector<std::string>& transition_rules_keys();
const std::vector<std::string>& stage_transition_keys();
const std::vector<std::string>& visual_inspection_keys();
const std::vector<std::string>& result_summary_keys();
const std::vector<std::string>& report_judgement_keys();
const std::vector<std::string>& final_report_keys();
const std::vector<std::string>& stark_proposal_keys();

std::vector<std::string> numbered_keys(int count);

llm::ChatRequest instruction_generation(const std::string& experiment_name,
                                        const std::string& description, int count);

llm::ChatRequest title_variants(const std::string& title, const std::string& procedure_text,
                                int count);

llm::ChatRequest code_candidate(const std::string& experiment_name, const std::string& description,
                                const std::string& instruction, const std::string& variables);

llm::ChatRequest procedure_rewrite(const std::string& title, const std::string& procedure_text,
                                   const std::string& instruction, const std::string& variables);

struct CandidateView {
    std::string agent_id;
    std::string code;
    std::string explanation;
};

llm::ChatRequest code_selection(const std::string& instruction,
                                const std::vector<CandidateView>& candidates);

llm::ChatRequest rag_translation(const std::string& instruction,
                                 const std::vector<std::string>& descriptions,
                                 const std::string& variables);

llm::ChatRequest stage_extraction(const std::string& procedure_text);

llm::ChatRequest transition_rules(const std::string& procedure_text,
                                  const std::vector<std::pair<std::string, std::string>>& stages);

struct TransitionView {
    std::string label;
    std::string description;
    int n_executed = 0;
    int n_failed = 0;
    int n_success = 0;
    std::string reports;
    std::string rule;
    std::vector<std::string> allowed_labels;
};

llm::ChatRequest stage_transition(const TransitionView& view);

// Text parts only; the caller splices image parts into the user message.
llm::ChatRequest visual_inspection(const std::string& figure_kind, const std::string& features);
// guidance holds the hook prompt with its example images already expanded.
llm::ChatRequest visual_inspection(const std::string& figure_kind, const std::string& features,
                                   const std::vector<llm::Part>& guidance, const llm::ImagePart* figure);

llm::ChatRequest result_summary(const std::string& analysis_instructions, const std::string& reports);

llm::ChatRequest report_judgement(const std::string& report);

llm::ChatRequest final_report(const std::string& title, const std::string& results_section,
                              const std::string& history, const std::string& terminal);

struct ProposalView {
    std::string focus; // "frequency" or "amplitude"
    std::string control;
    std::string target;
    double control_frequency = 0;
    double target_frequency = 0;
    double current_frequency = 0; // set for the amplitude focus
    std::string history_jsonl;
    double zz_min = 0.1;
    double zz_max = 1.0;
    double max_amplitude = 0.5;
    double frequency_step = 40;
};

llm::ChatRequest stark_proposal(const ProposalView& view);

} // namespace kagents::prompts
