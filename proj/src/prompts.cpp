#include "kagents/prompts.hpp"

#include "kagents/text.hpp"

namespace kagents::prompts {

namespace {

const char* kSystem =
    "You are an assistant inside a laboratory automation system for superconducting qubits. "
    "Answer with a single JSON object and nothing else.";

llm::ChatRequest make(const char* id, std::string user, std::vector<std::string> keys,
                      std::string model_hint = "") {
    llm::ChatRequest r;
    r.template_id = id;
    r.messages.push_back(llm::Message::system(kSystem));
    r.messages.push_back(llm::Message::user(std::move(user)));
    r.response_keys = std::move(keys);
    r.model_hint = std::move(model_hint);
    return r;
}

std::string block(const std::string& tag, const std::string& body) {
    return "<" + tag + ">\n" + body + "\n</" + tag + ">\n";
}

} // namespace

const std::vector<std::string>& code_candidate_keys() {
    static const std::vector<std::string> k = {"experiment_name_in_slot", "analysis", "applicable",
                                               "code", "explanation", "suitable"};
    return k;
}
const std::vector<std::string>& procedure_rewrite_keys() {
    static const std::vector<std::string> k = {"parameter_specification", "analysis", "proper",
                                               "rewritten_instruction", "parameter_mapping",
                                               "annotation"};
    return k;
}
const std::vector<std::string>& code_selection_keys() {
    static const std::vector<std::string> k = {"analysis", "code"};
    return k;
}
const std::vector<std::string>& rag_translation_keys() {
    static const std::vector<std::string> k = {"analysis", "code"};
    return k;
}
const std::vector<std::string>& stage_extraction_keys() {
    static const std::vector<std::string> k = {"instructions"};
    return k;
}
const std::vector<std::string>& transition_rules_keys() {
    static const std::vector<std::string> k = {"rules"};
    return k;
}
const std::vector<std::string>& stage_transition_keys() {
    static const std::vector<std::string> k = {"analysis", "next"};
    return k;
}
const std::vector<std::string>& visual_inspection_keys() {
    static const std::vector<std::string> k = {"analysis", "success"};
    return k;
}
const std::vector<std::string>& result_summary_keys() {
    static const std::vector<std::string> k = {"analysis", "success", "parameter_updates"};
    return k;
}
const std::vector<std::string>& report_judgement_keys() {
    static const std::vector<std::string> k = {"analysis", "success"};
    return k;
}
const std::vector<std::string>& final_report_keys() {
    static const std::vector<std::string> k = {"success", "report"};
    return k;
}
const std::vector<std::string>& stark_proposal_keys() {
    static const std::vector<std::string> k = {"analysis", "frequency", "amp_control", "rise",
                                               "width", "phase_diff", "zz_interaction_positive"};
    return k;
}

std::vector<std::string> numbered_keys(int count) {
    std::vector<std::string> k;
    for (int i = 0; i < count; ++i) k.push_back(std::to_string(i));
    return k;
}

llm::ChatRequest instruction_generation(const std::string& experiment_name,
                                        const std::string& description, int count) {
    std::string user =
        "Below is the description of an experiment class that can be run in the lab.\n" +
        block("experiment_name", experiment_name) + block("experiment", description) +
        "Write <count>" + std::to_string(count) + "</count> different short instructions a "
        "scientist might give when asking for this experiment. Use varied wording. Each "
        "instruction must name the experiment in plain words (not the class name) and may "
        "mention some parameters with invented values.\n"
        "Reply with a JSON object mapping \"0\", \"1\", ... to the instructions.";
    return make(ids::instruction_generation, std::move(user), numbered_keys(count));
}

llm::ChatRequest title_variants(const std::string& title, const std::string& procedure_text,
                                int count) {
    std::string user =
        "Below is a lab procedure with its title.\n" + block("title", title) +
        block("procedure", procedure_text) + "Write <count>" + std::to_string(count) +
        "</count> rephrasings of the title that one could use to ask for this procedure. "
        "Keep every name written between backticks unchanged.\n"
        "Reply with a JSON object mapping \"0\", \"1\", ... to the rephrasings.";
    return make(ids::title_variants, std::move(user), numbered_keys(count));
}

llm::ChatRequest code_candidate(const std::string& experiment_name, const std::string& description,
                                const std::string& instruction, const std::string& variables) {
    std::string user =
        "You translate a natural-language instruction into one line of code that runs an "
        "experiment.\n" +
        block("experiment", description) + block("available_variables", variables) +
        block("code_to_complete", "# [slot: " + instruction + "]") +
        "Decide first whether the experiment " + experiment_name +
        " is what the instruction asks for; mentioning a parameter is not enough. If it "
        "applies, fill the slot with a call whose last line is\n"
        "experiment_<name> = " + experiment_name + "(<arguments>)\n"
        "Use available variables by their names and literal values from the instruction. Then "
        "review your own code and state whether it is suitable.\n"
        "Reply with the keys experiment_name_in_slot, analysis, applicable (bool), code, "
        "explanation, suitable (bool).";
    return make(ids::code_candidate, std::move(user), code_candidate_keys());
}

llm::ChatRequest procedure_rewrite(const std::string& title, const std::string& procedure_text,
                                   const std::string& instruction, const std::string& variables) {
    std::string user =
        "A stored procedure may match the instruction below. Names between backticks are "
        "parameters.\n" +
        block("input_instruction", instruction) + block("available_variables", variables) +
        block("knowledge", "<instruction>" + title + "</instruction>\n" + procedure_text) +
        "Say whether the stored procedure does exactly what the input instruction asks "
        "(\"proper\"). If it does, rewrite the stored title with the actual "
        "values and give parameter_mapping as a JSON object from each backticked name in the "
        "stored title to the variable or value it takes. Variables that do not exist cannot "
        "be used.\n"
        "Reply with the keys parameter_specification, analysis, proper (bool), "
        "rewritten_instruction, parameter_mapping, annotation.";
    return make(ids::procedure_rewrite, std::move(user), procedure_rewrite_keys());
}

llm::ChatRequest code_selection(const std::string& instruction,
                                const std::vector<CandidateView>& candidates) {
    std::string listing;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        listing += "Candidate " + std::to_string(i + 1) + " (agent " + candidates[i].agent_id +
                   "):\n```\n" + candidates[i].code + "\n```\n" + candidates[i].explanation + "\n";
    }
    std::string user = "Several translations of one instruction were proposed.\n" +
                       block("instruction", instruction) + block("candidates", listing) +
                       "Pick the candidate that best matches the instruction and return its code "
                       "unchanged.\nReply with the keys analysis and code.";
    return make(ids::code_selection, std::move(user), code_selection_keys());
}

llm::ChatRequest rag_translation(const std::string& instruction,
                                 const std::vector<std::string>& descriptions,
                                 const std::string& variables) {
    std::string docs;
    for (const auto& d : descriptions) docs += block("experiment", d);
    std::string user = "Translate the instruction into code using one of the experiments below.\n" +
                       block("experiments", docs) + block("available_variables", variables) +
                       block("instruction", instruction) +
                       "The last line of the code must be experiment_<name> = <Class>(<arguments>).\n"
                       "Reply with the keys analysis and code.";
    return make(ids::rag_translation, std::move(user), rag_translation_keys());
}

llm::ChatRequest stage_extraction(const std::string& procedure_text) {
    std::string user =
        "Split the procedure below into stages. Each stage runs exactly one experiment. Copy "
        "the experiment instruction and its parameter values verbatim and leave out any text "
        "that only says what to do after success or failure.\n" +
        block("experiment_description", procedure_text) +
        "Reply with the key instructions: a list of strings, one per stage, in order.";
    return make(ids::stage_extraction, std::move(user), stage_extraction_keys());
}

llm::ChatRequest transition_rules(const std::string& procedure_text,
                                  const std::vector<std::pair<std::string, std::string>>& stages) {
    std::string listing;
    for (const auto& [label, instr] : stages) listing += label + ": " + instr + "\n";
    std::string user =
        "For each stage write the rule that decides the next stage once its experiment has "
        "finished. Stage labels are given below; the terminal labels are Complete and Failed. "
        "Include any limit on the number of attempts stated in the procedure.\n" +
        block("procedure", procedure_text) + block("stages", listing) +
        "Reply with the key rules: a JSON object from stage label to rule text.";
    return make(ids::transition_rules, std::move(user), transition_rules_keys());
}

llm::ChatRequest stage_transition(const TransitionView& v) {
    std::string user =
        "An experiment stage has just finished. Decide which stage comes next.\n" +
        block("current_stage", v.label + ": " + v.description) +
        block("counters", "n_executed=" + std::to_string(v.n_executed) + "\nn_failed=" +
                              std::to_string(v.n_failed) + "\nn_success=" +
                              std::to_string(v.n_success)) +
        block("experiment_reports", v.reports) + block("rule_of_transition", v.rule) +
        block("allowed_labels", text::join(v.allowed_labels, ", ")) +
        "Follow the rule. Reply with the keys analysis and next (one of the allowed labels).";
    return make(ids::stage_transition, std::move(user), stage_transition_keys());
}

llm::ChatRequest visual_inspection(const std::string& figure_kind, const std::string& features) {
    return visual_inspection(figure_kind, features, {}, nullptr);
}

llm::ChatRequest visual_inspection(const std::string& figure_kind, const std::string& features,
                                   const std::vector<llm::Part>& guidance, const llm::ImagePart* figure) {
    std::string user = "Inspect the measurement figure and judge whether the experiment worked.\n" +
                       block("figure_kind", figure_kind) + block("figure_features", features);
    auto r = make(ids::visual_inspection, std::move(user), visual_inspection_keys(), "vision");
    auto& parts = r.messages.back().parts;
    if (!guidance.empty()) {
        parts.push_back(llm::TextPart{"<inspection_guide>\n"});
        parts.insert(parts.end(), guidance.begin(), guidance.end());
        parts.push_back(llm::TextPart{"\n</inspection_guide>\n"});
    }
    if (figure) {
        parts.push_back(llm::TextPart{"The figure to inspect:\n"});
        parts.push_back(*figure);
    }
    parts.push_back(llm::TextPart{"Reply with the keys analysis and success (bool)."});
    return r;
}

llm::ChatRequest result_summary(const std::string& analysis_instructions, const std::string& reports) {
    std::string user =
        "Several inspectors reported on one experiment. Combine their reports.\n" +
        block("analysis_instructions", analysis_instructions) + block("reports", reports) +
        "The experiment succeeded only if no report says it failed. If it failed, collect the "
        "parameter changes the failing reports suggest.\n"
        "Reply with the keys analysis, success (bool), parameter_updates (object of numbers).";
    return make(ids::result_summary, std::move(user), result_summary_keys());
}

llm::ChatRequest report_judgement(const std::string& report) {
    std::string user = "Judge from this fitting report alone whether the experiment succeeded.\n" +
                       block("report", report) + "Reply with the keys analysis and success (bool).";
    return make(ids::report_judgement, std::move(user), report_judgement_keys());
}

llm::ChatRequest final_report(const std::string& title, const std::string& results_section,
                              const std::string& history, const std::string& terminal) {
    std::string user = "A procedure has finished. Write the report it asks for.\n" +
                       block("title", title) + block("results_section", results_section) +
                       block("terminal", terminal) + block("history", history) +
                       "Reply with the keys success (bool) and report (text).";
    return make(ids::final_report, std::move(user), final_report_keys());
}

llm::ChatRequest stark_proposal(const ProposalView& v) {
    std::string user =
        "Propose drive parameters for a conditional Stark-shift (siZZle) gate on a qubit pair.\n" +
        block("focus", v.focus) +
        block("qubit_frequencies", v.control + ": " + text::format_number(v.control_frequency) +
                                       "\n" + v.target + ": " +
                                       text::format_number(v.target_frequency)) +
        block("current_frequency", text::format_number(v.current_frequency)) +
        block("target_band", text::format_number(v.zz_min) + "," + text::format_number(v.zz_max)) +
        block("max_amplitude", text::format_number(v.max_amplitude)) +
        block("frequency_step", text::format_number(v.frequency_step)) +
        block("history", v.history_jsonl) +
        "Frequencies are in MHz. Drives too close to either qubit or too strong break the "
        "qubits; drives too weak give a ZZ rate below the band.\n"
        "Reply with the keys analysis, frequency, amp_control, rise, width, phase_diff, "
        "zz_interaction_positive (bool).";
    return make(ids::stark_proposal, std::move(user), stark_proposal_keys());
}

const std::vector<std::string>& instruction_generation_keys() {
    static const std::vector<std::string> k = numbered_keys(4);
    return k;
}

} // namespace kagents::prompts
