#include "kagents/execution/state_machine.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "kagents/errors.hpp"
#include "kagents/prompts.hpp"
#include "kagents/text.hpp"

namespace kagents::execution {

using nlohmann::json;

std::vector<NumericVar> extract_numeric_vars(const std::string& s) {
    static const std::set<std::string> stop = {"with", "and", "the", "a", "an", "of", "set", "using", "at",
                                               "to", "its", "for", "where", "parameters", "parameter", "on", "in"};
    static const std::regex num_re(R"(^\s*([-+]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][-+]?\d+)?))");
    std::vector<NumericVar> out;
    std::set<std::string> names;
    for (std::size_t p = 0; p < s.size(); ++p) {
        if (s[p] != '=') continue;
        if ((p + 1 < s.size() && s[p + 1] == '=') || (p > 0 && s[p - 1] == '=')) continue;
        std::smatch m;
        std::string rest = s.substr(p + 1);
        if (!std::regex_search(rest, m, num_re)) continue;
        // Key words: up to three words right before '=', stopping at punctuation or a filler word.
        std::vector<std::string> words;
        std::size_t q = p;
        while (words.size() < 3) {
            while (q > 0 && s[q - 1] == ' ') --q;
            std::size_t e = q;
            while (q > 0 && (std::isalnum(static_cast<unsigned char>(s[q - 1])) || s[q - 1] == '_')) --q;
            if (q == e) break;
            std::string w = text::to_lower(s.substr(q, e - q));
            if (stop.count(w)) break;
            words.insert(words.begin(), w);
        }
        if (words.empty()) continue;
        NumericVar v;
        v.name = text::join(words, "_");
        if (!names.insert(v.name).second) continue;
        std::string token = m[1].str();
        v.value = std::stod(token);
        v.offset = p + 1 + static_cast<std::size_t>(m.position(1));
        v.length = token.size();
        out.push_back(std::move(v));
    }
    return out;
}

std::string Stage::rendered_instruction() const {
    std::string out = instruction;
    auto vars = numeric_vars;
    std::sort(vars.begin(), vars.end(), [](const NumericVar& a, const NumericVar& b) { return a.offset > b.offset; });
    for (const auto& v : vars) out.replace(v.offset, v.length, text::format_number(v.value));
    return out;
}

std::map<std::string, double> Stage::numeric_map() const {
    std::map<std::string, double> out;
    for (const auto& v : numeric_vars) out[v.name] = v.value;
    return out;
}

UpdateResult apply_parameter_updates(Stage& stage, const std::map<std::string, double>& updates) {
    static const std::set<std::string> generic = {"set", "num", "n", "the", "of"};
    UpdateResult r;
    for (const auto& [name, value] : updates) {
        auto parts = text::split(text::to_lower(name), '_');
        std::vector<std::string> wanted;
        for (auto& p : parts)
            if (!p.empty() && !generic.count(p)) wanted.push_back(p);
        NumericVar* hit = nullptr;
        for (auto& v : stage.numeric_vars)
            if (v.name == text::to_lower(name)) hit = &v;
        if (!hit && !wanted.empty()) {
            for (auto& v : stage.numeric_vars) {
                auto have = text::split(v.name, '_');
                bool all = std::all_of(wanted.begin(), wanted.end(), [&](const std::string& w) {
                    return std::find(have.begin(), have.end(), w) != have.end();
                });
                if (all) {
                    hit = &v;
                    break;
                }
            }
        }
        if (!hit) {
            r.skipped.push_back(name);
            continue;
        }
        hit->value = value;
        r.applied[name] = hit->name;
    }
    // Offsets shift once a number changes width; keep them consistent with the rendered text.
    if (!r.applied.empty()) {
        std::string rendered = stage.rendered_instruction();
        stage.instruction = rendered;
        stage.numeric_vars = extract_numeric_vars(rendered);
    }
    return r;
}

std::optional<int> rule_attempt_cap(const std::string& rule) {
    static const std::regex re(R"((?:at most|up to|maximum of)\s+(\d+)\s+(?:attempts|times|tries))", std::regex::icase);
    std::smatch m;
    if (std::regex_search(rule, m, re)) return std::stoi(m[1]);
    return std::nullopt;
}

StateMachine::StateMachine(std::vector<Stage> stages) : stages_(std::move(stages)) {
    if (stages_.empty()) throw EmptyStages("the procedure has no executable stages");
    std::set<std::string> seen;
    for (const auto& s : stages_)
        if (!seen.insert(s.label).second) throw InvalidNextStage("duplicate stage label " + s.label);
    static const std::regex ref_re(R"(\bStage\s*(\d+)\b)", std::regex::icase);
    for (const auto& s : stages_) {
        for (auto it = std::sregex_iterator(s.transition_rule.begin(), s.transition_rule.end(), ref_re);
             it != std::sregex_iterator(); ++it) {
            std::string label = "Stage" + (*it)[1].str();
            if (!has_label(label))
                throw InvalidNextStage("the rule of " + s.label + " names unknown stage " + label);
        }
    }
    current_ = stages_.front().label;
}

Stage& StateMachine::stage(const std::string& label) {
    for (auto& s : stages_)
        if (s.label == label) return s;
    throw InvalidNextStage("no stage " + label);
}

const Stage& StateMachine::stage(const std::string& label) const {
    for (const auto& s : stages_)
        if (s.label == label) return s;
    throw InvalidNextStage("no stage " + label);
}

bool StateMachine::has_label(const std::string& label) const {
    return std::any_of(stages_.begin(), stages_.end(), [&](const Stage& s) { return s.label == label; });
}

bool StateMachine::is_terminal(const std::string& label) { return label == kComplete || label == kFailed; }

void StateMachine::move_to(const std::string& label) {
    if (!is_terminal(label) && !has_label(label)) throw InvalidNextStage("no stage " + label);
    current_ = label;
}

std::vector<std::string> StateMachine::labels() const {
    std::vector<std::string> out;
    for (const auto& s : stages_) out.push_back(s.label);
    out.push_back(kComplete);
    out.push_back(kFailed);
    return out;
}

std::optional<std::string> StateMachine::normalise(const std::string& raw) const {
    std::string s = text::trim(raw);
    while (!s.empty() && (s.front() == '\'' || s.front() == '"' || s.front() == '`')) s.erase(0, 1);
    while (!s.empty() && (s.back() == '\'' || s.back() == '"' || s.back() == '`' || s.back() == '.')) s.pop_back();
    std::string compact;
    for (char c : s)
        if (c != ' ') compact.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (compact == "complete" || compact == "completed") return std::string(kComplete);
    if (compact == "failed" || compact == "fail" || compact == "failure") return std::string(kFailed);
    for (const auto& st : stages_)
        if (text::to_lower(st.label) == compact) return st.label;
    return std::nullopt;
}

json StateMachine::to_json() const {
    json stages = json::array();
    for (const auto& s : stages_) {
        stages.push_back({{"label", s.label},
                          {"instruction", s.rendered_instruction()},
                          {"transition_rule", s.transition_rule},
                          {"numeric_vars", s.numeric_map()},
                          {"n_executed", s.n_executed},
                          {"n_failed", s.n_failed},
                          {"n_success", s.n_success}});
    }
    return {{"stages", stages}, {"current", current_}, {"terminals", {kComplete, kFailed}}};
}

StateMachine decompose(const procedure::ProcedureDoc& doc, llm::Gateway& gateway) {
    std::string text = procedure::render(doc);
    json first = gateway.complete_structured(prompts::stage_extraction(text), prompts::stage_extraction_keys());
    const json& list = first["instructions"];
    if (!list.is_array()) throw StructureError("stage extraction must return a list of instructions");
    std::vector<Stage> stages;
    std::vector<std::pair<std::string, std::string>> listing;
    for (const auto& item : list) {
        if (!item.is_string()) throw StructureError("stage instructions must be strings");
        std::string instr = text::trim(item.get<std::string>());
        if (instr.empty()) continue;
        Stage s;
        s.label = "Stage" + std::to_string(stages.size() + 1);
        s.instruction = instr;
        s.numeric_vars = extract_numeric_vars(instr);
        listing.emplace_back(s.label, instr);
        stages.push_back(std::move(s));
    }
    if (stages.empty()) throw EmptyStages("no executable stage in '" + doc.title + "'");
    json second = gateway.complete_structured(prompts::transition_rules(text, listing), prompts::transition_rules_keys());
    const json& rules = second["rules"];
    if (!rules.is_object()) throw StructureError("transition rules must be an object keyed by stage label");
    for (std::size_t i = 0; i < stages.size(); ++i) {
        auto& s = stages[i];
        if (rules.contains(s.label) && rules[s.label].is_string()) {
            s.transition_rule = rules[s.label].get<std::string>();
        } else {
            std::string next = i + 1 < stages.size() ? stages[i + 1].label : "Complete";
            s.transition_rule = "If the experiment succeeds, go to " + next + ". If it fails, retry " + s.label +
                                ". When the attempt limit is reached go to Failed.";
        }
    }
    return StateMachine(std::move(stages));
}

} // namespace kagents::execution
