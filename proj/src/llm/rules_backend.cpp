#include "kagents/llm/rules_backend.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "kagents/errors.hpp"
#include "kagents/prompts.hpp"
#include "kagents/text.hpp"

namespace kagents::llm {

using nlohmann::json;

namespace {

std::string tag(const std::string& s, const char* name) {
    auto t = text::tag_content(s, name);
    return t ? text::trim(*t) : std::string();
}

bool subset(const std::set<std::string>& small, const std::set<std::string>& big) {
    return std::all_of(small.begin(), small.end(), [&](const auto& t) { return big.count(t) > 0; });
}

std::size_t overlap(const std::set<std::string>& a, const std::set<std::string>& b) {
    std::size_t n = 0;
    for (const auto& t : a) n += b.count(t);
    return n;
}

std::optional<double> to_number(const std::string& s) {
    if (s.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size() || !std::isfinite(v)) return std::nullopt;
        return v;
    } catch (...) {
        return std::nullopt;
    }
}

// ---- experiment listings -------------------------------------------------------------------

struct ParsedParam {
    std::string name;
    std::string kind;
    std::string device_kind;
    bool required = false;
    std::string description;
};

struct ParsedExperiment {
    std::string name;
    std::string summary;
    std::vector<ParsedParam> params;
};

ParsedExperiment parse_experiment(const std::string& listing) {
    ParsedExperiment e;
    static const std::regex param_re(R"(^- ([A-Za-z_][A-Za-z0-9_]*) \(([^)]*)\): ?(.*)$)");
    for (const auto& raw : text::split_lines(listing)) {
        std::string line = text::trim(raw);
        if (line.rfind("Name: ", 0) == 0) e.name = text::trim(line.substr(6));
        else if (line.rfind("Summary: ", 0) == 0) e.summary = text::trim(line.substr(9));
        std::smatch m;
        if (std::regex_match(line, m, param_re)) {
            ParsedParam p;
            p.name = m[1];
            p.description = m[3];
            auto attrs = text::split(m[2].str(), ',');
            std::string first = text::trim(attrs.empty() ? "" : attrs[0]);
            if (first == "qubit reference") { p.kind = "device"; p.device_kind = "qubit"; }
            else if (first == "qubit pair reference") { p.kind = "device"; p.device_kind = "pair"; }
            else if (first == "qubit list reference") { p.kind = "device"; p.device_kind = "qubits"; }
            else p.kind = first;
            for (const auto& a : attrs)
                if (text::trim(a) == "required") p.required = true;
            e.params.push_back(std::move(p));
        }
    }
    return e;
}

struct Variable {
    std::string name;
    std::string description;
    std::string device_kind; // empty for plain values
};

std::vector<Variable> parse_variables(const std::string& listing) {
    std::vector<Variable> vars;
    for (const auto& raw : text::split_lines(listing)) {
        std::string line = text::trim(raw);
        if (line.rfind("- ", 0) != 0) continue;
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        Variable v;
        v.name = text::trim(line.substr(2, colon - 2));
        v.description = text::trim(line.substr(colon + 1));
        if (v.description.rfind("device reference to qubit pair", 0) == 0) v.device_kind = "pair";
        else if (v.description.rfind("device reference to qubits", 0) == 0) v.device_kind = "qubits";
        else if (v.description.rfind("device reference to qubit", 0) == 0) v.device_kind = "qubit";
        vars.push_back(std::move(v));
    }
    return vars;
}

// ---- instruction parsing -------------------------------------------------------------------

struct KeyValue {
    std::vector<std::string> key_words;
    std::string literal; // rendered as code
};

std::vector<KeyValue> key_values(const std::string& s) {
    static const std::set<std::string> lead = {"with", "and", "the", "a", "an", "of", "set",
                                               "using", "at", "to", "its", "for", "where"};
    std::vector<KeyValue> out;
    for (std::size_t p = 0; p < s.size(); ++p) {
        if (s[p] != '=') continue;
        if ((p + 1 < s.size() && s[p + 1] == '=') || (p > 0 && s[p - 1] == '=')) continue;
        // value
        std::size_t v = p + 1;
        while (v < s.size() && s[v] == ' ') ++v;
        if (v >= s.size()) continue;
        std::string literal;
        if (s[v] == '"' || s[v] == '\'') {
            std::size_t close = s.find(s[v], v + 1);
            if (close == std::string::npos) continue;
            literal = text::quote(s.substr(v + 1, close - v - 1));
        } else if (s[v] == '`') {
            std::size_t close = s.find('`', v + 1);
            if (close == std::string::npos) continue;
            literal = text::trim(s.substr(v + 1, close - v - 1));
        } else {
            std::size_t e = v;
            while (e < s.size() && (std::isalnum(static_cast<unsigned char>(s[e])) || s[e] == '.' ||
                                    s[e] == '_' || s[e] == '-' || s[e] == '+'))
                ++e;
            std::string token = s.substr(v, e - v);
            while (!token.empty() && token.back() == '.') token.pop_back();
            if (token.empty()) continue;
            if (to_number(token)) literal = token;
            else if (text::to_lower(token) == "true") literal = "True";
            else if (text::to_lower(token) == "false") literal = "False";
            else literal = token;
        }
        // key: up to four words before '='
        std::size_t k = p;
        while (k > 0 && s[k - 1] == ' ') --k;
        std::size_t b = k;
        int words = 0;
        while (b > 0) {
            char c = s[b - 1];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
                --b;
                continue;
            }
            if (c == ' ') {
                if (++words >= 4) break;
                --b;
                continue;
            }
            break;
        }
        std::vector<std::string> kw;
        for (const auto& w : text::split(text::trim(s.substr(b, k - b)), ' '))
            if (!w.empty()) kw.push_back(w);
        while (!kw.empty() && lead.count(text::to_lower(kw.front()))) kw.erase(kw.begin());
        if (kw.empty()) continue;
        out.push_back({kw, literal});
    }
    return out;
}

std::set<std::string> stems_of(const std::string& s) {
    std::set<std::string> out;
    for (const auto& w : text::words(text::replace_all(s, "_", " "))) out.insert(text::stem(w));
    return out;
}

const ParsedParam* match_words(const std::vector<std::string>& words, const ParsedExperiment& e,
                               const std::set<std::string>& taken) {
    std::string joined = text::join(words, "_");
    for (const auto& p : e.params) {
        if (taken.count(p.name) || p.kind == "device") continue;
        if (p.name == joined || (words.size() == 1 && p.name == words.back())) return &p;
    }
    for (const auto& p : e.params) {
        if (taken.count(p.name) || p.kind == "device") continue;
        auto pool = stems_of(p.name + " " + p.description);
        bool all = true;
        for (const auto& w : words)
            if (!pool.count(text::stem(text::to_lower(w)))) all = false;
        if (all) return &p;
    }
    return nullptr;
}

// Longest trailing run of key words that names a parameter.
const ParsedParam* match_parameter(const KeyValue& kv, const ParsedExperiment& e,
                                   const std::set<std::string>& taken) {
    for (std::size_t drop = 0; drop < kv.key_words.size(); ++drop) {
        std::vector<std::string> words(kv.key_words.begin() + static_cast<long>(drop), kv.key_words.end());
        if (const ParsedParam* p = match_words(words, e, taken)) return p;
    }
    return nullptr;
}

std::string binding_id(const std::string& class_name) {
    std::vector<std::string> kept;
    static const std::set<std::string> generic = {"simple", "multilevel", "multi", "level",
                                                  "single", "qubit", "calibration", "normalised",
                                                  "normalized", "amp", "experiment"};
    for (const auto& part : text::split_camel_case(class_name)) {
        std::string lower = text::to_lower(part);
        if (!generic.count(lower)) kept.push_back(lower);
    }
    if (kept.size() >= 2 && kept[0] == "randomized" && kept[1] == "benchmarking") return "rb";
    if (kept.empty()) return text::to_lower(class_name);
    if (kept.size() > 2) kept.resize(2);
    return text::join(kept, "_");
}

struct CodeDraft {
    std::string code;
    bool suitable = true;
    std::string note;
};

CodeDraft draft_call(const ParsedExperiment& e, const std::string& instruction,
                     const std::vector<Variable>& vars) {
    CodeDraft d;
    std::map<std::string, std::string> args;
    std::set<std::string> taken;

    for (const auto& kv : key_values(instruction)) {
        if (const ParsedParam* p = match_parameter(kv, e, taken)) {
            args[p->name] = kv.literal;
            taken.insert(p->name);
        }
    }

    auto ticked = text::backticked_names(instruction);
    std::set<std::string> used_refs;
    for (const auto& name : ticked) {
        bool known = std::any_of(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == name; });
        if (!known) {
            d.suitable = false;
            d.note += "The name `" + name + "` is not an available variable. ";
        }
    }
    for (const auto& p : e.params) {
        if (p.kind != "device" || taken.count(p.name)) continue;
        auto fits = [&](const Variable& v) { return v.device_kind == p.device_kind; };
        std::string chosen;
        for (const auto& name : ticked) {
            auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == name; });
            if (it != vars.end() && fits(*it) && !used_refs.count(name)) {
                chosen = name;
                break;
            }
        }
        if (chosen.empty() && ticked.empty()) {
            for (const auto& v : vars)
                if (fits(v) && !used_refs.count(v.name)) {
                    chosen = v.name;
                    break;
                }
        }
        if (!chosen.empty()) {
            args[p.name] = chosen;
            used_refs.insert(chosen);
            taken.insert(p.name);
        }
    }
    for (const auto& p : e.params) {
        if (taken.count(p.name)) continue;
        for (const auto& v : vars)
            if (v.name == p.name && v.device_kind.empty()) {
                args[p.name] = v.name;
                taken.insert(p.name);
            }
    }
    std::vector<std::string> rendered;
    for (const auto& p : e.params) {
        auto it = args.find(p.name);
        if (it != args.end()) {
            rendered.push_back(p.name + "=" + it->second);
        } else if (p.required) {
            d.suitable = false;
            d.note += "Required parameter '" + p.name + "' has no value. ";
        }
    }
    d.code = "experiment_" + binding_id(e.name) + " = " + e.name + "(" + text::join(rendered, ", ") + ")";
    return d;
}

std::string slot_instruction(const std::string& code_to_complete) {
    std::string s = text::trim(code_to_complete);
    const std::string open = "# [slot:";
    if (s.rfind(open, 0) == 0) s = s.substr(open.size());
    if (!s.empty() && s.back() == ']') s.pop_back();
    return text::trim(s);
}

// ---- handlers ------------------------------------------------------------------------------

json instruction_generation(const std::string& t) {
    std::string name = tag(t, "experiment_name");
    int count = std::max(1, std::atoi(tag(t, "count").c_str()));
    ParsedExperiment e = parse_experiment(tag(t, "experiment"));
    std::vector<std::string> kept;
    static const std::set<std::string> generic = {"simple", "multilevel", "multi", "level",
                                                  "single", "qubit", "normalised", "normalized",
                                                  "amp", "experiment"};
    for (const auto& part : text::split_camel_case(name))
        if (!generic.count(text::to_lower(part))) kept.push_back(part);
    std::string key = text::join(kept, " ");
    std::vector<std::string> all;
    for (const auto& part : text::split_camel_case(name)) all.push_back(text::to_lower(part));
    std::string plain = text::join(all, " ");
    std::string summary = e.summary;
    if (!summary.empty() && summary.back() == '.') summary.pop_back();
    std::vector<std::string> forms = {
        "Run the " + key + " experiment.",
        "Please execute the " + key + " experiment.",
        "Carry out a " + key + " measurement: " + summary + ".",
        "Do the " + plain + " experiment on the qubit.",
        "Start a " + key + " scan with the default settings.",
        "I need a " + key + " experiment now.",
    };
    json out = json::object();
    for (int i = 0; i < count; ++i) out[std::to_string(i)] = forms[static_cast<std::size_t>(i) % forms.size()];
    return out;
}

json title_variants(const std::string& t) {
    std::string title = tag(t, "title");
    int count = std::max(1, std::atoi(tag(t, "count").c_str()));
    std::string lowered = title;
    if (!lowered.empty()) lowered[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(lowered[0])));
    std::vector<std::string> forms = {title, "Please do " + lowered + ".", "Carry out " + lowered + ".",
                                      "Run the procedure for " + lowered + "."};
    json out = json::object();
    for (int i = 0; i < count; ++i) out[std::to_string(i)] = forms[static_cast<std::size_t>(i) % forms.size()];
    return out;
}

json code_candidate(const std::string& t) {
    ParsedExperiment e = parse_experiment(tag(t, "experiment"));
    std::string instruction = slot_instruction(tag(t, "code_to_complete"));
    auto vars = parse_variables(tag(t, "available_variables"));
    auto wanted = text::experiment_terms(e.name);
    auto have = text::content_terms(instruction);
    json out = {{"experiment_name_in_slot", e.name}};
    if (wanted.empty() || !subset(wanted, have)) {
        out["analysis"] = "The instruction does not ask for " + e.name + ".";
        out["applicable"] = false;
        out["code"] = "";
        out["explanation"] = "";
        out["suitable"] = false;
        return out;
    }
    CodeDraft d = draft_call(e, instruction, vars);
    out["analysis"] = "The instruction asks for " + e.name + ". " + d.note;
    out["applicable"] = true;
    out["code"] = d.code;
    out["explanation"] = "Runs " + e.name + " with the values named in the instruction.";
    out["suitable"] = d.suitable;
    return out;
}

json procedure_rewrite(const std::string& t) {
    std::string instruction = tag(t, "input_instruction");
    std::string title = tag(tag(t, "knowledge"), "instruction");
    auto vars = parse_variables(tag(t, "available_variables"));
    auto a = text::content_terms(instruction);
    auto b = text::content_terms(title);
    bool proper = !a.empty() && a == b;
    auto title_names = text::backticked_names(title);
    auto given = text::backticked_names(instruction);
    json mapping = json::object();
    std::string rewritten = title;
    for (std::size_t i = 0; i < title_names.size(); ++i) {
        std::string target;
        if (given.size() == title_names.size()) {
            target = given[i];
        } else if (given.empty()) {
            for (const auto& v : vars)
                if (v.name == title_names[i]) target = v.name;
        }
        mapping[title_names[i]] = target;
        if (!target.empty())
            rewritten = text::replace_all(rewritten, "`" + title_names[i] + "`", "`" + target + "`");
    }
    return {{"parameter_specification", title_names},
            {"analysis", proper ? "The stored procedure matches the instruction."
                                : "The stored procedure does something different."},
            {"proper", proper},
            {"rewritten_instruction", rewritten},
            {"parameter_mapping", mapping},
            {"annotation", proper ? "Mapped by position." : ""}};
}

std::string called_name(const std::string& code) {
    static const std::regex call_re(R"(=\s*([A-Za-z_][A-Za-z0-9_]*)\s*\()");
    std::string last;
    for (const auto& line : text::split_lines(code))
        if (!text::trim(line).empty()) last = line;
    std::smatch m;
    if (std::regex_search(last, m, call_re)) return m[1];
    return {};
}

std::set<std::string> code_terms(const std::string& code) {
    std::string name = called_name(code);
    if (name == "ExecuteProcedure") {
        static const std::regex proc_re(R"(procedure\s*=\s*\"((?:[^\"\\]|\\.)*)\")");
        std::smatch m;
        if (std::regex_search(code, m, proc_re)) return text::content_terms(m[1].str());
    }
    return text::experiment_terms(name);
}

json code_selection(const std::string& t) {
    std::string instruction = tag(t, "instruction");
    std::string listing = tag(t, "candidates");
    std::vector<std::string> codes;
    std::size_t pos = 0;
    while ((pos = listing.find("```\n", pos)) != std::string::npos) {
        std::size_t end = listing.find("\n```", pos + 4);
        if (end == std::string::npos) break;
        codes.push_back(listing.substr(pos + 4, end - pos - 4));
        pos = end + 4;
    }
    if (codes.empty()) return {{"analysis", "No candidates were given."}, {"code", ""}};
    auto have = text::content_terms(instruction);
    std::size_t best = 0;
    std::size_t best_score = 0;
    for (std::size_t i = 0; i < codes.size(); ++i) {
        std::size_t score = overlap(code_terms(codes[i]), have);
        if (score > best_score) {
            best = i;
            best_score = score;
        }
    }
    return {{"analysis", "Candidate " + std::to_string(best + 1) + " matches the instruction best."},
            {"code", codes[best]}};
}

json rag_translation(const std::string& t) {
    std::string instruction = tag(t, "instruction");
    auto vars = parse_variables(tag(t, "available_variables"));
    std::string docs = tag(t, "experiments");
    std::vector<ParsedExperiment> exps;
    std::size_t pos = 0;
    while (true) {
        auto b = docs.find("<experiment>", pos);
        if (b == std::string::npos) break;
        auto e = docs.find("</experiment>", b);
        if (e == std::string::npos) break;
        exps.push_back(parse_experiment(docs.substr(b + 12, e - b - 12)));
        pos = e + 13;
    }
    if (exps.empty()) return {{"analysis", "No experiments were given."}, {"code", ""}};
    auto have = text::content_terms(instruction);
    const ParsedExperiment* chosen = &exps.front();
    for (const auto& e : exps) {
        auto wanted = text::experiment_terms(e.name);
        if (!wanted.empty() && subset(wanted, have)) {
            chosen = &e;
            break;
        }
    }
    return {{"analysis", "Using " + chosen->name + "."}, {"code", draft_call(*chosen, instruction, vars).code}};
}

// Step items of a rendered procedure document.
std::vector<std::string> step_items(const std::string& doc) {
    std::vector<std::string> items;
    bool in_steps = false;
    for (const auto& raw : text::split_lines(doc)) {
        std::string line = text::trim(raw);
        if (line.rfind("## ", 0) == 0) {
            in_steps = text::to_lower(text::trim(line.substr(3))) == "steps";
            continue;
        }
        if (line.rfind("# ", 0) == 0) continue;
        if (!in_steps) continue;
        if (line.rfind("- ", 0) == 0) items.push_back(text::trim(line.substr(2)));
        else if (!line.empty() && !items.empty()) items.back() += " " + line;
    }
    return items;
}

std::vector<std::string> sentences(const std::string& s) {
    std::vector<std::string> out;
    std::string current;
    for (std::size_t i = 0; i < s.size(); ++i) {
        current.push_back(s[i]);
        bool end = (s[i] == '.' || s[i] == '!' || s[i] == '?') &&
                   (i + 1 == s.size() || s[i + 1] == ' ');
        if (end) {
            std::string t = text::trim(current);
            if (!t.empty()) out.push_back(t);
            current.clear();
        }
    }
    std::string t = text::trim(current);
    if (!t.empty()) out.push_back(t);
    return out;
}

bool is_control_sentence(const std::string& s) {
    static const std::vector<std::string> starts = {
        "if ", "otherwise", "retry", "repeat", "go to", "go back", "then go", "this step", "after ",
        "when ", "on failure", "on success", "in case", "return to", "revert", "else", "unless"};
    std::string l = text::to_lower(s);
    for (const auto& p : starts)
        if (l.rfind(p, 0) == 0) return true;
    return false;
}

struct StepSplit {
    std::string instruction;
    std::string control;
};

std::vector<StepSplit> split_steps(const std::string& doc) {
    std::vector<StepSplit> out;
    for (const auto& item : step_items(doc)) {
        StepSplit s;
        std::vector<std::string> keep;
        std::vector<std::string> control;
        for (const auto& sentence : sentences(item))
            (is_control_sentence(sentence) ? control : keep).push_back(sentence);
        if (keep.empty()) continue;
        s.instruction = text::join(keep, " ");
        s.control = text::join(control, " ");
        out.push_back(std::move(s));
    }
    return out;
}

json stage_extraction(const std::string& t) {
    json list = json::array();
    for (const auto& s : split_steps(tag(t, "experiment_description"))) list.push_back(s.instruction);
    return {{"instructions", list}};
}

json transition_rules(const std::string& t) {
    std::string doc = tag(t, "procedure");
    auto steps = split_steps(doc);
    std::vector<std::string> labels;
    for (const auto& line : text::split_lines(tag(t, "stages"))) {
        auto colon = line.find(':');
        if (colon != std::string::npos) labels.push_back(text::trim(line.substr(0, colon)));
    }
    static const std::regex cap_re(R"((?:up to|at most|maximum of)\s+(\d+)\s+(?:times|attempts|tries))",
                                   std::regex::icase);
    static const std::regex retry_n_re(R"(retry\s+(\d+)\s+times)", std::regex::icase);
    static const std::regex stage_re(R"((?:go back to|go to|return to|revert to)\s+(?:stage\s*)(\d+))",
                                     std::regex::icase);
    json rules = json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::string control = i < steps.size() ? steps[i].control : "";
        std::string lower = text::to_lower(control);
        std::string success = i + 1 < labels.size() ? labels[i + 1] : "Complete";
        int cap = 3;
        std::smatch m;
        if (std::regex_search(control, m, cap_re)) cap = std::stoi(m[1]);
        else if (std::regex_search(control, m, retry_n_re)) cap = std::stoi(m[1]);
        std::string failure;
        bool retry = false;
        std::string after = "Failed";
        if (std::regex_search(control, m, stage_re)) {
            failure = "Stage" + m[1].str();
        } else if (lower.find("previous stage") != std::string::npos ||
                   lower.find("previous step") != std::string::npos) {
            if (lower.find("retry") != std::string::npos) {
                retry = true;
                after = i > 0 ? labels[i - 1] : "Failed";
            } else {
                failure = i > 0 ? labels[i - 1] : "Failed";
            }
        } else if (lower.find("go to failed") != std::string::npos || lower.find("abort") != std::string::npos ||
                   lower.find("stop the procedure") != std::string::npos) {
            failure = "Failed";
        } else {
            retry = true;
        }
        std::string rule = "If the experiment succeeds, go to " + success + ". ";
        if (retry) {
            rule += "If it fails, retry " + labels[i] + ". When the attempt limit is reached go to " + after + ". ";
        } else {
            rule += "If it fails, go to " + failure + ". ";
        }
        rule += "At most " + std::to_string(cap) + " attempts in total.";
        rules[labels[i]] = rule;
    }
    return {{"rules", rules}};
}

json stage_transition(const std::string& t) {
    std::string rule = tag(t, "rule_of_transition");
    std::string reports = tag(t, "experiment_reports");
    std::string counters = tag(t, "counters");
    std::string current = tag(t, "current_stage");
    current = current.substr(0, current.find(':'));
    int executed = 0;
    static const std::regex exec_re(R"(n_executed=(\d+))");
    std::smatch m;
    if (std::regex_search(counters, m, exec_re)) executed = std::stoi(m[1]);
    bool success = text::contains_ci(reports, "experiment success: true");
    static const std::regex ok_re(R"(If the experiment succeeds, go to (\w+))");
    static const std::regex retry_re(R"(If it fails, retry (\w+))");
    static const std::regex fail_re(R"(If it fails, go to (\w+))");
    static const std::regex after_re(R"(When the attempt limit is reached go to (\w+))");
    static const std::regex cap_re(R"(At most (\d+) attempts)");
    std::string next;
    std::string why;
    if (success) {
        next = std::regex_search(rule, m, ok_re) ? m[1].str() : "Complete";
        why = "The experiment succeeded, so the rule sends us to " + next + ".";
    } else if (std::regex_search(rule, m, retry_re)) {
        std::string target = m[1];
        int cap = 3;
        std::smatch c;
        if (std::regex_search(rule, c, cap_re)) cap = std::stoi(c[1]);
        std::smatch a;
        std::string after = std::regex_search(rule, a, after_re) ? a[1].str() : "Failed";
        if (executed < cap) {
            next = target;
            why = "The experiment failed after " + std::to_string(executed) + " of " +
                  std::to_string(cap) + " attempts, so " + target + " is retried.";
        } else {
            next = after;
            why = "The attempt limit of " + std::to_string(cap) + " is reached.";
        }
    } else if (std::regex_search(rule, m, fail_re)) {
        next = m[1];
        why = "The experiment failed, so the rule sends us to " + next + ".";
    } else {
        next = "Failed";
        why = "The rule gives no way forward after a failure.";
    }
    (void)current;
    return {{"analysis", why}, {"next", next}};
}

struct ReportView {
    std::string verdict;
    std::map<std::string, double> suggested;
};

std::vector<ReportView> parse_reports(const std::string& block) {
    std::vector<ReportView> out;
    static const std::regex head_re(R"(^\[report \d+\].*verdict=(\w+))");
    for (const auto& raw : text::split_lines(block)) {
        std::string line = text::trim(raw);
        std::smatch m;
        if (std::regex_search(line, m, head_re)) {
            out.push_back({m[1], {}});
        } else if (!out.empty() && line.rfind("suggested:", 0) == 0) {
            for (const auto& item : text::split(line.substr(10), ',')) {
                auto eq = item.find('=');
                if (eq == std::string::npos) continue;
                auto v = to_number(text::trim(item.substr(eq + 1)));
                if (v) out.back().suggested[text::trim(item.substr(0, eq))] = *v;
            }
        }
    }
    return out;
}

json result_summary(const std::string& t) {
    auto reports = parse_reports(tag(t, "reports"));
    bool any_failure = false;
    bool any_success = false;
    for (const auto& r : reports) {
        if (r.verdict == "failure") any_failure = true;
        if (r.verdict == "success") any_success = true;
    }
    bool success = any_success && !any_failure;
    std::map<std::string, double> updates;
    std::set<std::string> conflicted;
    if (!success) {
        for (const auto& r : reports) {
            if (r.verdict != "failure") continue;
            for (const auto& [k, v] : r.suggested) {
                auto it = updates.find(k);
                if (it != updates.end() && it->second != v) conflicted.insert(k);
                else updates[k] = v;
            }
        }
        for (const auto& k : conflicted) updates.erase(k);
    }
    std::string analysis;
    if (reports.empty()) analysis = "No inspector reported on the experiment.";
    else if (success) analysis = "All inspectors report success.";
    else if (any_failure) analysis = "At least one inspector reports a failure.";
    else analysis = "The inspectors could not reach a verdict.";
    if (!conflicted.empty())
        analysis += " Conflicting suggestions were dropped for: " +
                    text::join(std::vector<std::string>(conflicted.begin(), conflicted.end()), ", ") + ".";
    return {{"analysis", analysis}, {"success", success}, {"parameter_updates", updates}};
}

json report_judgement(const std::string& t) {
    std::string report = text::to_lower(tag(t, "report"));
    static const std::vector<std::string> bad = {"fail", "did not converge", "unsuccessful", "no clear",
                                                 "outside", "too few", "too many", "inconclusive"};
    for (const auto& b : bad)
        if (report.find(b) != std::string::npos)
            return {{"analysis", "The report mentions a problem (" + b + ")."}, {"success", false}};
    return {{"analysis", "The fit report describes a valid result."}, {"success", true}};
}

json final_report(const std::string& t) {
    std::string terminal = tag(t, "terminal");
    std::string title = tag(t, "title");
    std::string history = tag(t, "history");
    std::string results = tag(t, "results_section");
    bool success = terminal == "COMPLETE";
    std::string report = "Procedure \"" + title + "\" ended in state " + terminal + ".\n" + history;
    if (!results.empty()) report += "\nRequested results: " + results + "\n";
    report += success ? "All experiments were successful." : "The procedure was not successful.";
    return {{"success", success}, {"report", report}};
}

// ---- siZZle proposals ----------------------------------------------------------------------

struct Attempt {
    double frequency = 0;
    double amp = 0;
    std::string outcome;
    double zz = 0;
};

json stark_proposal(const std::string& t) {
    std::string focus = tag(t, "focus");
    std::vector<double> qf;
    for (const auto& line : text::split_lines(tag(t, "qubit_frequencies"))) {
        auto colon = line.find(':');
        if (colon != std::string::npos)
            if (auto v = to_number(text::trim(line.substr(colon + 1)))) qf.push_back(*v);
    }
    if (qf.size() < 2) qf = {0.0, 0.0};
    double lo = std::min(qf[0], qf[1]);
    double hi = std::max(qf[0], qf[1]);
    double step = to_number(tag(t, "frequency_step")).value_or(40.0);
    double max_amp = to_number(tag(t, "max_amplitude")).value_or(0.5);
    double current = to_number(tag(t, "current_frequency")).value_or(0.0);
    std::vector<Attempt> history;
    for (const auto& line : text::split_lines(tag(t, "history"))) {
        if (text::trim(line).empty()) continue;
        auto j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) continue;
        history.push_back({j.value("frequency", 0.0), j.value("amp_control", 0.0),
                           j.value("outcome", std::string()), j.value("zz", 0.0)});
    }
    auto same = [](double a, double b) { return std::abs(a - b) < 1e-6; };
    auto at = [&](double f) {
        std::vector<Attempt> out;
        for (const auto& a : history)
            if (same(a.frequency, f)) out.push_back(a);
        return out;
    };
    auto stable_seen = [&](double f) {
        for (const auto& a : at(f))
            if (a.outcome != "unstable") return true;
        return false;
    };
    auto tried_unstable_only = [&](double f) { return !at(f).empty() && !stable_seen(f); };

    double frequency = current;
    std::string analysis;
    if (focus == "frequency" || frequency == 0.0) {
        if (history.empty()) {
            frequency = 0.5 * (lo + hi);
            analysis = "No attempt yet; start between the two qubits.";
        } else {
            const Attempt& last = history.back();
            frequency = last.frequency;
            if (last.outcome == "unstable" && !stable_seen(last.frequency)) {
                if (last.frequency > lo && last.frequency < hi) frequency = lo - step;
                else if (last.frequency <= lo) frequency = last.frequency - step;
                else frequency = last.frequency + step;
                while (tried_unstable_only(frequency)) frequency += (frequency <= lo ? -step : step);
                analysis = "The last drive was unstable; move farther from the qubits.";
            } else if (last.outcome == "weak") {
                double best_weak = 0;
                for (const auto& a : at(last.frequency))
                    if (a.outcome == "weak") best_weak = std::max(best_weak, a.amp);
                if (best_weak >= 0.95 * max_amp) {
                    frequency = last.frequency <= lo ? last.frequency + step / 2 : last.frequency - step / 2;
                    analysis = "The interaction stays weak at full amplitude; move closer to the qubits.";
                } else {
                    analysis = "The interaction is weak; keep the frequency and raise the amplitude.";
                }
            } else {
                analysis = "Keep the frequency and adjust the amplitude.";
            }
        }
    }

    double amp = 0.2;
    double weak_max = -1;
    double bad_min = -1;
    for (const auto& a : at(frequency)) {
        if (a.outcome == "weak") weak_max = std::max(weak_max, a.amp);
        if (a.outcome == "unstable" || a.outcome == "strong")
            bad_min = bad_min < 0 ? a.amp : std::min(bad_min, a.amp);
        if (a.outcome == "success") amp = a.amp;
    }
    auto here = at(frequency);
    if (!here.empty() && here.back().outcome == "success") {
        amp = here.back().amp;
    } else if (weak_max > 0 && bad_min > 0) {
        amp = 0.5 * (weak_max + bad_min);
    } else if (weak_max > 0) {
        amp = std::min(max_amp, weak_max * 1.25);
    } else if (bad_min > 0) {
        amp = bad_min * 0.7;
    }
    if (focus == "amplitude") analysis = "Choose the control amplitude from earlier attempts at this frequency.";

    double width = 1.0;
    for (const auto& a : here)
        if (std::abs(a.zz) > 1e-9) width = 1.0 / (8.0 * std::abs(a.zz));
    bool positive = here.empty() ? true : here.back().zz >= 0;
    return {{"analysis", analysis}, {"frequency", frequency}, {"amp_control", amp}, {"rise", 0.015},
            {"width", width}, {"phase_diff", 0.0}, {"zz_interaction_positive", positive}};
}

json visual_inspection(const std::string& t) {
    std::string analysis;
    bool ok = visual_rule_verdict(tag(t, "figure_kind"), tag(t, "figure_features"), &analysis);
    return {{"analysis", analysis}, {"success", ok}};
}

} // namespace

bool visual_rule_verdict(const std::string& kind, const std::string& features_text, std::string* analysis) {
    std::map<std::string, double> f;
    for (const auto& line : text::split_lines(features_text)) {
        auto colon = line.find(':');
        if (colon == std::string::npos) continue;
        if (auto v = to_number(text::trim(line.substr(colon + 1)))) f[text::trim(line.substr(0, colon))] = *v;
    }
    auto get = [&](const char* k) { return f.count(k) ? f[k] : std::nan(""); };
    std::string why;
    bool ok = true;
    auto need = [&](bool cond, const std::string& reason) {
        if (!cond) {
            ok = false;
            why += reason + " ";
        }
    };
    if (kind == "ramsey") {
        need(get("fit_converged") == 1, "The oscillation could not be fitted.");
        need(get("amplitude") >= 0.2, "The oscillation amplitude is too small.");
        need(get("oscillations") >= 3, "Too few oscillations are visible.");
        need(get("oscillations") <= 10, "Too many oscillations are visible.");
    } else if (kind == "rabi") {
        need(get("fit_converged") == 1, "The oscillation could not be fitted.");
        need(get("amplitude") >= 0.2, "The oscillation amplitude is too small.");
        need(get("oscillations") >= 1, "Less than one full oscillation is visible.");
        need(get("oscillations") <= 30, "The oscillation is too fast for the sampling.");
    } else if (kind == "power-rabi") {
        need(get("fit_converged") == 1, "The oscillation could not be fitted.");
        need(get("amplitude") >= 0.2, "The oscillation amplitude is too small.");
        need(get("oscillations") >= 0.5, "The sweep does not reach a pi pulse.");
    } else if (kind == "stark-oscillation") {
        need(get("fit_converged") == 1, "The oscillation could not be fitted.");
        need(get("amplitude") >= 0.2, "The oscillation amplitude is too small.");
    } else if (kind == "rabi-fourier" || kind == "stark-fourier") {
        need(get("peak_ratio") >= (kind == "rabi-fourier" ? 10.0 : 6.0), "No clear peak stands out in the spectrum.");
    } else if (kind == "drag") {
        need(get("intersection_position") >= 0.25 && get("intersection_position") <= 0.75,
             "The lines do not cross in the central part of the sweep.");
        need(get("slope_separation") >= 5, "The two lines are not clearly separated.");
        need(get("residual_ratio") <= 0.25, "The data scatter too much around the lines.");
    } else if (kind == "pingpong") {
        need(get("final_change") <= 2e-3, "The amplitude has not settled.");
    } else if (kind == "rb" || kind == "t1" || kind == "echo") {
        need(get("fit_converged") == 1, "The decay could not be fitted.");
        need(get("decay_contrast") >= 0.1, "No clear decay is visible.");
    } else if (kind == "gmm") {
        need(get("clusters") == 2, "The readout does not show exactly two clusters.");
    } else if (kind == "resonator") {
        need(get("dip_depth") >= 6, "No clear resonance dip is visible.");
    } else if (kind == "qubit-spectroscopy") {
        need(get("peak_height") >= 6, "No clear spectroscopy peak is visible.");
    } else if (kind == "stark-control") {
        need(get("mean") >= 0.8, "The control qubit leaves its state.");
        need(get("drift") <= 0.15, "The control qubit population drifts.");
    }
    if (analysis) *analysis = ok ? "The figure looks as expected for a successful " + kind + " experiment." : text::trim(why);
    return ok;
}

json RulesBackend::respond(const ChatRequest& request) const {
    std::string t = request.all_text();
    const std::string& id = request.template_id;
    namespace p = prompts::ids;
    if (id == p::instruction_generation) return instruction_generation(t);
    if (id == p::title_variants) return title_variants(t);
    if (id == p::code_candidate) return code_candidate(t);
    if (id == p::procedure_rewrite) return procedure_rewrite(t);
    if (id == p::code_selection) return code_selection(t);
    if (id == p::rag_translation) return rag_translation(t);
    if (id == p::stage_extraction) return stage_extraction(t);
    if (id == p::transition_rules) return transition_rules(t);
    if (id == p::stage_transition) return stage_transition(t);
    if (id == p::visual_inspection) return visual_inspection(t);
    if (id == p::result_summary) return result_summary(t);
    if (id == p::report_judgement) return report_judgement(t);
    if (id == p::final_report) return final_report(t);
    if (id == p::stark_proposal) return stark_proposal(t);
    throw BackendError("rules backend has no rule for template '" + id + "'");
}

BackendReply RulesBackend::chat(const ChatRequest& request, const std::string&) {
    std::string text = respond(request).dump();
    return {text, {estimate_tokens(request), estimate_tokens(text)}};
}

EmbeddingVector RulesBackend::embed(const std::string& text) { return hashed_embedding(text, dim_); }

} // namespace kagents::llm
