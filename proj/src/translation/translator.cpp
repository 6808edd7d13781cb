#include "kagents/translation/translator.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "kagents/errors.hpp"
#include "kagents/execution/call_script.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/prompts.hpp"
#include "kagents/text.hpp"

namespace kagents::translation {

using nlohmann::json;

namespace {

bool flag(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        std::string s = text::to_lower(text::trim(v.get<std::string>()));
        return s == "true" || s == "yes";
    }
    return false;
}

std::string str(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return {};
    return v.dump();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

// Drop fences and keep the script lines.
std::string clean_code(std::string code) {
    code = text::trim(code);
    if (code.rfind("```", 0) == 0) {
        auto nl = code.find('\n');
        code = nl == std::string::npos ? "" : code.substr(nl + 1);
        auto end = code.rfind("```");
        if (end != std::string::npos) code = code.substr(0, end);
    }
    return text::trim(code);
}

} // namespace

std::vector<ActivationScore> score_agents(const llm::EmbeddingVector& instruction,
                                          const std::vector<knowledge::Agent>& agents) {
    if (agents.empty()) throw NoAgents("no translation agents are registered");
    std::vector<ActivationScore> out;
    out.reserve(agents.size());
    for (const auto& a : agents) {
        double best = -1.0;
        for (const auto& e : a.fingerprint.embeddings) best = std::max(best, instruction.dot(e));
        if (a.fingerprint.embeddings.empty()) best = 0.0;
        out.push_back({a.id, best});
    }
    std::stable_sort(out.begin(), out.end(), [](const ActivationScore& x, const ActivationScore& y) { return x.score > y.score; });
    return out;
}

json TranslationOutcome::to_json(std::size_t top_scores) const {
    json s = json::array();
    for (std::size_t i = 0; i < scores.size() && i < top_scores; ++i)
        s.push_back({{"agent", scores[i].agent_id}, {"score", scores[i].score}});
    json c = json::array();
    for (const auto& x : candidates)
        c.push_back({{"agent", x.agent_id}, {"code", x.code}, {"suitable", x.suitable},
                     {"kind", x.kind == knowledge::AgentKind::code ? "code" : "procedure"}});
    return {{"code", code}, {"selected_agent", selected_agent}, {"widths", widths},
            {"scores", s}, {"candidates", c}, {"notes", notes}};
}

std::string execute_procedure_code(const std::string& title, const std::string& instruction,
                                   const std::vector<std::pair<std::string, std::string>>& mapping) {
    std::vector<std::string> items;
    for (const auto& [k, v] : mapping) items.push_back("\"" + escape(k + "=" + v) + "\"");
    return "experiment_procedure = " + std::string(knowledge::kExecuteProcedure) + "(procedure=\"" + escape(title) +
           "\", instruction=\"" + escape(instruction) + "\", mapping=[" + text::join(items, ", ") + "])";
}

Translator::Translator(const knowledge::Registry& registry, llm::Gateway& gateway)
    : registry_(registry), gateway_(gateway) {}

std::vector<ActivationScore> Translator::score(const std::string& instruction) const {
    return score_agents(gateway_.embed(instruction), registry_.agents());
}

std::string Translator::variables_text(const TranslationContext& ctx) const {
    std::string out;
    for (const auto& [k, d] : ctx.available_variables) out += "- " + k + ": " + d + "\n";
    return out.empty() ? "(none)" : out;
}

void Translator::check_code(const std::string& code, const TranslationContext& ctx) const {
    execution::CallPlan plan;
    try {
        plan = execution::parse_call_script(code);
    } catch (const GrammarError& e) {
        throw MalformedCandidate(std::string("call grammar: ") + e.what());
    }
    const auto* d = registry_.find(plan.experiment_name);
    if (!d) throw MalformedCandidate("unknown experiment " + plan.experiment_name);
    std::set<std::string> known;
    for (const auto& [k, v] : ctx.available_variables) known.insert(k);
    std::function<void(const execution::Value&)> refs = [&](const execution::Value& v) {
        if (v.kind == execution::Value::Kind::ref && !known.count(v.ref))
            throw MalformedCandidate("unknown variable " + v.ref);
        for (const auto& i : v.items) refs(i);
    };
    for (const auto& [name, v] : plan.assignments) {
        refs(v);
        known.insert(name);
    }
    for (const auto& a : plan.arguments) {
        if (!d->parameter(a.name)) throw MalformedCandidate(d->name + " has no parameter " + a.name);
        refs(a.value);
    }
}

std::optional<TranslationCandidate> Translator::code_candidate(const std::string& agent_id, const TranslationContext& ctx) {
    const auto& agent = registry_.agent(agent_id);
    if (agent.kind != knowledge::AgentKind::code) throw std::invalid_argument(agent_id + " is not a code agent");
    const auto& d = registry_.lookup(agent.target);
    json r = gateway_.complete_structured(prompts::code_candidate(d.name, knowledge::describe(d), ctx.instruction, variables_text(ctx)),
                                          prompts::code_candidate_keys());
    if (!flag(r["applicable"]) || !flag(r["suitable"])) return std::nullopt;
    TranslationCandidate c;
    c.agent_id = agent_id;
    c.kind = knowledge::AgentKind::code;
    c.code = clean_code(str(r["code"]));
    c.explanation = str(r["explanation"]);
    c.suitable = true;
    check_code(c.code, ctx);
    if (execution::parse_call_script(c.code).experiment_name != d.name)
        throw MalformedCandidate("candidate of " + agent_id + " calls a different experiment");
    // Backticked names must be available variables.
    std::set<std::string> known;
    for (const auto& [k, v] : ctx.available_variables) known.insert(k);
    for (const auto& n : text::backticked_names(ctx.instruction))
        if (!known.count(n)) return std::nullopt;
    return c;
}

std::optional<TranslationCandidate> Translator::procedure_candidate(const std::string& agent_id, const TranslationContext& ctx) {
    const auto& agent = registry_.agent(agent_id);
    if (agent.kind != knowledge::AgentKind::procedure) throw std::invalid_argument(agent_id + " is not a procedure agent");
    const auto& pk = registry_.lookup_procedure(agent.target);
    json r = gateway_.complete_structured(
        prompts::procedure_rewrite(pk.doc.title, procedure::render(pk.doc), ctx.instruction, variables_text(ctx)),
        prompts::procedure_rewrite_keys());
    if (!flag(r["proper"])) return std::nullopt;
    std::set<std::string> known;
    for (const auto& [k, v] : ctx.available_variables) known.insert(k);
    std::vector<std::pair<std::string, std::string>> mapping;
    bool suitable = true;
    const json& m = r["parameter_mapping"];
    for (const auto& name : text::backticked_names(pk.doc.title)) {
        std::string target = m.is_object() && m.contains(name) ? str(m[name]) : "";
        target = text::trim(target);
        if (!target.empty() && target.front() == '`' && target.back() == '`' && target.size() > 1)
            target = target.substr(1, target.size() - 2);
        if (target.empty() || !known.count(target)) suitable = false;
        mapping.emplace_back(name, target);
    }
    TranslationCandidate c;
    c.agent_id = agent_id;
    c.kind = knowledge::AgentKind::procedure;
    c.explanation = str(r["analysis"]);
    c.suitable = suitable;
    if (!suitable) return std::nullopt;
    c.code = execute_procedure_code(pk.doc.title, str(r["rewritten_instruction"]), mapping);
    return c;
}

std::string Translator::select_final(const std::vector<TranslationCandidate>& candidates, const TranslationContext& ctx) {
    if (candidates.empty()) throw SelectionError("no candidates to select from");
    if (candidates.size() == 1) return candidates.front().code;
    std::vector<prompts::CandidateView> views;
    for (const auto& c : candidates) views.push_back({c.agent_id, c.code, c.explanation});
    auto request = prompts::code_selection(ctx.instruction, views);
    std::string problem;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (attempt > 0)
            request.messages.push_back(llm::Message::user("The code you returned cannot be used (" + problem +
                                                          "). Return one candidate's code unchanged."));
        json r = gateway_.complete_structured(request, prompts::code_selection_keys());
        std::string code = clean_code(str(r["code"]));
        try {
            check_code(code, ctx);
            return code;
        } catch (const MalformedCandidate& e) {
            problem = e.what();
            request.messages.push_back(llm::Message::assistant(r.dump()));
        }
    }
    throw SelectionError("final selection produced unusable code: " + problem);
}

TranslationOutcome Translator::translate(const TranslationContext& ctx) {
    if (ctx.n_k < 1 || ctx.n_k > ctx.n_max) throw std::invalid_argument("need 1 <= n_k <= n_max");
    last_ = {};
    last_.scores = score(ctx.instruction);
    const int total = static_cast<int>(last_.scores.size());
    int n = ctx.n_k;
    std::vector<TranslationCandidate> found;
    while (true) {
        last_.widths.push_back(n);
        found.clear();
        for (int i = 0; i < std::min(n, total); ++i) {
            const auto& id = last_.scores[static_cast<std::size_t>(i)].agent_id;
            try {
                auto c = registry_.agent(id).kind == knowledge::AgentKind::code ? code_candidate(id, ctx)
                                                                                : procedure_candidate(id, ctx);
                if (c) found.push_back(std::move(*c));
            } catch (const MalformedCandidate& e) {
                last_.notes.push_back(id + ": dropped, " + e.what());
            }
        }
        if (!found.empty()) break;
        n += 2;
        if (!(n < ctx.n_max) || last_.widths.back() >= total) {
            last_.candidates = found;
            std::vector<std::string> w;
            for (int x : last_.widths) w.push_back(std::to_string(x));
            throw TranslationFailed("no agent can translate '" + ctx.instruction + "' (widths " + text::join(w, ",") + ")");
        }
    }
    last_.candidates = found;
    last_.code = select_final(found, ctx);
    for (const auto& c : found)
        if (c.code == last_.code) last_.selected_agent = c.agent_id;
    if (last_.selected_agent.empty()) {
        std::string called = execution::parse_call_script(last_.code).experiment_name;
        for (const auto& c : found)
            if (execution::parse_call_script(c.code).experiment_name == called) {
                last_.selected_agent = c.agent_id;
                break;
            }
    }
    return last_;
}

TranslationOutcome Translator::rag_translate(const TranslationContext& ctx, int top_k) {
    TranslationOutcome out;
    out.scores = score(ctx.instruction);
    std::vector<std::string> docs;
    for (const auto& s : out.scores) {
        if (static_cast<int>(docs.size()) >= top_k) break;
        const auto& a = registry_.agent(s.agent_id);
        if (a.kind != knowledge::AgentKind::code) continue;
        docs.push_back(knowledge::describe(registry_.lookup(a.target)));
    }
    out.widths.push_back(top_k);
    json r = gateway_.complete_structured(prompts::rag_translation(ctx.instruction, docs, variables_text(ctx)),
                                          prompts::rag_translation_keys());
    out.code = clean_code(str(r["code"]));
    try {
        check_code(out.code, ctx);
    } catch (const MalformedCandidate& e) {
        out.notes.push_back(e.what());
    }
    return out;
}

} // namespace kagents::translation
