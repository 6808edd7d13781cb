#include "kagents/execution/agent.hpp"

#include <stdexcept>

#include "kagents/errors.hpp"
#include "kagents/execution/call_script.hpp"
#include "kagents/inspection/features.hpp"
#include "kagents/inspection/png.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/lab/hooks.hpp"
#include "kagents/prompts.hpp"
#include "kagents/text.hpp"
#include "kagents/translation/translator.hpp"

namespace kagents::execution {

using inspection::SummaryReport;
using inspection::Verdict;
using nlohmann::json;

namespace {

std::string error_kind(const std::exception& e) {
    if (dynamic_cast<const TranslationFailed*>(&e)) return "TranslationFailed";
    if (dynamic_cast<const SelectionError*>(&e)) return "SelectionError";
    if (dynamic_cast<const GrammarError*>(&e)) return "GrammarError";
    if (dynamic_cast<const UnknownExperiment*>(&e)) return "UnknownExperiment";
    if (dynamic_cast<const UnknownParameter*>(&e)) return "UnknownParameter";
    if (dynamic_cast<const UnboundVariable*>(&e)) return "UnboundVariable";
    if (dynamic_cast<const MissingArgument*>(&e)) return "MissingArgument";
    if (dynamic_cast<const SearchBudgetExceeded*>(&e)) return "SearchBudgetExceeded";
    if (dynamic_cast<const SingularDetuning*>(&e)) return "SingularDetuning";
    if (dynamic_cast<const MissingCalibration*>(&e)) return "MissingCalibration";
    if (dynamic_cast<const LabError*>(&e)) return "LabError";
    if (dynamic_cast<const StructureError*>(&e)) return "StructureError";
    if (dynamic_cast<const NoAgents*>(&e)) return "NoAgents";
    if (dynamic_cast<const NotFound*>(&e)) return "NotFound";
    if (dynamic_cast<const ProducerError*>(&e)) return "ProducerError";
    return "Error";
}

SummaryReport failure_summary(const std::string& kind, const std::string& what) {
    SummaryReport s;
    s.success = false;
    s.analysis = "The stage could not run: " + kind + ": " + what;
    s.raw_reports.push_back({"execution", Verdict::failure, s.analysis, {}});
    return s;
}

std::string join_path(const std::string& prefix, const std::string& label) {
    return prefix.empty() ? label : prefix + "/" + label;
}

} // namespace

json FinalReport::to_json() const {
    return {{"title", title}, {"text", text},     {"success", success},           {"terminal", terminal},
            {"steps", steps}, {"stages", stages}, {"label_sequence", label_sequence}, {"error", error}};
}

std::string transition_reports(const SummaryReport& s) {
    return std::string("Experiment success: ") + (s.success ? "true" : "false") + "\nAnalysis: " + s.analysis + "\n" +
           inspection::render_reports(s.raw_reports);
}

ExecutionAgent::ExecutionAgent(const knowledge::Registry& registry, llm::Gateway& gateway, lab::Lab& lab,
                               Transcript& transcript, ExecutionOptions options)
    : registry_(registry), gateway_(gateway), lab_(lab), transcript_(transcript), options_(std::move(options)),
      inspector_(gateway, registry.options().asset_dir) {
    const auto& l = options_.limits;
    if (l.max_stage_attempts < 1 || l.max_total_steps < 1 || l.nested_depth < 0)
        throw ConfigError("execution limits must be positive");
}

void ExecutionAgent::emit(const std::string& kind, json payload, int depth) {
    payload["depth"] = depth;
    transcript_.emit(kind, std::move(payload));
}

FinalReport ExecutionAgent::run(const procedure::ProcedureDoc& doc, VariableTable& table) {
    return run_at(doc, table, 0, "");
}

FinalReport ExecutionAgent::run_at(const procedure::ProcedureDoc& doc, VariableTable& table, int depth,
                                   const std::string& prefix) {
    FinalReport report;
    report.title = doc.title;
    json started = {{"title", doc.title},
          {"procedure", procedure::render(doc)},
          {"variables", table.to_json()},
          {"limits", {{"max_stage_attempts", options_.limits.max_stage_attempts},
                      {"max_total_steps", options_.limits.max_total_steps},
                      {"nested_depth", options_.limits.nested_depth}}},
          {"counter_policy", "stage counters are never reset within a run, also when a later stage returns to an earlier one"}};
    if (depth == 0 && !options_.run_context.empty()) started["context"] = options_.run_context;
    emit("run_started", std::move(started), depth);
    auto completed = [&](const FinalReport& r) {
        json p = {{"report", r.to_json()}};
        if (depth == 0 && options_.exchange_log) p["exchanges"] = options_.exchange_log->to_json();
        emit("run_completed", std::move(p), depth);
    };

    StateMachine machine;
    std::string history;
    try {
        machine = decompose(doc, gateway_);
    } catch (const std::exception& e) {
        report.terminal = kFailed;
        report.error = error_kind(e) + ": " + e.what();
        report.text = "The procedure could not be decomposed into stages: " + report.error;
        completed(report);
        return report;
    }

    while (!StateMachine::is_terminal(machine.current())) {
        if (report.steps >= options_.limits.max_total_steps) {
            StepBudgetExceeded err("stopped after " + std::to_string(report.steps) + " stage executions");
            report.error = std::string("StepBudgetExceeded: ") + err.what();
            machine.move_to(kFailed);
            history += "The step budget was exhausted.\n";
            break;
        }
        Stage& stage = machine.stage(machine.current());
        std::string path = join_path(prefix, stage.label);
        report.steps += 1;
        report.label_sequence.push_back(path);
        emit("stage_entered",
             {{"label", stage.label},
              {"path", path},
              {"instruction", stage.rendered_instruction()},
              {"attempt", stage.n_executed + 1},
              {"numeric_vars", stage.numeric_map()}},
             depth);

        SummaryReport summary = execute_stage(stage, table, depth, path);
        stage.n_executed += 1;
        (summary.success ? stage.n_success : stage.n_failed) += 1;

        Transition t = decide_transition(stage, summary, machine);
        json applied = json::object();
        json skipped = json::array();
        if (!StateMachine::is_terminal(t.next) && !t.updates.empty()) {
            UpdateResult u = apply_parameter_updates(machine.stage(t.next), t.updates);
            applied = u.applied;
            for (const auto& name : u.skipped) skipped.push_back({{"name", name}, {"error", "UnknownVariableName"}});
        }
        emit("transition",
             {{"from", stage.label},
              {"path", path},
              {"to", t.next},
              {"analysis", t.analysis},
              {"forced", t.forced},
              {"counters", {{"n_executed", stage.n_executed}, {"n_failed", stage.n_failed}, {"n_success", stage.n_success}}},
              {"updates", t.updates},
              {"updates_applied", applied},
              {"updates_skipped", skipped}},
             depth);
        history += stage.label + " attempt " + std::to_string(stage.n_executed) + ": " + stage.rendered_instruction() +
                   " -> " + (summary.success ? "success" : "failure") + ". " + summary.analysis + " Next: " + t.next + ".\n";
        machine.move_to(t.next);
    }

    report.terminal = machine.current();
    for (const auto& s : machine.stages())
        report.stages.push_back({{"label", s.label},
                                 {"instruction", s.rendered_instruction()},
                                 {"n_executed", s.n_executed},
                                 {"n_failed", s.n_failed},
                                 {"n_success", s.n_success}});
    std::string terminal = report.terminal;
    try {
        json r = gateway_.complete_structured(prompts::final_report(doc.title, doc.results.value_or(""), history, terminal),
                                              prompts::final_report_keys());
        report.text = r["report"].is_string() ? r["report"].get<std::string>() : r["report"].dump();
    } catch (const StructureError& e) {
        report.text = "Procedure \"" + doc.title + "\" ended in state " + terminal + ".\n" + history;
    }
    // The terminal state decides; the narrative does not.
    report.success = terminal == kComplete;
    if (!report.error.empty()) report.text += "\n" + report.error;
    completed(report);
    return report;
}

lab::ExperimentRecord ExecutionAgent::run_nested(const json& args, const VariableTable& table, int depth,
                                                 const std::string& path) {
    std::string title = args.value("procedure", "");
    const auto* pk = registry_.find_procedure(title);
    if (!pk) throw NotFound("no procedure titled '" + title + "'");
    if (depth + 1 > options_.limits.nested_depth)
        throw LabError("nested procedure depth " + std::to_string(depth + 1) + " exceeds the limit of " +
                       std::to_string(options_.limits.nested_depth));
    VariableTable inner = table;
    for (const auto& item : args.value("mapping", json::array())) {
        if (!item.is_string()) continue;
        std::string s = item.get<std::string>();
        auto eq = s.find('=');
        if (eq == std::string::npos) continue;
        std::string name = text::trim(s.substr(0, eq));
        std::string value = text::trim(s.substr(eq + 1));
        if (const Variable* v = table.find(value)) {
            if (v->kind == VarKind::value) inner.set(name, v->value, v->provenance);
            else inner.set_device(name, v->value, v->kind);
        } else {
            throw UnboundVariable("mapping refers to unknown variable '" + value + "'");
        }
    }
    FinalReport r = run_at(pk->doc, inner, depth + 1, path);
    lab::ExperimentRecord rec;
    rec.experiment = knowledge::kExecuteProcedure;
    rec.arguments = args;
    rec.analysis.text = "Nested procedure \"" + title + "\" ended in state " + r.terminal + ".\n" + r.text;
    rec.analysis.verdict = r.success ? Verdict::success : Verdict::failure;
    rec.extras["final_report"] = r.to_json();
    return rec;
}

SummaryReport ExecutionAgent::execute_stage(Stage& stage, VariableTable& table, int depth, const std::string& path) {
    std::string instruction = stage.rendered_instruction();
    translation::Translator translator(registry_, gateway_);
    translation::TranslationContext ctx{instruction, table.listing(), options_.n_k, options_.n_max};
    translation::TranslationOutcome outcome;
    try {
        outcome = translator.translate(ctx);
        emit("translation", {{"stage", stage.label}, {"path", path}, {"instruction", instruction},
                             {"status", "ok"}, {"outcome", outcome.to_json()}}, depth);
    } catch (const std::exception& e) {
        emit("translation", {{"stage", stage.label}, {"path", path}, {"instruction", instruction},
                             {"status", "failed"}, {"error", error_kind(e)}, {"message", e.what()},
                             {"outcome", translator.last_outcome().to_json()}}, depth);
        SummaryReport s = failure_summary(error_kind(e), e.what());
        emit("summary", {{"stage", stage.label}, {"path", path}, {"summary", inspection::to_json(s)}}, depth);
        return s;
    }

    lab::ExperimentRecord record;
    const knowledge::ExperimentDescriptor* d = nullptr;
    try {
        BoundCall call = parse_and_bind(outcome.code, registry_, table);
        d = &registry_.lookup(call.experiment);
        emit("code_selected", {{"stage", stage.label}, {"path", path}, {"code", outcome.code},
                               {"agent", outcome.selected_agent}, {"experiment", call.experiment},
                               {"arguments", call.arguments}}, depth);
        emit("experiment_started", {{"stage", stage.label}, {"path", path}, {"experiment", call.experiment},
                                    {"run_hook", d->run_hook}, {"arguments", call.arguments}}, depth);
        if (d->run_hook == lab::kExecuteProcedureHook) record = run_nested(call.arguments, table, depth, path);
        else record = lab::run_hook(d->run_hook, call.arguments, lab_, &gateway_, options_.search);
    } catch (const std::exception& e) {
        SummaryReport s = failure_summary(error_kind(e), e.what());
        emit("summary", {{"stage", stage.label}, {"path", path}, {"summary", inspection::to_json(s)}}, depth);
        return s;
    }

    for (const auto& f : record.figures) {
        json payload = {{"stage", stage.label}, {"path", path}, {"experiment", record.experiment},
                        {"figure_id", f.figure_id}, {"kind", f.kind}, {"caption", f.caption},
                        {"features", inspection::figure_features(f)}};
        if (options_.render_figures && !options_.figure_dir.empty()) {
            auto file = options_.figure_dir / (std::to_string(figure_count_++) + "-" + f.figure_id + ".png");
            inspection::write_file(file, inspection::render_png(f));
            payload["png"] = file.string();
        }
        emit("figure_emitted", std::move(payload), depth);
    }

    SummaryReport summary;
    try {
        std::vector<inspection::VisualHookRef> visual;
        for (const auto& h : d->visual_hooks) visual.push_back({h.figure_id, h.prompt});
        auto reports = inspector_.inspect_record(record, visual, d->text_hooks);
        for (const auto& r : reports)
            emit("inspection_report", {{"stage", stage.label}, {"path", path}, {"report", inspection::to_json(r)}}, depth);
        if (reports.empty()) {
            summary.success = record.success();
            summary.analysis = record.analysis.text;
            if (!summary.success) summary.parameter_updates = record.analysis.suggested_updates;
        } else {
            summary = inspector_.summarize(reports, d->analysis_instructions);
        }
    } catch (const std::exception& e) {
        summary = failure_summary(error_kind(e), e.what());
    }

    // Injection happens at the stage boundary, after the experiment finished.
    if (!record.injected_variables.empty() && summary.success) {
        json injected = json::object();
        for (const auto& [k, v] : record.injected_variables.items()) {
            try {
                table.set(k, v, record.experiment);
                injected[k] = v;
            } catch (const std::invalid_argument&) {
            }
        }
        emit("variables_updated", {{"stage", stage.label}, {"path", path}, {"provenance", record.experiment},
                                   {"variables", injected}}, depth);
    }
    emit("summary", {{"stage", stage.label}, {"path", path}, {"experiment", record.experiment},
                     {"extras", record.extras}, {"summary", inspection::to_json(summary)}}, depth);
    return summary;
}

Transition ExecutionAgent::decide_transition(const Stage& stage, const SummaryReport& summary, const StateMachine& machine) {
    prompts::TransitionView v;
    v.label = stage.label;
    v.description = stage.rendered_instruction();
    v.n_executed = stage.n_executed;
    v.n_failed = stage.n_failed;
    v.n_success = stage.n_success;
    v.reports = transition_reports(summary);
    v.rule = stage.transition_rule;
    for (const auto& s : machine.stages()) v.allowed_labels.push_back(s.label);
    v.allowed_labels.push_back("Complete");
    v.allowed_labels.push_back("Failed");

    Transition t;
    auto request = prompts::stage_transition(v);
    std::optional<std::string> next;
    for (int attempt = 0; attempt < 2 && !next; ++attempt) {
        json r = gateway_.complete_structured(request, prompts::stage_transition_keys());
        std::string raw = r["next"].is_string() ? r["next"].get<std::string>() : r["next"].dump();
        t.analysis = r["analysis"].is_string() ? r["analysis"].get<std::string>() : r["analysis"].dump();
        next = machine.normalise(raw);
        if (!next) {
            request.messages.push_back(llm::Message::assistant(r.dump()));
            request.messages.push_back(llm::Message::user("'" + raw + "' is not a stage label. Choose one of: " +
                                                          text::join(v.allowed_labels, ", ") + "."));
        }
    }
    if (!next) {
        t.next = kFailed;
        t.forced = true;
        t.analysis += " InvalidNextStage: no valid label after a retry.";
        return t;
    }
    t.next = *next;
    int cap = rule_attempt_cap(stage.transition_rule).value_or(options_.limits.max_stage_attempts);
    if (!summary.success && t.next == stage.label && stage.n_executed >= cap) {
        t.next = kFailed;
        t.forced = true;
        t.analysis += " The attempt limit of " + std::to_string(cap) + " is reached.";
    }
    t.updates = summary.parameter_updates;
    return t;
}

} // namespace kagents::execution
