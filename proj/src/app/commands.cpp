#include "kagents/app/commands.hpp"

#include <fstream>
#include <iostream>

#include "kagents/app/session.hpp"
#include "kagents/bench/bench.hpp"
#include "kagents/errors.hpp"
#include "kagents/execution/transcript.hpp"
#include "kagents/knowledge/catalog.hpp"
#include "kagents/lab/stark_search.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/llm/scripted_backend.hpp"
#include "kagents/procedure/procedure_doc.hpp"
#include "kagents/text.hpp"

namespace kagents::app {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::ostream& out_of(const CommandContext& c) { return c.out ? *c.out : std::cout; }
std::ostream& err_of(const CommandContext& c) { return c.err ? *c.err : std::cerr; }

fs::path transcript_path(const CommandContext& c) {
    return c.transcript.empty() ? c.out_dir / execution::default_transcript_name() : c.transcript;
}

bool is_config_error(const std::exception& e) {
    return dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ManifestError*>(&e) ||
           dynamic_cast<const ProcedureParseError*>(&e) || dynamic_cast<const InvalidDoc*>(&e) ||
           dynamic_cast<const DuplicateName*>(&e) || dynamic_cast<const UnresolvableHook*>(&e);
}

template <class F>
int guarded(const CommandContext& c, F&& body) {
    try {
        return body();
    } catch (const std::exception& e) {
        err_of(c) << "error: " << e.what() << "\n";
        return is_config_error(e) ? kExitConfig : kExitFailure;
    }
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream o(path, std::ios::binary);
    if (!o) throw ConfigError("cannot write " + path.string());
    o << text;
}

procedure::ProcedureDoc load_procedure(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("procedure file " + path.string() + " does not exist");
    auto doc = procedure::load(path.string());
    auto v = procedure::validate(doc);
    if (!v.ok()) throw ProcedureParseError(path.string() + ": " + v.errors.front());
    return doc;
}

void print_report(std::ostream& os, const execution::FinalReport& r, const fs::path& transcript) {
    os << r.text << "\n";
    os << "terminal: " << r.terminal << "  steps: " << r.steps << "\n";
    os << "transcript: " << transcript.string() << "\n";
}

std::vector<std::string> transition_trace(const std::vector<json>& events) {
    std::vector<std::string> out;
    for (const auto& e : events)
        if (e.value("kind", "") == "transition")
            out.push_back(e["payload"].value("path", "") + " -> " + e["payload"].value("to", ""));
    return out;
}

// Unified-style listing of the first divergence and what follows.
std::string diff_lines(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::size_t i = 0;
    while (i < a.size() && i < b.size() && a[i] == b[i]) ++i;
    std::string d = "first difference at entry " + std::to_string(i + 1) + "\n";
    for (std::size_t k = i; k < a.size(); ++k) d += "- " + a[k] + "\n";
    for (std::size_t k = i; k < b.size(); ++k) d += "+ " + b[k] + "\n";
    return d;
}

} // namespace

fs::path sizzle_procedure_path() { return data_dir() / "procedures" / "sizzle_search.md"; }

int cmd_run(const fs::path& procedure_path, const CommandContext& ctx) {
    return guarded(ctx, [&] {
        auto doc = load_procedure(procedure_path);
        Session s = open_session(ctx.config);
        fs::path tp = transcript_path(ctx);
        RunOutcome r = run_procedure(s, doc, device_variables(s.device), tp, "run");
        write_text(tp.parent_path() / (tp.stem().string() + ".report.txt"), r.report.text + "\n");
        print_report(out_of(ctx), r.report, tp);
        return r.report.success ? kExitOk : kExitFailure;
    });
}

int cmd_sizzle_search(const std::string& pair, const CommandContext& ctx, std::optional<int> budget) {
    return guarded(ctx, [&] {
        auto names = text::split(pair, ',');
        for (auto& n : names) n = text::trim(n);
        if (names.size() != 2 || names[0].empty() || names[1].empty())
            throw ConfigError("pair must be given as CONTROL,TARGET");
        auto doc = load_procedure(sizzle_procedure_path());
        Config cfg = ctx.config;
        if (budget) cfg.search_budget = *budget;
        if (cfg.search_budget < 1) throw ConfigError("budget must be positive");
        Session s = open_session(cfg);
        try {
            s.lab->pair(names[0], names[1]);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("device has no such pair: ") + e.what());
        }
        execution::VariableTable table = device_variables(s.device);
        table.set_device("duts", json::array({names[0], names[1]}), execution::VarKind::pair);
        execution::ExecutionOptions o = execution_options(cfg);
        o.limits.max_total_steps = cfg.search_budget;
        fs::path tp = transcript_path(ctx);
        RunOutcome r = run_procedure(s, doc, table, tp, "sizzle-search", o);

        auto attempts = s.lab->stark_attempts(names[0], names[1]);
        std::string csv = "frequency,amp_control,amp_target,outcome,zz\n";
        for (const auto& a : attempts)
            csv += text::format_number(a.frequency) + "," + text::format_number(a.amp_control) + "," +
                   text::format_number(a.amp_target) + "," + a.outcome + "," + text::format_number(a.zz) + "\n";
        fs::path map_path = tp.parent_path() / (tp.stem().string() + ".search_map.csv");
        write_text(map_path, csv);

        std::ostream& os = out_of(ctx);
        auto cal = s.lab->pair_calibration(names[0], names[1]);
        int executions = 0;
        for (const auto& st : r.report.stages) executions += st.value("n_executed", 0);
        os << "stage executions: " << executions << "  tomography runs: " << attempts.size()
           << "  distinct frequencies: " << lab::distinct_frequencies(attempts) << "\n";
        if (r.report.success && cal && cal->calibrated) {
            os << "chosen frequency: " << text::format_number(cal->frequency) << " MHz\n";
            os << "chosen amplitude: " << text::format_number(cal->amp_control) << "\n";
            os << "zz rate: " << text::format_number(cal->zz) << " MHz\n";
        } else {
            os << "no parameter set found\n";
        }
        os << "search map: " << map_path.string() << "\n";
        os << "transcript: " << tp.string() << "\n";
        return r.report.success ? kExitOk : kExitFailure;
    });
}

int cmd_bench(const std::string& kind, const CommandContext& ctx) {
    return guarded(ctx, [&]() -> int {
        if (kind != "translate" && kind != "inspect") throw ConfigError("unknown bench kind '" + kind + "'");
        const Config& cfg = ctx.config;
        std::vector<bench::BenchResult> results;
        if (kind == "translate") {
            if (!fs::exists(cfg.bench.translation_cases))
                throw ConfigError("translation cases " + cfg.bench.translation_cases.string() + " do not exist");
            auto cases = bench::load_translation_cases(cfg.bench.translation_cases);
            auto manifest = knowledge::load_manifest(cfg.bench.translation_manifest);
            Session s = open_session(cfg, make_backend(cfg.backend), lab::DeviceSpec{}, manifest);
            bench::TranslationBenchOptions o;
            o.workers = cfg.bench.workers;
            auto table = bench::benchmark_variables();
            results.push_back(bench::run_translation_bench(cases, "agents", *s.registry, *s.gateway, table, o));
            results.push_back(bench::run_translation_bench(cases, "baseline-rag", *s.registry, *s.gateway, table, o));
        } else {
            llm::GatewayOptions go;
            go.cache_dir = cfg.cache_dir;
            llm::Gateway gateway(make_backend(cfg.backend), go);
            fs::path assets = ctx.out_dir / "inspection_assets";
            fs::create_directories(assets);
            bench::write_few_shot_assets(assets, cfg.seed);
            std::vector<bench::InspectionCase> cases;
            for (const auto& k : bench::inspection_kinds()) {
                auto c = bench::generate_inspection_corpus(k, cfg.bench.inspection_success,
                                                           cfg.bench.inspection_failure, cfg.seed);
                cases.insert(cases.end(), c.begin(), c.end());
            }
            bench::InspectionBenchOptions o;
            o.asset_dir = assets;
            o.workers = cfg.bench.workers;
            results.push_back(bench::run_inspection_bench(cases, "fitting", gateway, o));
            results.push_back(bench::run_inspection_bench(cases, "visual", gateway, o));
            o.few_shot = true;
            results.push_back(bench::run_inspection_bench(cases, "visual", gateway, o));
            o.few_shot = false;
            results.push_back(bench::run_inspection_bench(cases, "combined", gateway, o));
        }
        json summary = {{"kind", kind}, {"backend", llm::to_string(cfg.backend.kind)}, {"seed", cfg.seed},
                        {"results", json::array()}};
        for (const auto& r : results) summary["results"].push_back(r.to_json());
        std::string table = bench::format_table(results);
        write_text(ctx.out_dir / ("bench_" + kind + ".json"), summary.dump(2) + "\n");
        write_text(ctx.out_dir / ("bench_" + kind + ".txt"), table);
        out_of(ctx) << table;
        return kExitOk;
    });
}

int cmd_replay(const fs::path& path, const CommandContext& ctx) {
    std::vector<json> events;
    try {
        events = execution::load_transcript(path);
    } catch (const std::exception& e) {
        err_of(ctx) << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return guarded(ctx, [&] {
        const json& started = events.front()["payload"];
        if (!started.contains("context")) throw ConfigError(path.string() + " holds no replay context");
        const json& c = started["context"];
        json exchanges;
        for (const auto& e : events)
            if (e.value("kind", "") == "run_completed" && e["payload"].value("depth", 0) == 0)
                exchanges = e["payload"].value("exchanges", json::array());
        Config cfg = config_from_json(c.at("config"));
        cfg.cache_dir.clear();
        cfg.render_figures = false;
        auto scripted = std::make_unique<llm::ScriptedBackend>(
            llm::ScriptedBackend::from_exchanges(llm::ExchangeLog::from_json(exchanges)));
        scripted->set_accepts_images(c.value("accepts_images", false));
        knowledge::Manifest m;
        for (const auto& d : c["manifest"]["experiments"]) m.experiments.push_back(knowledge::descriptor_from_json(d));
        for (const auto& p : c["manifest"]["procedures"]) m.procedures.push_back(procedure::parse(p.get<std::string>()));
        m.asset_dir = c["manifest"].value("asset_dir", "");
        Session s = open_session(cfg, std::move(scripted), lab::device_from_json(c.at("device")), m,
                                 c.value("fingerprints", json::object()));
        auto doc = procedure::parse(started.at("procedure").get<std::string>());
        auto table = execution::VariableTable::from_json(started.at("variables"));
        execution::ExecutionOptions o = execution_options(cfg);
        const json& x = c.at("execution");
        o.n_k = x.at("n_k");
        o.n_max = x.at("n_max");
        o.limits.max_stage_attempts = x.at("max_stage_attempts");
        o.limits.max_total_steps = x.at("max_total_steps");
        o.limits.nested_depth = x.at("nested_depth");
        o.search.max_frequencies = x.at("max_frequencies");
        o.search.max_amplitude = x.at("max_amplitude");
        o.search.frequency_step = x.at("frequency_step");
        o.render_figures = false;
        fs::path tp = ctx.transcript.empty() ? ctx.out_dir / ("replay-" + path.filename().string()) : ctx.transcript;
        RunOutcome r = run_procedure(s, doc, table, tp, c.value("command", "run") + "-replay", o);

        auto replayed = execution::load_transcript(tp);
        auto want = execution::stage_label_sequence(events);
        auto got = execution::stage_label_sequence(replayed);
        auto want_t = transition_trace(events);
        auto got_t = transition_trace(replayed);
        std::ostream& os = out_of(ctx);
        if (want == got && want_t == got_t) {
            os << "replay matches: " << got.size() << " stage entries, terminal " << r.report.terminal << "\n";
            return kExitOk;
        }
        os << "replay diverged\n";
        if (want != got) os << "stage labels:\n" << diff_lines(want, got);
        if (want_t != got_t) os << "transitions:\n" << diff_lines(want_t, got_t);
        return kExitFailure;
    });
}

int cmd_list(const CommandContext& ctx) {
    return guarded(ctx, [&] {
        auto m = knowledge::load_manifest(ctx.config.manifest_file);
        knowledge::RegistryOptions ro;
        ro.asset_dir = m.asset_dir;
        knowledge::Registry registry(nullptr, ro);
        register_manifest(registry, m);
        std::ostream& os = out_of(ctx);
        os << "experiments:\n";
        for (const auto& d : m.experiments) {
            os << "  " << d.name << "(";
            for (std::size_t i = 0; i < d.parameters.size(); ++i) {
                const auto& p = d.parameters[i];
                if (i) os << ", ";
                os << p.name << ": " << (p.kind == knowledge::ParamKind::device_ref ? p.device_kind : knowledge::to_string(p.kind));
                if (p.default_value) os << " = " << p.default_value->dump();
                else if (p.required) os << " (required)";
            }
            os << ")\n";
        }
        os << "procedures:\n";
        for (const auto& p : m.procedures) os << "  " << p.title << "\n";
        return kExitOk;
    });
}

} // namespace kagents::app
