// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "testing.hpp"

#include "kagents/app/commands.hpp"
#include "kagents/app/session.hpp"
#include "kagents/bench/bench.hpp"
#include "kagents/errors.hpp"
#include "kagents/execution/transcript.hpp"
#include "kagents/lab/fit.hpp"
#include "kagents/lab/physics.hpp"
#include "kagents/lab/stark_search.hpp"
#include "kagents/llm/backend.hpp"
#include "kagents/llm/gateway.hpp"
#include "kagents/llm/rules_backend.hpp"
#include "kagents/procedure/procedure_doc.hpp"
#include "kagents/prompts.hpp"
#include "kagents/text.hpp"
#include "kagents/translation/translator.hpp"

namespace fs = std::filesystem;
using namespace kagents;
using nlohmann::json;

namespace {

struct Check {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string num(double v) { return text::format_number(v); }

const fs::path work = testing::temp_dir("acceptance");

// Shared between criteria 1, 2 and 8.
fs::path calibration_transcript;
std::string calibration_bytes;

procedure::ProcedureDoc stored(const std::string& name) {
    return procedure::load(testing::data_path("procedures/" + name).string());
}

Check closed_loop_calibration() {
    auto t0 = std::chrono::steady_clock::now();
    app::Session s = app::open_session(app::default_config());
    const auto& believed = s.lab->calibration("Q0");
    if (believed.f01 != 4887.5 || believed.pi_amp != 0.22 || believed.drag != -0.0045)
        return {false, "device file does not hold the required initial errors"};
    calibration_transcript = work / "calibration.jsonl";
    auto r = app::run_procedure(s, stored("single_qubit_calibration.md"), app::device_variables(s.device),
                                calibration_transcript);
    double elapsed = seconds_since(t0);
    calibration_bytes = testing::read_file(calibration_transcript);

    const auto& cal = s.lab->calibration("Q0");
    const auto& truth = s.lab->truth("Q0");
    double df = std::abs(cal.f01 - truth.f01);
    double da = std::abs(cal.pi_amp - truth.pi_amp) / truth.pi_amp;
    const double drag_span = 0.012; // default sweep is the believed value +/- 0.006
    double dd = std::abs(cal.drag - truth.drag_opt) / drag_span;
    auto rb = s.lab->rb({"Q0"});
    double infidelity = rb.extras.value("infidelity_per_clifford", 1.0);

    std::ostringstream d;
    d << "terminal=" << r.report.terminal << " df=" << num(df) << "MHz amp_err=" << num(da)
      << " drag_err/span=" << num(dd) << " rb_r=" << num(infidelity) << " t=" << num(elapsed) << "s";
    bool ok = r.report.success && r.report.terminal == execution::kComplete && df <= 0.01 && da <= 0.005 &&
              dd <= 0.10 && rb.success() && infidelity <= 5e-3 && elapsed < 10.0;
    return {ok, d.str()};
}

Check ramsey_retry() {
    if (calibration_transcript.empty()) return {false, "no calibration transcript"};
    auto events = execution::load_transcript(calibration_transcript);
    std::vector<double> stops;
    int retries = 0;
    for (const auto& e : events) {
        const json& p = e["payload"];
        if (p.value("path", "") != "Stage1/Stage1") continue;
        if (e["kind"] == "stage_entered") stops.push_back(p["numeric_vars"].value("stop_time", 0.0));
        if (e["kind"] == "transition" && p["from"] == "Stage1" && p["to"] == "Stage1") ++retries;
    }
    std::ostringstream d;
    d << "coarse Ramsey entered " << stops.size() << " times, stop times";
    for (double s : stops) d << " " << num(s);
    bool ok = stops.size() == 2 && retries == 1 && stops[1] > stops[0];
    return {ok, d.str()};
}

std::string widths_text(const std::vector<int>& w) {
    std::vector<std::string> s;
    for (int x : w) s.push_back(std::to_string(x));
    return "[" + text::join(s, ",") + "]";
}

Check translation_escalation() {
    translation::TranslationContext ctx;
    ctx.n_k = 3;
    ctx.n_max = 9;

    auto f = testing::escalation_fixture(true);
    ctx.instruction = f.instruction;
    ctx.available_variables = f.table.listing();
    translation::Translator t(*f.registry, *f.gateway);
    auto out = t.translate(ctx);
    int rank = 0;
    for (std::size_t i = 0; i < out.scores.size(); ++i)
        if (out.scores[i].agent_id == f.target) rank = static_cast<int>(i) + 1;
    bool first = rank == 4 && out.widths == std::vector<int>{3, 5} && out.selected_agent == f.target;

    auto g = testing::escalation_fixture(false);
    translation::Translator u(*g.registry, *g.gateway);
    bool failed = false;
    try {
        u.translate(ctx);
    } catch (const TranslationFailed&) {
        failed = true;
    }
    bool second = failed && u.last_outcome().widths == std::vector<int>{3, 5, 7};

    std::ostringstream d;
    d << "rank=" << rank << " widths=" << widths_text(out.widths) << " selected=" << out.selected_agent
      << "; unsuitable: " << (failed ? "TranslationFailed" : "no error") << " widths="
      << widths_text(u.last_outcome().widths);
    return {first && second, d.str()};
}

// Runs the stored search procedure on one pair inside an open session.
execution::FinalReport sizzle(app::Session& s, const std::string& a, const std::string& b, const fs::path& tp) {
    auto table = app::device_variables(s.device);
    table.set_device("duts", json::array({a, b}), execution::VarKind::pair);
    auto o = app::execution_options(s.config);
    o.limits.max_total_steps = s.config.search_budget;
    return app::run_procedure(s, stored("sizzle_search.md"), table, tp, "sizzle-search", o).report;
}

Check sizzle_search() {
    auto t0 = std::chrono::steady_clock::now();
    app::Session s = app::open_session(app::default_config());
    auto report = sizzle(s, "Q0", "Q1", work / "sizzle.jsonl");
    double elapsed = seconds_since(t0);
    int executions = 0;
    for (const auto& st : report.stages) executions += st.value("n_executed", 0);
    auto attempts = s.lab->stark_attempts("Q0", "Q1");
    int freqs = lab::distinct_frequencies(attempts);
    auto cal = s.lab->pair_calibration("Q0", "Q1");
    const auto& pair = s.lab->pair("Q0", "Q1");
    bool in_band = cal && cal->calibrated && std::abs(cal->zz) >= pair.zz_min && std::abs(cal->zz) <= pair.zz_max;
    std::ostringstream d;
    d << "terminal=" << report.terminal << " executions=" << executions << " frequencies=" << freqs
      << " zz=" << (cal ? num(cal->zz) : "none") << " t=" << num(elapsed) << "s";
    bool ok = report.success && in_band && executions <= 100 && freqs <= 20 && elapsed < 30.0;
    return {ok, d.str()};
}

long double oracle_zz(long double J, long double a0, long double a1, long double w0, long double w1, long double phi,
                      long double d0, long double d1, long double zz0) {
    long double numerator = 2.0L * J * a0 * a1 * w0 * w1 * std::cos(phi);
    long double denominator = d0 * d1 * (d0 + a0) * (d1 + a1);
    return zz0 + numerator / denominator;
}

// Noiseless fit of one kind; returns the largest parameter deviation.
double fit_deviation(lab::FitKind kind) {
    using lab::FitKind;
    std::vector<double> x;
    for (int i = 0; i < 201; ++i) x.push_back(i * 0.01);
    std::map<std::string, double> want;
    inspection::Series a{"a", x, {}}, b{"b", x, {}};
    for (double t : x) {
        switch (kind) {
        case FitKind::sinusoid:
            want = {{"amplitude", 0.45}, {"frequency", 3.2}, {"phase", 0.7}, {"offset", 0.5}};
            a.y.push_back(0.45 * std::cos(2 * std::numbers::pi * 3.2 * t + 0.7) + 0.5);
            break;
        case FitKind::decaying_sinusoid:
            want = {{"amplitude", 0.45}, {"frequency", 3.2}, {"phase", 0.7}, {"offset", 0.5}, {"decay", 1.3}};
            a.y.push_back(0.45 * std::exp(-t / 1.3) * std::cos(2 * std::numbers::pi * 3.2 * t + 0.7) + 0.5);
            break;
        case FitKind::exponential:
            want = {{"amplitude", 0.8}, {"decay", 0.6}, {"offset", 0.1}};
            a.y.push_back(0.8 * std::exp(-t / 0.6) + 0.1);
            break;
        case FitKind::two_lines:
            want = {{"slope_a", 2.5}, {"intercept_a", -1.0}, {"slope_b", -1.5}, {"intercept_b", 2.0}};
            a.y.push_back(2.5 * t - 1.0);
            b.y.push_back(-1.5 * t + 2.0);
            break;
        }
    }
    std::vector<inspection::Series> data{a};
    if (kind == FitKind::two_lines) data.push_back(b);
    auto fit = lab::fit_model(kind, data);
    double worst = 0;
    for (const auto& [name, v] : want) worst = std::max(worst, std::abs(fit.value(name) - v));
    return worst;
}

Check oracles() {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
        double J = 1 + 4 * U(rng), a0 = -250 + 100 * U(rng), a1 = -250 + 100 * U(rng);
        double w0 = 40 * U(rng), w1 = 40 * U(rng), phi = 2 * std::numbers::pi * U(rng), zz0 = 0.05 * U(rng);
        double d0 = (U(rng) < 0.5 ? -1 : 1) * (20 + 100 * U(rng));
        double d1 = (U(rng) < 0.5 ? -1 : 1) * (20 + 100 * U(rng));
        double got = lab::zz_rate(J, a0, a1, w0, w1, phi, d0, d1, zz0);
        long double want = oracle_zz(J, a0, a1, w0, w1, phi, d0, d1, zz0);
        worst = std::max(worst, static_cast<double>(std::abs((got - want) / want)));
    }
    double fit_worst = 0;
    for (auto k : {lab::FitKind::sinusoid, lab::FitKind::decaying_sinusoid, lab::FitKind::exponential,
                   lab::FitKind::two_lines})
        fit_worst = std::max(fit_worst, fit_deviation(k));
    lab::FitResult rabi;
    rabi.params = {{"frequency", 17.602131636706986, 0}};
    double count = lab::oscillation_count(rabi, 0.29);
    std::ostringstream d;
    d << "zz rel=" << worst << " fit dev=" << fit_worst << " oscillations=" << text::fixed(count, 12);
    bool ok = worst <= 1e-12 && fit_worst <= 1e-6 && std::abs(count - 5.104618174645026) <= 1e-6;
    return {ok, d.str()};
}

Check rb_arithmetic() {
    auto r = lab::rb_infidelity(0.9952);
    std::ostringstream d;
    d << "r=" << text::fixed(r.per_clifford, 7) << " per gate=" << text::fixed(r.per_gate, 7);
    bool ok = std::abs(r.per_clifford - 0.0024) <= 1e-12 && std::abs(r.per_gate - 0.001309) <= 5e-7;
    return {ok, d.str()};
}

Check ghz_state() {
    app::Session s = app::open_session(app::default_config());
    auto r01 = sizzle(s, "Q0", "Q1", work / "ghz-pair01.jsonl");
    auto r12 = sizzle(s, "Q1", "Q2", work / "ghz-pair12.jsonl");
    auto run = app::run_procedure(s, stored("ghz_tomography.md"), app::device_variables(s.device),
                                  work / "ghz.jsonl");
    auto rec = s.lab->ghz({"Q0", "Q1", "Q2"});
    lab::DensityMatrix8 rho;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j) rho(i, j) = rec.extras["density_matrix"][i][j].get<double>();
    double trace_err = std::abs(rho.trace() - 1.0);
    double asym = (rho - rho.transpose()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<lab::DensityMatrix8> es(rho);
    double min_eig = es.eigenvalues().minCoeff();
    double F = lab::ghz_fidelity(lab::ghz_density(0.9));
    std::ostringstream d;
    d << "pairs " << r01.terminal << "/" << r12.terminal << " ghz " << run.report.terminal << " trace err="
      << trace_err << " asym=" << asym << " min eig=" << min_eig << " F(0.9)=" << text::fixed(F, 12)
      << " report " << run.report.text.size() << " chars";
    bool ok = r01.success && r12.success && run.report.success && !run.report.text.empty() && trace_err <= 1e-12 &&
              asym <= 1e-12 && min_eig >= -1e-12 && std::abs(F - 0.9125) <= 1e-12;
    return {ok, d.str()};
}

class Unreachable : public llm::Backend {
public:
    llm::BackendKind kind() const override { return llm::BackendKind::remote; }
    llm::BackendReply chat(const llm::ChatRequest&, const std::string&) override {
        throw NetworkError("offline");
    }
    llm::EmbeddingVector embed(const std::string&) override { throw NetworkError("offline"); }
};

Check replay() {
    if (calibration_transcript.empty()) return {false, "no calibration transcript"};
    app::CommandContext ctx;
    ctx.out_dir = work / "replay";
    std::ostringstream out, err;
    ctx.out = &out;
    ctx.err = &err;
    int code = app::cmd_replay(calibration_transcript, ctx);

    // A fresh identical run writes the same bytes.
    app::Session s = app::open_session(app::default_config());
    auto again = work / "calibration-again.jsonl";
    app::run_procedure(s, stored("single_qubit_calibration.md"), app::device_variables(s.device), again);
    bool same_bytes = testing::read_file(again) == calibration_bytes;

    llm::GatewayOptions go;
    go.cache_dir = work / "cache";
    llm::ChatRequest req = prompts::report_judgement("Rabi fit: frequency 17.6 MHz, amplitude 0.99.");
    llm::Gateway first(std::make_unique<llm::RulesBackend>(), go);
    auto a = first.complete(req);
    llm::Gateway second(std::make_unique<Unreachable>(), go);
    auto b = second.complete(req);
    bool cached = b.cache_hit && a.text == b.text &&
                  testing::read_file(go.cache_dir / "responses" / (a.digest + ".txt")) == a.text;

    std::ostringstream d;
    d << "replay exit=" << code << " rerun identical=" << same_bytes << " cache identical=" << cached;
    return {code == app::kExitOk && same_bytes && cached, d.str()};
}

Check benchmarks() {
    app::Config cfg = app::default_config();
    llm::Gateway gateway(std::make_unique<llm::RulesBackend>());
    knowledge::Registry registry(&gateway);
    app::register_manifest(registry, knowledge::load_manifest(cfg.bench.translation_manifest));
    auto cases = bench::load_translation_cases(cfg.bench.translation_cases);
    auto table = bench::benchmark_variables();
    auto agents = bench::run_translation_bench(cases, "agents", registry, gateway, table);
    auto baseline = bench::run_translation_bench(cases, "baseline-rag", registry, gateway, table);
    std::cout << bench::format_table({agents, baseline});

    std::vector<bench::BenchResult> inspect;
    bool inspect_ok = true;
    fs::path assets = work / "assets";
    bench::write_few_shot_assets(assets, cfg.seed);
    for (const auto& kind : bench::inspection_kinds()) {
        auto corpus = bench::generate_inspection_corpus(kind, 100, 100, cfg.seed);
        for (bool few : {false, true}) {
            bench::InspectionBenchOptions o;
            o.few_shot = few;
            o.asset_dir = assets;
            auto r = bench::run_inspection_bench(corpus, "visual", gateway, o);
            inspect_ok = inspect_ok && r.cases == 200 && r.accuracy >= 0.95;
            r.method = kind + " " + r.method;
            inspect.push_back(r);
        }
    }
    std::cout << bench::format_table(inspect);
    std::ostringstream d;
    d << "translation cases=" << agents.cases << " agents=" << text::fixed(agents.accuracy, 3)
      << " baseline=" << text::fixed(baseline.accuracy, 3) << "; inspection min accuracy=";
    double lo = 1;
    for (const auto& r : inspect) lo = std::min(lo, r.accuracy);
    d << text::fixed(lo, 3);
    bool ok = agents.cases == 80 && agents.accuracy == 1.0 && baseline.cases == 80 && inspect_ok;
    return {ok, d.str()};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
        {"closed-loop single-qubit calibration", closed_loop_calibration},
        {"Ramsey stage retried once with a longer sweep", ramsey_retry},
        {"translation escalation", translation_escalation},
        {"siZZle parameter search", sizzle_search},
        {"numeric oracles", oracles},
        {"RB infidelity arithmetic", rb_arithmetic},
        {"GHZ tomography", ghz_state},
        {"replay and cache determinism", replay},
        {"translation and inspection benchmarks", benchmarks},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check c;
        try {
            c = criteria[i].second();
        } catch (const std::exception& e) {
            c = {false, std::string("error: ") + e.what()};
        }
        if (!c.pass) ++failures;
        std::cout << (c.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
                  << c.detail << std::endl;
    }
    std::cout << failures << " of " << criteria.size() << " criteria failed" << std::endl;
    return failures;
}
