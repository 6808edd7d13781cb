#include "kagents/bench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "kagents/errors.hpp"
#include "kagents/inspection/inspector.hpp"
#include "kagents/inspection/png.hpp"
#include "kagents/lab/fit.hpp"
#include "kagents/lab/synthetic.hpp"
#include "kagents/text.hpp"
#include "parallel.hpp"

namespace kagents::bench {

using inspection::FigureArtifact;
using inspection::Series;
using nlohmann::json;

const std::vector<std::string>& inspection_kinds() {
    static const std::vector<std::string> k = {"rabi-fourier", "resonator-spectroscopy", "gmm-readout", "drag"};
    return k;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

InspectionCase rabi_case(bool good, std::mt19937_64& rng) {
    lab::RabiTraceParams p;
    p.frequency = uniform(rng, 6, 20);
    p.contrast = good ? uniform(rng, 0.5, 0.95) : uniform(rng, 0.0, 0.04);
    p.noise = good ? 0.03 : uniform(rng, 0.04, 0.1);
    Series trace = lab::rabi_trace(p, rng);
    InspectionCase c;
    c.kind = "rabi-fourier";
    c.label_success = good;
    c.figure.figure_id = "rabi.fourier";
    c.figure.kind = "rabi-fourier";
    c.figure.series.push_back(lab::spectrum(trace.x, trace.y, "spectrum"));
    c.figure.axis_labels = {"Frequency (MHz)", "Amplitude"};
    c.figure.caption = "Fourier spectrum of a Rabi oscillation";
    try {
        auto fit = lab::fit_model(lab::FitKind::sinusoid, {trace});
        c.fitting_report = "The fitting result of the Rabi oscillation: frequency " + text::fixed(fit.value("frequency"), 3) +
                           " MHz, amplitude " + text::fixed(std::abs(fit.value("amplitude")), 3) + ", offset " +
                           text::fixed(fit.value("offset"), 3) + ".";
        if (!fit.success) c.fitting_report += " The fit did not converge to a resolvable oscillation.";
    } catch (const LabError& e) {
        c.fitting_report = std::string("The fit failed: ") + e.what() + ".";
    }
    return c;
}

InspectionCase resonator_case(bool good, std::mt19937_64& rng) {
    lab::ResonatorParams p;
    p.center = uniform(rng, 6995, 7005);
    p.depth_db = good ? uniform(rng, 8, 15) : uniform(rng, 0.0, 0.6);
    p.linewidth = uniform(rng, 0.4, 1.0);
    Series s = resonator_trace(p, rng);
    InspectionCase c;
    c.kind = "resonator-spectroscopy";
    c.label_success = good;
    c.figure.figure_id = "resonator.plot";
    c.figure.kind = "resonator";
    c.figure.series.push_back(s);
    c.figure.axis_labels = {"Frequency (MHz)", "Magnitude (dB)"};
    c.figure.caption = "Resonator spectroscopy";
    auto it = std::min_element(s.y.begin(), s.y.end());
    double at = s.x[static_cast<std::size_t>(it - s.y.begin())];
    std::vector<double> sorted = s.y;
    std::sort(sorted.begin(), sorted.end());
    double depth = sorted[sorted.size() / 2] - *it;
    c.fitting_report = "Lorentzian fit of the transmission: resonance at " + text::fixed(at, 3) + " MHz with depth " +
                       text::fixed(depth, 2) + " dB.";
    if (!good && uniform(rng, 0, 1) < 0.5) c.fitting_report += " The fitted linewidth did not converge.";
    return c;
}

InspectionCase gmm_case(bool good, std::mt19937_64& rng) {
    lab::GmmParams p;
    bool three = false;
    if (good) {
        p.separation = uniform(rng, 5, 8);
    } else if (uniform(rng, 0, 1) < 0.5) {
        p.separation = uniform(rng, 0.0, 1.0);
    } else {
        p.separation = uniform(rng, 5, 8);
        p.third_weight = uniform(rng, 0.25, 0.35);
        three = true;
    }
    Series s = gmm_points(p, rng);
    InspectionCase c;
    c.kind = "gmm-readout";
    c.label_success = good;
    c.figure.figure_id = "gmm.plot";
    c.figure.kind = "gmm";
    c.figure.series.push_back(s);
    c.figure.axis_labels = {"I", "Q"};
    c.figure.caption = "Readout IQ clouds";
    // Two-component readout fidelity from the known preparation split at x = 0.
    int right = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) right += (i % 2 == 0) == (s.x[i] < 0);
    double fidelity = static_cast<double>(right) / static_cast<double>(s.x.size());
    c.fitting_report = "Two-component Gaussian mixture fitted; assignment fidelity " + text::fixed(fidelity, 3) + ".";
    if (!good && !three) c.fitting_report += " The two components are too close and the fit is inconclusive.";
    return c;
}

InspectionCase drag_case(bool good, std::mt19937_64& rng) {
    double start = -0.01, stop = 0.004;
    double pos = good ? uniform(rng, 0.3, 0.7) : (uniform(rng, 0, 1) < 0.5 ? uniform(rng, 1.2, 2.0) : uniform(rng, -1.0, -0.2));
    double x0 = start + pos * (stop - start);
    double slope = uniform(rng, 20, 35);
    std::normal_distribution<double> n(0.0, 0.01);
    Series a{"Xp", {}, {}, true}, b{"Xm", {}, {}, true};
    for (int i = 0; i < 21; ++i) {
        double x = start + (stop - start) * i / 20.0;
        a.x.push_back(x);
        b.x.push_back(x);
        a.y.push_back(0.5 + slope * (x - x0) + n(rng));
        b.y.push_back(0.5 - slope * (x - x0) + n(rng));
    }
    InspectionCase c;
    c.kind = "drag";
    c.label_success = good;
    c.figure.figure_id = "drag.plot";
    c.figure.kind = "drag";
    c.figure.series = {a, b};
    c.figure.axis_labels = {"DRAG coefficient", "Population"};
    c.figure.caption = "DRAG calibration";
    c.figure.meta = {{"start", start}, {"stop", stop}};
    try {
        auto fit = lab::fit_model(lab::FitKind::two_lines, {a, b});
        c.fitting_report = fit.intersection ? "The estimated optimal DRAG coefficient is " + text::format_number(*fit.intersection) + "."
                                            : "The two lines are parallel; no crossing point.";
    } catch (const LabError& e) {
        c.fitting_report = std::string("The fit failed: ") + e.what() + ".";
    }
    return c;
}

InspectionCase make_case(const std::string& kind, bool good, std::mt19937_64& rng) {
    if (kind == "rabi-fourier") return rabi_case(good, rng);
    if (kind == "resonator-spectroscopy") return resonator_case(good, rng);
    if (kind == "gmm-readout") return gmm_case(good, rng);
    if (kind == "drag") return drag_case(good, rng);
    throw std::invalid_argument("unknown inspection corpus kind '" + kind + "'");
}

const std::map<std::string, std::string>& guidance() {
    static const std::map<std::string, std::string> g = {
        {"rabi-fourier", "A successful Rabi experiment shows a significant peak in the Fourier spectrum."},
        {"resonator-spectroscopy", "A successful resonator scan shows one clear dip well above the noise."},
        {"gmm-readout", "A successful readout shows exactly two major distributions. More than two major distributions, "
                        "or overlapping ones, mean failure."},
        {"drag", "A successful DRAG calibration shows two clearly separated lines that cross in the central half of the sweep."},
    };
    return g;
}

} // namespace

std::vector<InspectionCase> generate_inspection_corpus(const std::string& kind, int n_success, int n_fail,
                                                       std::uint64_t seed) {
    if (n_success < 1 || n_fail < 1) throw std::invalid_argument("corpus needs at least one case per label");
    std::mt19937_64 rng(seed ^ fnv1a(kind));
    std::vector<InspectionCase> out;
    out.reserve(static_cast<std::size_t>(n_success + n_fail));
    for (int i = 0; i < n_success; ++i) out.push_back(make_case(kind, true, rng));
    for (int i = 0; i < n_fail; ++i) out.push_back(make_case(kind, false, rng));
    return out;
}

std::string visual_prompt(const std::string& kind, bool few_shot) {
    auto it = guidance().find(kind);
    if (it == guidance().end()) throw std::invalid_argument("unknown inspection corpus kind '" + kind + "'");
    std::string p = it->second;
    if (few_shot)
        p += "\nThis is an example of a successful result: Image(\"" + kind + "_success.png\")\n"
             "This is an example of a failed result: Image(\"" + kind + "_failure.png\")\n";
    return p;
}

void write_few_shot_assets(const std::filesystem::path& dir, std::uint64_t seed) {
    for (const auto& kind : inspection_kinds()) {
        auto corpus = generate_inspection_corpus(kind, 1, 1, seed ^ 0x5eedull);
        inspection::write_file(dir / (kind + "_success.png"), inspection::render_png(corpus[0].figure));
        inspection::write_file(dir / (kind + "_failure.png"), inspection::render_png(corpus[1].figure));
    }
}

BenchResult run_inspection_bench(const std::vector<InspectionCase>& cases, const std::string& mode,
                                 llm::Gateway& gateway, const InspectionBenchOptions& options) {
    if (mode != "fitting" && mode != "visual" && mode != "combined")
        throw ConfigError("unknown inspection mode '" + mode + "'");
    auto before = gateway.usage_snapshot();
    std::vector<int> verdict(cases.size(), 0);
    std::vector<std::string> narrative(cases.size());
    detail::parallel_for(static_cast<int>(cases.size()), options.workers, [&](int i) {
        const auto& c = cases[static_cast<std::size_t>(i)];
        inspection::Inspector insp(gateway, options.asset_dir);
        bool ok = false;
        try {
            if (mode == "fitting") {
                auto r = insp.judge_report_text(c.fitting_report);
                ok = r.verdict == inspection::Verdict::success;
                narrative[static_cast<std::size_t>(i)] = r.narrative;
            } else {
                auto v = insp.inspect_visual(c.figure, visual_prompt(c.kind, options.few_shot));
                if (mode == "visual") {
                    ok = v.verdict == inspection::Verdict::success;
                    narrative[static_cast<std::size_t>(i)] = v.narrative;
                } else {
                    inspection::InspectionReport fit{"text:fitting", inspection::Verdict::inconclusive, c.fitting_report, {}};
                    auto s = insp.summarize({v, fit}, guidance().at(c.kind));
                    ok = s.success;
                    narrative[static_cast<std::size_t>(i)] = s.analysis;
                }
            }
        } catch (const std::exception& e) {
            narrative[static_cast<std::size_t>(i)] = e.what();
        }
        verdict[static_cast<std::size_t>(i)] = ok ? 1 : 0;
    });
    BenchResult r;
    r.method = mode + (mode != "fitting" && options.few_shot ? "+few-shot" : "");
    std::map<std::string, int> correct;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        bool hit = (verdict[i] == 1) == cases[i].label_success;
        r.per_kind_cases[cases[i].kind] += 1;
        correct[cases[i].kind] += hit;
        r.correct += hit;
        if (!hit)
            r.misses.push_back({{"kind", cases[i].kind}, {"index", i}, {"label", cases[i].label_success ? "success" : "failure"},
                                {"narrative", narrative[i]}});
    }
    for (const auto& [k, n] : r.per_kind_cases) r.per_kind_accuracy[k] = static_cast<double>(correct[k]) / n;
    r.cases = static_cast<int>(cases.size());
    r.accuracy = r.cases ? static_cast<double>(r.correct) / r.cases : 0.0;
    auto after = gateway.usage_snapshot();
    r.usage.input_tokens = after.input_tokens - before.input_tokens;
    r.usage.output_tokens = after.output_tokens - before.output_tokens;
    r.usage.calls = after.calls - before.calls;
    r.usage.cache_hits = after.cache_hits - before.cache_hits;
    r.usage.estimated_cost = after.estimated_cost - before.estimated_cost;
    return r;
}

} // namespace kagents::bench
