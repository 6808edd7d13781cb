#include "kagents/lab/lab.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "kagents/errors.hpp"
#include "kagents/lab/synthetic.hpp"
#include "kagents/text.hpp"

namespace kagents::lab {

using inspection::FigureArtifact;
using inspection::Series;
using inspection::Verdict;
using text::fixed;

namespace {

constexpr double kPi = 3.14159265358979323846;

Series fitted_series(const FitResult& fit, const std::vector<double>& x, const std::string& label, int line = 0) {
    // Dense curve for plotting.
    std::vector<double> xs;
    const int n = 400;
    for (int i = 0; i < n; ++i) xs.push_back(x.front() + (x.back() - x.front()) * i / (n - 1));
    return {label, xs, evaluate(fit, xs, line), false};
}

FigureArtifact figure(std::string id, std::string kind, std::vector<Series> series, std::string xl, std::string yl,
                      std::string caption) {
    FigureArtifact f;
    f.figure_id = std::move(id);
    f.kind = std::move(kind);
    f.series = std::move(series);
    f.axis_labels = {std::move(xl), std::move(yl)};
    f.caption = std::move(caption);
    return f;
}

std::optional<FitResult> try_fit(FitKind kind, const std::vector<Series>& data, std::string* error) {
    try {
        return fit_model(kind, data);
    } catch (const FitDiverged& e) {
        *error = e.what();
    } catch (const InsufficientData& e) {
        *error = e.what();
    }
    return std::nullopt;
}

std::string pm(double v, double e, int digits = 3) { return fixed(v, digits) + " +/- " + fixed(e, digits); }

std::string oriented_key(const std::string& a, const std::string& b) { return a < b ? a + "|" + b : b + "|" + a; }

} // namespace

bool in_central_half(double x, double start, double stop) {
    double lo = std::min(start, stop);
    double hi = std::max(start, stop);
    double q = (hi - lo) / 4.0;
    return x >= lo + q && x <= hi - q;
}

std::vector<std::filesystem::path> export_csv(const ExperimentRecord& record, const std::filesystem::path& dir,
                                              const std::string& prefix) {
    std::vector<std::filesystem::path> out;
    std::filesystem::create_directories(dir);
    for (std::size_t i = 0; i < record.datasets.size(); ++i) {
        const auto& s = record.datasets[i];
        std::string label = s.label.empty() ? std::to_string(i) : s.label;
        for (char& c : label)
            if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
        auto path = dir / (prefix + "_" + label + ".csv");
        std::ofstream f(path);
        f << "x,y\n";
        for (std::size_t k = 0; k < s.x.size(); ++k) f << text::format_number(s.x[k]) << "," << text::format_number(s.y[k]) << "\n";
        out.push_back(path);
    }
    return out;
}

const FigureArtifact* ExperimentRecord::figure(const std::string& id) const {
    for (const auto& f : figures)
        if (f.figure_id == id) return &f;
    return nullptr;
}

Lab::Lab(DeviceSpec spec, std::uint64_t seed) : spec_(std::move(spec)), calibration_(spec_.calibration), rng_(seed) {
    for (const auto& [name, t] : spec_.qubits) {
        if (!(t.t1 > 0 && t.t2 > 0)) throw ConfigError(name + ": T1 and T2 must be positive");
        if (!(t.pi_amp > 0 && t.pi_amp <= 1)) throw ConfigError(name + ": pi_amp must lie in (0, 1]");
        if (!calibration_.count(name)) calibration_[name] = {t.f01, t.pi_amp, t.drag_opt};
    }
    for (const auto& p : spec_.pairs)
        if (!(p.delta_min > 0)) throw ConfigError("pair " + p.control + "/" + p.target + ": delta_min must be positive");
}

const QubitTruth& Lab::truth(const std::string& qubit) const {
    auto it = spec_.qubits.find(qubit);
    if (it == spec_.qubits.end()) throw LabError("unknown qubit '" + qubit + "'");
    return it->second;
}

const QubitCalibration& Lab::calibration(const std::string& qubit) const {
    auto it = calibration_.find(qubit);
    if (it == calibration_.end()) throw LabError("unknown qubit '" + qubit + "'");
    return it->second;
}

void Lab::set_calibration(const std::string& qubit, const QubitCalibration& c) {
    truth(qubit);
    calibration_[qubit] = c;
}

const PairTruth& Lab::pair(const std::string& a, const std::string& b) const {
    for (const auto& p : spec_.pairs)
        if ((p.control == a && p.target == b) || (p.control == b && p.target == a)) return p;
    throw LabError("no coupled pair " + a + "/" + b + " on this device");
}

std::optional<PairCalibration> Lab::pair_calibration(const std::string& a, const std::string& b) const {
    for (const auto& [key, c] : pair_calibration_)
        if ((key.first == a && key.second == b) || (key.first == b && key.second == a)) return c;
    return std::nullopt;
}

void Lab::set_pair_calibration(const std::string& a, const std::string& b, const PairCalibration& c) {
    pair(a, b);
    for (auto it = pair_calibration_.begin(); it != pair_calibration_.end(); ++it)
        if (it->first.first == b && it->first.second == a) {
            pair_calibration_.erase(it);
            break;
        }
    pair_calibration_[{a, b}] = c;
}

std::vector<StarkAttempt> Lab::stark_attempts(const std::string& a, const std::string& b) const {
    std::vector<StarkAttempt> out;
    for (const auto& at : attempts_)
        if (oriented_key(at.control, at.target) == oriented_key(a, b)) out.push_back(at);
    return out;
}

double Lab::sample(double p) {
    std::normal_distribution<double> n(0.0, spec_.noise_sigma);
    double v = std::clamp(p, 0.0, 1.0);
    if (spec_.shots > 0) {
        std::binomial_distribution<int> b(spec_.shots, v);
        v = static_cast<double>(b(rng_)) / spec_.shots;
    }
    if (spec_.noise_sigma > 0) v += n(rng_);
    return std::clamp(v, 0.0, 1.0);
}

std::vector<double> Lab::grid(double start, double stop, double step) const {
    if (!(stop > start)) throw LabError("sweep stop must exceed start");
    if (!(step > 0)) throw LabError("sweep step must be positive");
    double count = std::floor((stop - start) / step + 1e-9) + 1;
    if (count < 2) throw LabError("sweep has fewer than two points");
    if (count > 200000) throw LabError("sweep has too many points");
    std::vector<double> x;
    for (int i = 0; i < static_cast<int>(count); ++i) x.push_back(start + i * step);
    return x;
}

ExperimentRecord Lab::ramsey(const RamseyArgs& a) {
    const QubitTruth& t = truth(a.qubit);
    QubitCalibration cal = calibration(a.qubit);
    auto x = grid(a.start, a.stop, a.step);
    double contrast = readout_contrast(t.readout_snr);
    double detuning = t.f01 - cal.f01;
    auto synth = [&](double offset) {
        double f_obs = std::abs(offset + detuning);
        std::vector<double> y;
        for (double ti : x)
            y.push_back(sample(0.5 + 0.5 * contrast * std::cos(2 * kPi * f_obs * ti) * std::exp(-ti / t.t2)));
        return y;
    };
    ExperimentRecord r;
    r.experiment = "ramsey";
    r.arguments = {{"qubit", a.qubit}, {"set_offset", a.set_offset}, {"start", a.start}, {"stop", a.stop},
                   {"step", a.step}, {"update", a.update}};
    Series data{"population", x, synth(a.set_offset), true};
    r.datasets.push_back(data);
    std::string error;
    auto fit = try_fit(FitKind::decaying_sinusoid, {data}, &error);
    std::vector<Series> plotted = {data};
    std::string head = "Ramsey on " + a.qubit + ": expected offset " + fixed(a.set_offset, 3) + " MHz";
    if (!fit) {
        r.analysis = {head + ". The fit failed: " + error + ".", Verdict::inconclusive, {}};
        r.figures.push_back(figure("ramsey.plot", "ramsey", plotted, "Delay (us)", "P(1)", "Ramsey fringe"));
        r.figures.back().meta = {{"start", a.start}, {"stop", a.stop}};
        return r;
    }
    r.fit = fit;
    plotted.push_back(fitted_series(*fit, x, "fit"));
    double span = a.stop - a.start;
    double f = fit->value("frequency");
    double amp = 2 * fit->value("amplitude");
    double count = oscillation_count(*fit, span);
    std::string body = head + ", measured oscillation " + pm(f, fit->error("frequency")) + " MHz, amplitude " +
                       pm(amp, 2 * fit->error("amplitude")) + ", " + pm(count, fit->error("frequency") * span) +
                       " oscillations over the sweep.";
    Verdict v = Verdict::success;
    std::map<std::string, double> suggest;
    if (!fit->success) {
        v = Verdict::failure;
        body += " No clear oscillation was resolved; the experiment failed.";
    } else if (amp < 0.2) {
        v = Verdict::failure;
        body += " The oscillation amplitude is below 0.2; the experiment failed.";
    } else if (count < 3) {
        v = Verdict::failure;
        suggest["stop"] = a.stop * 2;
        body += " Fewer than 3 oscillations were observed; the experiment failed. Increase the stop time to " +
                text::format_number(a.stop * 2) + " us.";
    } else if (count > 10) {
        v = Verdict::failure;
        suggest["stop"] = a.stop / 2;
        body += " More than 10 oscillations were observed; the experiment failed. Decrease the stop time to " +
                text::format_number(a.stop / 2) + " us.";
    } else {
        body += " The oscillation count is inside the accepted range of 3 to 10.";
    }
    if (v == Verdict::success && a.update) {
        double estimate = f - a.set_offset;
        double tol = std::max(0.02 * std::abs(a.set_offset), 3 * fit->error("frequency"));
        if (std::abs(f - a.set_offset) > tol) {
            // The fringe frequency is |offset + d|; a second sweep at a shifted offset picks the sign.
            double delta = 0.2 * std::abs(a.set_offset);
            Series probe{"population_probe", x, synth(a.set_offset + delta), true};
            r.datasets.push_back(probe);
            if (auto pf = try_fit(FitKind::decaying_sinusoid, {probe}, &error); pf && pf->success) {
                double f2 = pf->value("frequency");
                if (std::abs(f2 - (f - delta)) < std::abs(f2 - (f + delta))) estimate = -f - a.set_offset;
                body += " A second sweep at offset " + fixed(a.set_offset + delta, 3) + " MHz fixed the sign of the detuning.";
            }
        }
        QubitCalibration updated = cal;
        updated.f01 = cal.f01 + estimate;
        calibration_[a.qubit] = updated;
        body += " Qubit frequency updated from " + fixed(cal.f01, 4) + " to " + fixed(updated.f01, 4) + " MHz.";
        r.extras["frequency_update"] = estimate;
    }
    r.analysis = {body, v, suggest};
    r.extras["oscillations"] = count;
    r.extras["amplitude"] = amp;
    r.figures.push_back(figure("ramsey.plot", "ramsey", plotted, "Delay (us)", "P(1)", "Ramsey fringe with fit"));
    r.figures.back().meta = {{"start", a.start}, {"stop", a.stop}};
    return r;
}

ExperimentRecord Lab::rabi(const RabiArgs& a) {
    const QubitTruth& t = truth(a.qubit);
    QubitCalibration cal = calibration(a.qubit);
    if (a.amp < 0) throw LabError("Rabi amplitude must not be negative");
    auto x = grid(a.start, a.stop, a.step);
    double contrast = readout_contrast(t.readout_snr);
    double f_r = t.rabi_rate_per_amp * a.amp;
    double delta = t.f01 - cal.f01;
    double f_eff = std::sqrt(f_r * f_r + delta * delta);
    double depth = f_eff > 0 ? f_r * f_r / (f_eff * f_eff) : 0.0;
    std::vector<double> y;
    for (double ti : x)
        y.push_back(sample(0.5 * (1 - contrast) + contrast * depth * 0.5 * (1 - std::cos(2 * kPi * f_eff * ti))));
    ExperimentRecord r;
    r.experiment = "rabi";
    r.arguments = {{"qubit", a.qubit}, {"amp", a.amp}, {"start", a.start}, {"stop", a.stop}, {"step", a.step},
                   {"update", a.update}};
    Series data{"population", x, y, true};
    r.datasets.push_back(data);
    std::vector<Series> plotted = {data};
    std::string error;
    auto fit = try_fit(FitKind::sinusoid, {data}, &error);
    std::string head = "Rabi on " + a.qubit + " at drive amplitude " + fixed(a.amp, 4);
    if (!fit) {
        r.analysis = {head + ". The fit failed: " + error + ".", Verdict::inconclusive, {}};
    } else {
        r.fit = fit;
        plotted.push_back(fitted_series(*fit, x, "fit"));
        double f = fit->value("frequency");
        double span = a.stop - a.start;
        double count = oscillation_count(*fit, span);
        double amp = 2 * fit->value("amplitude");
        double f_target = 1.0 / (2.0 * pi_pulse_width(t));
        double suggested = f > 0 ? a.amp * f_target / f : a.amp;
        std::string body = head + ": frequency " + pm(f, fit->error("frequency"), 4) + " MHz, amplitude " +
                           pm(amp, 2 * fit->error("amplitude")) + ", phase " + pm(fit->value("phase"), fit->error("phase")) +
                           ", offset " + pm(fit->value("offset"), fit->error("offset")) + ". That is " +
                           fixed(count, 3) + " oscillations over the sweep.";
        Verdict v = Verdict::success;
        if (!fit->success || amp < 0.2) {
            v = Verdict::failure;
            body += " No clear Rabi oscillation was resolved; the experiment failed.";
        } else if (count < 1) {
            v = Verdict::failure;
            body += " Less than one oscillation is visible; the experiment failed. Increase the stop time.";
            r.analysis.suggested_updates["stop"] = a.stop * 2;
        } else {
            body += " Suggested new drive amplitude " + fixed(suggested, 5) + ".";
            if (a.update) {
                QubitCalibration updated = cal;
                updated.pi_amp = suggested;
                calibration_[a.qubit] = updated;
                body += " The pi-pulse amplitude was updated.";
            }
        }
        auto updates = r.analysis.suggested_updates;
        r.analysis = {body, v, updates};
        r.extras = {{"oscillations", count}, {"suggested_amp", suggested}, {"amplitude", amp}};
    }
    r.figures.push_back(figure("rabi.plot", "rabi", plotted, "Pulse width (us)", "P(1)", "Rabi oscillation"));
    r.figures.back().meta = {{"start", a.start}, {"stop", a.stop}};
    return r;
}

ExperimentRecord Lab::power_rabi(const PowerRabiArgs& a) {
    const QubitTruth& t = truth(a.qubit);
    QubitCalibration cal = calibration(a.qubit);
    if (a.points < 8) throw LabError("power Rabi needs at least 8 points");
    if (!(a.amp_stop > a.amp_start)) throw LabError("amplitude sweep must increase");
    double width = pi_pulse_width(t);
    double contrast = readout_contrast(t.readout_snr);
    std::vector<double> x, y;
    for (int i = 0; i < a.points; ++i) {
        double amp = a.amp_start + (a.amp_stop - a.amp_start) * i / (a.points - 1);
        x.push_back(amp);
        y.push_back(sample(0.5 * (1 - contrast) + contrast * 0.5 * (1 - std::cos(2 * kPi * t.rabi_rate_per_amp * amp * width))));
    }
    ExperimentRecord r;
    r.experiment = "power_rabi";
    r.arguments = {{"qubit", a.qubit}, {"amp_start", a.amp_start}, {"amp_stop", a.amp_stop}, {"points", a.points}};
    Series data{"population", x, y, true};
    r.datasets.push_back(data);
    std::vector<Series> plotted = {data};
    std::string error;
    auto fit = try_fit(FitKind::sinusoid, {data}, &error);
    if (!fit) {
        r.analysis = {"Power Rabi on " + a.qubit + ": the fit failed: " + error + ".", Verdict::inconclusive, {}};
    } else {
        r.fit = fit;
        plotted.push_back(fitted_series(*fit, x, "fit"));
        double f = fit->value("frequency");
        double count = oscillation_count(*fit, a.amp_stop - a.amp_start);
        double pi_amp = f > 0 ? 0.5 / f : 0;
        std::string body = "Power Rabi on " + a.qubit + ": pi amplitude " + fixed(pi_amp, 5) + ", " + fixed(count, 3) +
                           " oscillations over the sweep.";
        Verdict v = fit->success && count >= 0.5 && 2 * fit->value("amplitude") >= 0.2 ? Verdict::success : Verdict::failure;
        if (v == Verdict::failure) body += " The sweep does not resolve a pi pulse; the experiment failed.";
        if (v == Verdict::success && a.update) {
            QubitCalibration updated = cal;
            updated.pi_amp = pi_amp;
            calibration_[a.qubit] = updated;
            body += " The pi-pulse amplitude was updated.";
        }
        r.analysis = {body, v, {}};
        r.extras = {{"oscillations", count}, {"pi_amp", pi_amp}};
    }
    r.figures.push_back(figure("power_rabi.plot", "power-rabi", plotted, "Drive amplitude", "P(1)", "Power Rabi"));
    return r;
}

ExperimentRecord Lab::pingpong(const PingpongArgs& a) {
    const QubitTruth& t = truth(a.qubit);
    QubitCalibration cal = calibration(a.qubit);
    if (a.iterations < 1) throw LabError("ping-pong needs at least one iteration");
    if (a.points < 1) throw LabError("ping-pong needs at least one point per iteration");
    std::normal_distribution<double> rel(0.0, 0.02);
    std::normal_distribution<double> abs_noise(0.0, 2e-5 * t.pi_amp / std::sqrt(a.points / 10.0));
    std::vector<double> x{0}, y{cal.pi_amp};
    double amp = cal.pi_amp;
    for (int k = 1; k <= a.iterations; ++k) {
        double err = amp - t.pi_amp;
        double measured = err * (1 + rel(rng_)) + abs_noise(rng_);
        amp -= 0.5 * measured;
        x.push_back(k);
        y.push_back(amp);
    }
    ExperimentRecord r;
    r.experiment = "pingpong";
    r.arguments = {{"qubit", a.qubit}, {"iterations", a.iterations}, {"points", a.points}, {"update", a.update}};
    Series data{"amplitude", x, y, false};
    r.datasets.push_back(data);
    double change = y.size() >= 2 ? std::abs(y.back() - y[y.size() - 2]) / std::abs(y.back()) : 1.0;
    std::string body = "Ping-pong on " + a.qubit + ": amplitude went from " + fixed(y.front(), 5) + " to " +
                       fixed(y.back(), 5) + " over " + std::to_string(a.iterations) +
                       " iterations; the last relative change is " + text::format_number(change) + ".";
    Verdict v = change <= 2e-3 ? Verdict::success : Verdict::failure;
    if (v == Verdict::success) {
        body += " The amplitude has settled.";
        if (a.update) {
            cal.pi_amp = y.back();
            calibration_[a.qubit] = cal;
        }
    } else {
        body += " The amplitude has not settled; the experiment failed. Add more iterations.";
    }
    std::map<std::string, double> suggest;
    if (v == Verdict::failure) suggest["iterations"] = a.iterations * 2;
    r.analysis = {body, v, suggest};
    r.extras = {{"final_amplitude", y.back()}, {"final_change", change}};
    r.figures.push_back(figure("pingpong.plot", "pingpong", {data}, "Iteration", "Amplitude", "Amplitude per iteration"));
    return r;
}

ExperimentRecord Lab::drag(const DragArgs& a) {
    const QubitTruth& t = truth(a.qubit);
    QubitCalibration cal = calibration(a.qubit);
    if (a.points < 5) throw LabError("DRAG sweep needs at least 5 points");
    if (a.repetitions < 1) throw LabError("DRAG repetitions must be positive");
    double start = a.sweep_start.value_or(cal.drag - 0.006);
    double stop = a.sweep_stop.value_or(cal.drag + 0.006);
    if (!(stop > start)) throw LabError("DRAG sweep stop must exceed start");
    double slope = 25.0 * a.repetitions;
    double shift = 0.5 * (cal.pi_amp / t.pi_amp - 1.0);
    std::vector<double> x, yp, ym;
    for (int i = 0; i < a.points; ++i) {
        double d = start + (stop - start) * i / (a.points - 1);
        x.push_back(d);
        yp.push_back(sample(0.5 + shift + slope * (d - t.drag_opt)));
        ym.push_back(sample(0.5 + shift - slope * (d - t.drag_opt)));
    }
    ExperimentRecord r;
    r.experiment = "drag";
    r.arguments = {{"qubit", a.qubit}, {"sweep_start", start}, {"sweep_stop", stop}, {"points", a.points},
                   {"N", a.repetitions}, {"update", a.update}};
    Series sp{"Xp", x, yp, true}, sm{"Xm", x, ym, true};
    r.datasets = {sp, sm};
    std::vector<Series> plotted = {sp, sm};
    std::string error;
    auto fit = try_fit(FitKind::two_lines, {sp, sm}, &error);
    std::string head = "DRAG on " + a.qubit + " over [" + text::format_number(start) + ", " + text::format_number(stop) + "]";
    if (!fit) {
        r.analysis = {head + ": the fit failed: " + error + ".", Verdict::inconclusive, {}};
    } else {
        r.fit = fit;
        plotted.push_back(fitted_series(*fit, x, "Xp fit", 0));
        plotted.push_back(fitted_series(*fit, x, "Xm fit", 1));
        std::string body = head + ": slopes " + text::format_number(fit->value("slope_a")) + " and " +
                           text::format_number(fit->value("slope_b")) + ", residual " + fixed(fit->residual_rms, 4) + ".";
        Verdict v = Verdict::failure;
        std::map<std::string, double> suggest;
        if (!fit->intersection) {
            body += " The lines do not cross; the experiment failed.";
        } else {
            double xi = *fit->intersection;
            body += " The estimated optimal DRAG coefficient is " + text::format_number(xi) + ".";
            if (!in_central_half(xi, start, stop)) {
                double span = stop - start;
                suggest["sweep_start"] = xi - span / 2;
                suggest["sweep_stop"] = xi + span / 2;
                body += " It lies outside the central half of the sweep; the experiment failed. Re-centre the sweep on it.";
            } else if (fit->residual_rms > 0.05) {
                body += " The data scatter too much around the lines; the experiment failed.";
            } else {
                v = Verdict::success;
                body += " It falls within the central half of the sweep.";
                if (a.update) {
                    cal.drag = xi;
                    calibration_[a.qubit] = cal;
                    body += " The DRAG coefficient was updated.";
                }
            }
            r.extras["optimum"] = xi;
        }
        r.analysis = {body, v, suggest};
    }
    r.figures.push_back(figure("drag.plot", "drag", plotted, "DRAG coefficient", "P(1)", "DRAG sweep"));
    r.figures.back().meta = {{"start", start}, {"stop", stop}};
    return r;
}

ExperimentRecord Lab::rb(const RbArgs& a) {
    const QubitTruth& t = truth(a.qubit);
    const QubitCalibration& cal = calibration(a.qubit);
    if (a.seq_length < 2) throw LabError("RB needs seq_length >= 2");
    if (a.kinds < 1) throw LabError("RB needs at least one random sequence per length");
    double p = rb_decay(t, cal);
    double contrast = readout_contrast(t.readout_snr);
    const int n = std::min(26, a.seq_length);
    std::vector<double> x, y;
    std::normal_distribution<double> noise(0.0, spec_.noise_sigma / std::sqrt(static_cast<double>(a.kinds)));
    for (int i = 0; i < n; ++i) {
        double m = 1.0 + (a.seq_length - 1.0) * i / (n - 1);
        x.push_back(m);
        double v = 0.5 + 0.5 * contrast * std::pow(p, m);
        y.push_back(std::clamp(v + (spec_.noise_sigma > 0 ? noise(rng_) : 0.0), 0.0, 1.0));
    }
    ExperimentRecord r;
    r.experiment = "rb";
    r.arguments = {{"qubit", a.qubit}, {"seq_length", a.seq_length}, {"kinds", a.kinds}};
    Series data{"survival", x, y, true};
    r.datasets.push_back(data);
    std::vector<Series> plotted = {data};
    std::string error;
    auto fit = try_fit(FitKind::exponential, {data}, &error);
    if (!fit) {
        r.analysis = {"Randomized benchmarking on " + a.qubit + ": the fit failed: " + error + ".", Verdict::inconclusive, {}};
    } else {
        r.fit = fit;
        plotted.push_back(fitted_series(*fit, x, "fit"));
        double tau = fit->value("decay");
        double p_fit = std::exp(-1.0 / tau);
        auto inf = rb_infidelity(p_fit);
        double dp = p_fit * fit->error("decay") / (tau * tau);
        std::string body = "Randomized benchmarking on " + a.qubit + ": decay per Clifford " + fixed(p_fit, 5) +
                           ", infidelity per Clifford " + pm(inf.per_clifford, dp / 2, 5) + ", per gate " +
                           fixed(inf.per_gate, 5) + ".";
        Verdict v = fit->success && inf.per_clifford >= 0 && inf.per_clifford < 0.5 ? Verdict::success : Verdict::failure;
        if (v == Verdict::failure) body += " No usable decay was resolved; the experiment failed.";
        r.analysis = {body, v, {}};
        r.extras = {{"p", p_fit}, {"infidelity_per_clifford", inf.per_clifford}, {"infidelity_per_gate", inf.per_gate},
                    {"model_p", p}};
    }
    r.figures.push_back(figure("rb.plot", "rb", plotted, "Sequence length", "P(0)", "Randomized benchmarking decay"));
    return r;
}

namespace {

ExperimentRecord decay_experiment(Lab& lab, const DecayArgs& a, const std::string& name, const std::string& kind,
                                  double tau, bool echo, const std::vector<double>& x) {
    double contrast = readout_contrast(lab.truth(a.qubit).readout_snr);
    std::vector<double> y;
    for (double ti : x) {
        double e = std::exp(-ti / tau);
        y.push_back(lab.sample(echo ? 0.5 + 0.5 * contrast * e : 0.5 * (1 - contrast) + contrast * e));
    }
    ExperimentRecord r;
    r.experiment = name;
    r.arguments = {{"qubit", a.qubit}, {"start", a.start}, {"stop", a.stop}, {"step", a.step}};
    Series data{"population", x, y, true};
    r.datasets.push_back(data);
    std::vector<Series> plotted = {data};
    std::string error;
    std::optional<FitResult> fit;
    try {
        fit = fit_model(FitKind::exponential, {data});
    } catch (const LabError& e) {
        error = e.what();
    }
    std::string label = echo ? "T2 (echo)" : "T1";
    if (!fit) {
        r.analysis = {label + " on " + a.qubit + ": the fit failed: " + error + ".", Verdict::inconclusive, {}};
    } else {
        r.fit = fit;
        plotted.push_back(fitted_series(*fit, x, "fit"));
        double t = fit->value("decay");
        bool ok = fit->success && t < 10 * (a.stop - a.start);
        std::string body = label + " on " + a.qubit + ": " + pm(t, fit->error("decay"), 2) + " us.";
        if (!ok) body += " The decay is not resolved within the sweep; the experiment failed.";
        r.analysis = {body, ok ? Verdict::success : Verdict::failure, {}};
        r.extras = {{echo ? "t2" : "t1", t}};
    }
    r.figures.push_back(figure(echo ? "echo.plot" : "t1.plot", kind, plotted, "Delay (us)", "Population", label + " decay"));
    return r;
}

} // namespace

ExperimentRecord Lab::t1(const DecayArgs& a) {
    return decay_experiment(*this, a, "t1", "t1", truth(a.qubit).t1, false, grid(a.start, a.stop, a.step));
}

ExperimentRecord Lab::spin_echo(const DecayArgs& a) {
    return decay_experiment(*this, a, "spin_echo", "echo", truth(a.qubit).t2, true, grid(a.start, a.stop, a.step));
}

ExperimentRecord Lab::stark_tomography(const StarkArgs& a) {
    const PairTruth& p = pair(a.control, a.target);
    const QubitTruth& qc = truth(a.control);
    const QubitTruth& qt = truth(a.target);
    if (!(a.frequency > 0)) throw LabError("Stark drive frequency must be positive");
    if (!(a.amp_control > 0)) throw LabError("Stark control amplitude must be positive");
    double amp_t = a.amp_target.value_or(a.amp_control * calibration(a.target).pi_amp / calibration(a.control).pi_amp);
    double d0 = a.frequency - qc.f01;
    double d1 = a.frequency - qt.f01;
    double zz = zz_rate(p.coupling, qc.anharmonicity, qt.anharmonicity, qc.rabi_rate_per_amp * a.amp_control,
                        qt.rabi_rate_per_amp * amp_t, a.phase_diff, d0, d1, p.zz_static);
    bool stable = std::abs(d0) >= p.delta_min && std::abs(d1) >= p.delta_min && a.amp_control <= p.omega_max &&
                  amp_t <= p.omega_max;

    std::vector<double> x;
    double t_scale = 1.0; // x -> effective interaction time
    if (a.mode == StarkMode::continuous) {
        if (a.sweep_points < 10) throw LabError("Stark sweep needs at least 10 points");
        if (!(a.stop > a.start)) throw LabError("Stark sweep stop must exceed start");
        for (int i = 0; i < a.sweep_points; ++i) x.push_back(a.start + (a.stop - a.start) * i / (a.sweep_points - 1));
    } else {
        if (a.gate_count < 10) throw LabError("repeated-gate sweep needs at least 10 gate counts");
        if (!(a.width > a.rise)) throw LabError("gate width must exceed the rise time");
        for (int i = 0; i < a.gate_count; ++i) x.push_back(a.start_gate_number + i);
        t_scale = a.width - a.rise;
    }
    const double nu0 = 1.0; // virtual detuning of the target tomography, MHz
    double contrast = readout_contrast(qt.readout_snr);
    std::normal_distribution<double> jitter(0.0, 0.6);
    std::normal_distribution<double> extra(0.0, 0.15);
    std::vector<double> yg, ye, zc;
    double phase_g = 0, phase_e = 0;
    double span = x.back() - x.front();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double te = a.mode == StarkMode::continuous ? std::max(0.0, x[i] - a.rise) : x[i] * t_scale;
        if (stable) {
            yg.push_back(sample(0.5 + 0.5 * contrast * std::cos(2 * kPi * (nu0 - zz / 2) * te)));
            ye.push_back(sample(0.5 + 0.5 * contrast * std::cos(2 * kPi * (nu0 + zz / 2) * te)));
            zc.push_back(std::clamp(0.98 + 2 * (sample(0.5) - 0.5) * 0.5, -1.0, 1.0));
        } else {
            phase_g += jitter(rng_);
            phase_e += jitter(rng_);
            double c = 0.1 * contrast;
            yg.push_back(std::clamp(sample(0.5 + 0.5 * c * std::cos(2 * kPi * (nu0 - zz / 2) * te + phase_g)) + extra(rng_), 0.0, 1.0));
            ye.push_back(std::clamp(sample(0.5 + 0.5 * c * std::cos(2 * kPi * (nu0 + zz / 2) * te + phase_e)) + extra(rng_), 0.0, 1.0));
            double frac = span > 0 ? (x[i] - x.front()) / span : 0;
            zc.push_back(std::clamp(0.2 + 0.8 * std::exp(-3 * frac) + 2 * (sample(0.5) - 0.5), -1.0, 1.0));
        }
    }
    ExperimentRecord r;
    r.experiment = a.mode == StarkMode::continuous ? "stark_continuous" : "stark_repeated";
    r.arguments = {{"control", a.control}, {"target", a.target}, {"frequency", a.frequency},
                   {"amp_control", a.amp_control}, {"amp_target", amp_t}, {"rise", a.rise},
                   {"phase_diff", a.phase_diff}, {"echo", a.echo}, {"update", a.update}};
    std::string xl = a.mode == StarkMode::continuous ? "Pulse width (us)" : "Gate count";
    Series sg{"control |0>", x, yg, true}, se{"control |1>", x, ye, true}, sz{"control <Z>", x, zc, true};
    r.datasets = {sg, se, sz};

    std::string error;
    auto fg = try_fit(FitKind::sinusoid, {sg}, &error);
    auto fe = try_fit(FitKind::sinusoid, {se}, &error);
    auto ok_fit = [](const std::optional<FitResult>& f) { return f && f->success && 2 * f->value("amplitude") >= 0.3; };
    double z_mean = std::accumulate(zc.begin(), zc.end(), 0.0) / static_cast<double>(zc.size());
    std::size_t k = std::min<std::size_t>(5, zc.size());
    double head_mean = std::accumulate(zc.begin(), zc.begin() + static_cast<long>(k), 0.0) / static_cast<double>(k);
    double tail_mean = std::accumulate(zc.end() - static_cast<long>(k), zc.end(), 0.0) / static_cast<double>(k);
    double drift = head_mean - tail_mean;

    std::string outcome;
    double zz_meas = 0;
    std::string desc = "Conditional Stark tomography on " + a.control + "/" + a.target + " at " +
                       fixed(a.frequency, 1) + " MHz, control amplitude " + fixed(a.amp_control, 4) +
                       ", target amplitude " + fixed(amp_t, 4) + ".";
    if (!ok_fit(fg) || !ok_fit(fe) || z_mean < 0.8 || drift > 0.15) {
        outcome = "unstable";
        desc += " The target oscillations have low contrast, the spectrum shows no clear symmetric peaks and the "
                "control qubit leaves its state. The drive point is unstable; the experiment failed.";
    } else {
        double scale = a.mode == StarkMode::continuous ? 1.0 : 1.0 / t_scale;
        zz_meas = (fe->value("frequency") - fg->value("frequency")) * scale;
        r.fit = fe;
        desc += " Oscillation frequencies " + fixed(fg->value("frequency") * scale, 4) + " and " +
                fixed(fe->value("frequency") * scale, 4) + " MHz give a ZZ interaction rate of " + fixed(zz_meas, 4) + " MHz.";
        if (std::abs(zz_meas) < p.zz_min) {
            outcome = "weak";
            desc += " The interaction is weaker than the target band; the experiment failed.";
        } else if (std::abs(zz_meas) > p.zz_max) {
            outcome = "strong";
            desc += " The interaction is stronger than the target band; the experiment failed.";
        } else {
            outcome = "success";
            desc += " The interaction lies in the target band.";
        }
    }
    attempts_.push_back({a.control, a.target, a.frequency, a.amp_control, amp_t, outcome, zz_meas});
    if (outcome == "success" && a.update) {
        PairCalibration c;
        c.calibrated = true;
        c.control = a.control;
        c.target = a.target;
        c.frequency = a.frequency;
        c.amp_control = a.amp_control;
        c.amp_target = amp_t;
        c.rise = a.rise;
        c.width = 1.0 / (8.0 * std::abs(zz_meas));
        c.phase_diff = a.phase_diff;
        c.zz = zz_meas;
        set_pair_calibration(a.control, a.target, c);
        desc += " Pair calibration stored with gate width " + fixed(c.width, 4) + " us.";
    }
    r.analysis = {desc, outcome == "success" ? Verdict::success : Verdict::failure, {}};
    r.extras = {{"outcome", outcome}, {"zz", zz_meas}, {"stable_model", stable}, {"zz_model", zz},
                {"control_mean", z_mean}, {"control_drift", drift}};
    r.figures.push_back(figure("stark.oscillation", "stark-oscillation", {sg, se}, xl, "Target <X>", "Conditional oscillation"));
    r.figures.push_back(figure("stark.fourier", "stark-fourier",
                               {spectrum(x, yg, "control |0>"), spectrum(x, ye, "control |1>")}, "Frequency",
                               "|FFT|", "Spectrum of the conditional oscillations"));
    r.figures.push_back(figure("stark.control", "stark-control", {sz}, xl, "Control <Z>", "Control qubit population"));
    return r;
}

ExperimentRecord Lab::ghz(const std::vector<std::string>& qubits) {
    if (qubits.size() != 3) throw LabError("GHZ tomography needs exactly three qubits");
    double F = 1.0;
    const int single_gates[3] = {1, 2, 2};
    for (std::size_t i = 0; i < 3; ++i) {
        double eps = single_gate_error(truth(qubits[i]), calibration(qubits[i]));
        F *= std::pow(std::max(0.0, 1.0 - eps), single_gates[i]);
    }
    for (std::size_t i = 0; i + 1 < 3; ++i) {
        auto c = pair_calibration(qubits[i], qubits[i + 1]);
        if (!c || !c->calibrated)
            throw MissingCalibration("pair " + qubits[i] + "/" + qubits[i + 1] + " has no siZZle calibration");
        const PairTruth& p = pair(qubits[i], qubits[i + 1]);
        const QubitTruth& a = truth(c->control);
        const QubitTruth& b = truth(c->target);
        double truth_zz = zz_rate(p.coupling, a.anharmonicity, b.anharmonicity, a.rabi_rate_per_amp * c->amp_control,
                                  b.rabi_rate_per_amp * c->amp_target, c->phase_diff, c->frequency - a.f01,
                                  c->frequency - b.f01, p.zz_static);
        double rel = std::abs(c->zz - truth_zz) / std::max(std::abs(truth_zz), 1e-9);
        F *= std::clamp(1.0 - (0.005 + 0.5 * rel), 0.0, 1.0);
    }
    DensityMatrix8 rho = ghz_density(F);
    double fidelity = ghz_fidelity(rho);
    ExperimentRecord r;
    r.experiment = "ghz";
    r.arguments = {{"qubits", qubits}};
    Series bars{"|rho|", {}, {}, false};
    nlohmann::json matrix = nlohmann::json::array();
    for (int i = 0; i < 8; ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < 8; ++j) {
            bars.x.push_back(i * 8 + j);
            bars.y.push_back(std::abs(rho(i, j)));
            row.push_back(rho(i, j));
        }
        matrix.push_back(row);
    }
    r.datasets.push_back(bars);
    r.extras = {{"density_matrix", matrix}, {"model_fidelity", F}, {"fidelity", fidelity}};
    r.analysis = {"GHZ state tomography on " + text::join(qubits, ", ") + ": state fidelity " + fixed(fidelity, 4) +
                      " (product of gate fidelities " + fixed(F, 4) + ").",
                  Verdict::success, {}};
    r.figures.push_back(figure("ghz.density", "ghz-density", {bars}, "Matrix element", "|rho|", "Reconstructed density matrix"));
    return r;
}

ExperimentRecord Lab::resonator_spectroscopy(const std::string& qubit) {
    const QubitTruth& t = truth(qubit);
    ResonatorParams p;
    p.center = 7000.0 + (t.f01 - 4800.0) * 0.01;
    auto s = resonator_trace(p, rng_);
    ExperimentRecord r;
    r.experiment = "resonator_spectroscopy";
    r.arguments = {{"qubit", qubit}};
    r.datasets.push_back(s);
    r.analysis = {"Resonator spectroscopy on " + qubit + ": fitted dip at " + fixed(p.center, 2) + " MHz.", Verdict::success, {}};
    r.figures.push_back(figure("resonator.plot", "resonator", {s}, "Frequency (MHz)", "Magnitude", "Resonator response"));
    return r;
}

ExperimentRecord Lab::qubit_spectroscopy(const std::string& qubit) {
    const QubitTruth& t = truth(qubit);
    PeakParams p;
    p.center = t.f01;
    p.start = calibration(qubit).f01 - 20;
    p.stop = calibration(qubit).f01 + 20;
    auto s = peak_trace(p, rng_);
    ExperimentRecord r;
    r.experiment = "qubit_spectroscopy";
    r.arguments = {{"qubit", qubit}};
    r.datasets.push_back(s);
    bool inside = t.f01 > p.start && t.f01 < p.stop;
    r.analysis = {"Qubit spectroscopy on " + qubit + (inside ? ": a peak is visible near the expected frequency."
                                                             : ": no peak inside the sweep; the experiment failed."),
                  inside ? Verdict::success : Verdict::failure, {}};
    r.figures.push_back(figure("qubit_spectroscopy.plot", "qubit-spectroscopy", {s}, "Frequency (MHz)", "Response", "Qubit spectroscopy"));
    return r;
}

ExperimentRecord Lab::gmm_readout(const std::string& qubit) {
    const QubitTruth& t = truth(qubit);
    GmmParams p;
    p.separation = t.readout_snr;
    auto s = gmm_points(p, rng_);
    ExperimentRecord r;
    r.experiment = "gmm_readout";
    r.arguments = {{"qubit", qubit}};
    r.datasets.push_back(s);
    r.analysis = {"Readout discrimination on " + qubit + ": two Gaussian clusters fitted.", Verdict::success, {}};
    r.figures.push_back(figure("gmm.plot", "gmm", {s}, "I", "Q", "Readout IQ clusters"));
    return r;
}

ExperimentRecord Lab::state_tomography(const std::string& qubit) {
    truth(qubit);
    Series s{"pauli", {0, 1, 2}, {sample(0.5) - 0.5, sample(0.5) - 0.5, 2 * sample(0.99) - 1}, false};
    ExperimentRecord r;
    r.experiment = "state_tomography";
    r.arguments = {{"qubit", qubit}};
    r.datasets.push_back(s);
    r.analysis = {"State tomography on " + qubit + ": the state is close to |0>.", Verdict::success, {}};
    r.figures.push_back(figure("tomography.plot", "state-tomography", {s}, "Pauli", "Expectation", "Single-qubit tomography"));
    return r;
}

} // namespace kagents::lab
