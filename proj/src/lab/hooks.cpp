#include "kagents/lab/hooks.hpp"

#include <cmath>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::lab {

using nlohmann::json;

namespace {

const json* field(const json& args, const char* name) {
    auto it = args.find(name);
    if (it == args.end() || it->is_null()) return nullptr;
    return &*it;
}

double num(const json& args, const char* name, double fallback) {
    const json* v = field(args, name);
    if (!v) return fallback;
    if (v->is_boolean()) throw LabError(std::string("argument '") + name + "' must be a number");
    if (!v->is_number()) throw LabError(std::string("argument '") + name + "' must be a number");
    return v->get<double>();
}

std::optional<double> opt_num(const json& args, const char* name) {
    if (!field(args, name)) return std::nullopt;
    return num(args, name, 0);
}

int integer(const json& args, const char* name, int fallback) {
    double v = num(args, name, fallback);
    if (std::floor(v) != v) throw LabError(std::string("argument '") + name + "' must be an integer");
    return static_cast<int>(v);
}

bool flag(const json& args, const char* name, bool fallback) {
    const json* v = field(args, name);
    if (!v) return fallback;
    if (!v->is_boolean()) throw LabError(std::string("argument '") + name + "' must be True or False");
    return v->get<bool>();
}

std::string qubit(const json& args, const char* name) {
    const json* v = field(args, name);
    if (!v || !v->is_string()) throw LabError(std::string("argument '") + name + "' must name a qubit");
    return v->get<std::string>();
}

std::vector<std::string> qubits(const json& args, const char* name, std::size_t count) {
    const json* v = field(args, name);
    if (!v || !v->is_array()) throw LabError(std::string("argument '") + name + "' must list qubits");
    std::vector<std::string> out;
    for (const auto& q : *v) {
        if (!q.is_string()) throw LabError(std::string("argument '") + name + "' must list qubit names");
        out.push_back(q.get<std::string>());
    }
    if (count && out.size() != count)
        throw LabError(std::string("argument '") + name + "' must list " + std::to_string(count) + " qubits");
    return out;
}

StarkArgs stark_args(const json& a, StarkMode mode) {
    auto pair = qubits(a, "duts", 2);
    StarkArgs s;
    s.control = pair[0];
    s.target = pair[1];
    s.mode = mode;
    s.frequency = num(a, "frequency", 0);
    s.amp_control = num(a, "amp_control", 0);
    s.amp_target = opt_num(a, "amp_target");
    s.rise = num(a, "rise", s.rise);
    s.phase_diff = num(a, "phase_diff", s.phase_diff);
    s.echo = flag(a, "echo", s.echo);
    s.update = flag(a, "update", s.update);
    if (mode == StarkMode::continuous) {
        s.start = num(a, "start", s.start);
        s.stop = num(a, "stop", s.stop);
        s.sweep_points = integer(a, "sweep_points", s.sweep_points);
    } else {
        s.width = num(a, "width", s.width);
        s.start_gate_number = integer(a, "start_gate_number", s.start_gate_number);
        s.gate_count = integer(a, "gate_count", s.gate_count);
    }
    return s;
}

ExperimentRecord proposal(const std::string& focus, const json& a, Lab& lab, llm::Gateway* gateway,
                          const SearchSettings& search) {
    if (!gateway) throw LabError("parameter proposals need a language model");
    auto pair = qubits(a, "duts", 2);
    std::optional<double> current = opt_num(a, "frequency");
    if (focus == "amplitude" && !current) throw LabError("an amplitude proposal needs the drive frequency");
    StarkProposal p = propose_stark_params(*gateway, lab, pair[0], pair[1], focus, current, search);
    ExperimentRecord r;
    r.experiment = focus == "frequency" ? "stark_frequency_proposal" : "stark_amplitude_proposal";
    r.arguments = a;
    r.injected_variables = {{"amp_control", p.amp_control}, {"rise", p.rise}, {"width", p.width},
                            {"phase_diff", p.phase_diff}};
    if (focus == "frequency") r.injected_variables["frequency"] = p.frequency;
    std::string text = "Proposed Stark drive for " + pair[0] + "/" + pair[1] + ": frequency " +
                       text::format_number(p.frequency) + " MHz, control amplitude " +
                       text::format_number(p.amp_control) + ". " + p.analysis;
    r.analysis = {text, inspection::Verdict::success, {}};
    r.extras = {{"frequency", p.frequency}, {"amp_control", p.amp_control}, {"zz_interaction_positive", p.zz_positive}};
    return r;
}

} // namespace

const std::vector<HookInfo>& hook_table() {
    static const std::vector<HookInfo> table = {
        {"ramsey", {"dut", "set_offset", "start", "stop", "step", "update"}, {"ramsey.plot"}},
        {"rabi", {"dut_qubit", "amp", "start", "stop", "step", "update"}, {"rabi.plot"}},
        {"power_rabi", {"dut", "amp_start", "amp_stop", "points", "update"}, {"power_rabi.plot"}},
        {"pingpong", {"dut", "iteration", "points", "update"}, {"pingpong.plot"}},
        {"drag", {"dut", "N", "num", "sweep_start", "sweep_stop", "update"}, {"drag.plot"}},
        {"rb", {"dut", "seq_length", "kinds"}, {"rb.plot"}},
        {"t1", {"dut", "start", "stop", "step"}, {"t1.plot"}},
        {"spin_echo", {"dut", "start", "stop", "step"}, {"echo.plot"}},
        {"stark_continuous",
         {"duts", "frequency", "amp_control", "amp_target", "rise", "phase_diff", "echo", "start", "stop",
          "sweep_points", "update"},
         {"stark.oscillation", "stark.fourier", "stark.control"}},
        {"stark_repeated",
         {"duts", "frequency", "amp_control", "amp_target", "rise", "width", "phase_diff", "echo",
          "start_gate_number", "gate_count", "update"},
         {"stark.oscillation", "stark.fourier", "stark.control"}},
        {"ghz", {"duts"}, {"ghz.density"}},
        {"resonator_spectroscopy", {"dut"}, {"resonator.plot"}},
        {"qubit_spectroscopy", {"dut"}, {"qubit_spectroscopy.plot"}},
        {"gmm_readout", {"dut"}, {"gmm.plot"}},
        {"state_tomography", {"dut"}, {"tomography.plot"}},
        {"stark_frequency_proposal", {"duts"}, {}, true},
        {"stark_amplitude_proposal", {"duts", "frequency"}, {}, true},
        {kExecuteProcedureHook, {"procedure", "instruction", "mapping"}, {}},
    };
    return table;
}

const HookInfo* find_hook(const std::string& id) {
    for (const auto& h : hook_table())
        if (h.id == id) return &h;
    return nullptr;
}

ExperimentRecord run_hook(const std::string& id, const json& a, Lab& lab, llm::Gateway* gateway,
                          const SearchSettings& search) {
    if (!a.is_object()) throw LabError("hook arguments must be an object");
    if (id == "ramsey") {
        RamseyArgs r;
        r.qubit = qubit(a, "dut");
        r.set_offset = num(a, "set_offset", r.set_offset);
        r.start = num(a, "start", r.start);
        r.stop = num(a, "stop", r.stop);
        r.step = num(a, "step", r.step);
        r.update = flag(a, "update", r.update);
        return lab.ramsey(r);
    }
    if (id == "rabi") {
        RabiArgs r;
        r.qubit = qubit(a, "dut_qubit");
        r.amp = num(a, "amp", r.amp);
        r.start = num(a, "start", r.start);
        r.stop = num(a, "stop", r.stop);
        r.step = num(a, "step", r.step);
        r.update = flag(a, "update", r.update);
        return lab.rabi(r);
    }
    if (id == "power_rabi") {
        PowerRabiArgs r;
        r.qubit = qubit(a, "dut");
        r.amp_start = num(a, "amp_start", r.amp_start);
        r.amp_stop = num(a, "amp_stop", r.amp_stop);
        r.points = integer(a, "points", r.points);
        r.update = flag(a, "update", r.update);
        return lab.power_rabi(r);
    }
    if (id == "pingpong") {
        PingpongArgs r;
        r.qubit = qubit(a, "dut");
        r.iterations = integer(a, "iteration", r.iterations);
        r.points = integer(a, "points", r.points);
        r.update = flag(a, "update", r.update);
        return lab.pingpong(r);
    }
    if (id == "drag") {
        DragArgs r;
        r.qubit = qubit(a, "dut");
        r.repetitions = integer(a, "N", r.repetitions);
        r.points = integer(a, "num", r.points);
        r.sweep_start = opt_num(a, "sweep_start");
        r.sweep_stop = opt_num(a, "sweep_stop");
        r.update = flag(a, "update", r.update);
        return lab.drag(r);
    }
    if (id == "rb") {
        RbArgs r;
        r.qubit = qubit(a, "dut");
        r.seq_length = integer(a, "seq_length", r.seq_length);
        r.kinds = integer(a, "kinds", r.kinds);
        return lab.rb(r);
    }
    if (id == "t1" || id == "spin_echo") {
        DecayArgs r;
        r.qubit = qubit(a, "dut");
        if (id == "spin_echo") r.stop = 100;
        r.start = num(a, "start", r.start);
        r.stop = num(a, "stop", r.stop);
        r.step = num(a, "step", r.step);
        return id == "t1" ? lab.t1(r) : lab.spin_echo(r);
    }
    if (id == "stark_continuous") return lab.stark_tomography(stark_args(a, StarkMode::continuous));
    if (id == "stark_repeated") return lab.stark_tomography(stark_args(a, StarkMode::repeated));
    if (id == "ghz") return lab.ghz(qubits(a, "duts", 3));
    if (id == "resonator_spectroscopy") return lab.resonator_spectroscopy(qubit(a, "dut"));
    if (id == "qubit_spectroscopy") return lab.qubit_spectroscopy(qubit(a, "dut"));
    if (id == "gmm_readout") return lab.gmm_readout(qubit(a, "dut"));
    if (id == "state_tomography") return lab.state_tomography(qubit(a, "dut"));
    if (id == "stark_frequency_proposal") return proposal("frequency", a, lab, gateway, search);
    if (id == "stark_amplitude_proposal") return proposal("amplitude", a, lab, gateway, search);
    if (id == kExecuteProcedureHook) throw LabError("nested procedures are run by the execution agent");
    throw NotFound("no run hook named '" + id + "'");
}

} // namespace kagents::lab
