#include "kagents/knowledge/catalog.hpp"

#include "kagents/errors.hpp"

namespace kagents::knowledge {

namespace {

using nlohmann::json;

ParameterSpec qubit_ref(std::string name, std::string description, std::string kind = "qubit") {
    ParameterSpec p;
    p.name = std::move(name);
    p.kind = ParamKind::device_ref;
    p.required = true;
    p.description = std::move(description);
    p.device_kind = std::move(kind);
    return p;
}

ParameterSpec number(std::string name, std::string unit, json value, std::string description) {
    ParameterSpec p;
    p.name = std::move(name);
    p.unit = std::move(unit);
    if (!value.is_null()) p.default_value = std::move(value);
    p.description = std::move(description);
    return p;
}

ParameterSpec required(std::string name, std::string unit, std::string description) {
    ParameterSpec p = number(std::move(name), std::move(unit), nullptr, std::move(description));
    p.required = true;
    return p;
}

ParameterSpec boolean(std::string name, bool value, std::string description) {
    ParameterSpec p;
    p.name = std::move(name);
    p.kind = ParamKind::boolean;
    p.default_value = value;
    p.description = std::move(description);
    return p;
}

ParameterSpec update_flag(const char* what) {
    return boolean("update", true, std::string("Write the ") + what + " back to the calibration on success.");
}

const char* kFitAdvice = "Trust the fitting report for the numbers and the figure for the shape. ";

std::vector<ExperimentDescriptor> build() {
    std::vector<ExperimentDescriptor> out;

    {
        ExperimentDescriptor d;
        d.name = "SimpleRamseyMultilevel";
        d.doc = "Ramsey fringe measurement on one qubit. Two pi/2 pulses are separated by a variable delay "
                "and a virtual detuning is added; the fringe frequency shows how far the drive sits from the "
                "qubit frequency. With update the qubit frequency is corrected.";
        d.parameters = {qubit_ref("dut", "The qubit to measure."),
                        number("set_offset", "MHz", 1.0, "Frequency offset of the virtual detuning."),
                        number("start", "us", 0.0, "Start time of the delay sweep."),
                        number("stop", "us", 4.0, "Stop time of the delay sweep."),
                        number("step", "us", 0.04, "Step size of the delay sweep."),
                        update_flag("corrected frequency")};
        d.analysis_instructions =
            std::string(kFitAdvice) +
            "The experiment succeeded if the fringe is clean, its amplitude is at least 0.2 and between 3 and "
            "10 oscillations are visible. With fewer than about 3 oscillations the stop time has to grow; with "
            "more than 10 it has to shrink.";
        d.run_hook = "ramsey";
        d.visual_hooks = {{"ramsey.plot",
                           "The plot shows a Ramsey fringe with its fit. Check that the points oscillate regularly, "
                           "that the fit follows them and that the oscillation amplitude is above 0.2. Count the "
                           "oscillations: fewer than 3 or more than 10 means the sweep needs changing."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "NormalisedRabi";
        d.doc = "Rabi oscillation on one qubit: the width of a resonant drive pulse is swept at fixed amplitude. "
                "The oscillation rate gives a rough pi-pulse amplitude.";
        d.parameters = {qubit_ref("dut_qubit", "The qubit to drive."),
                        number("amp", "", 0.2, "Drive amplitude of the Rabi pulse."),
                        number("start", "us", 0.0, "Start of the pulse width sweep."),
                        number("stop", "us", 0.3, "Stop of the pulse width sweep."),
                        number("step", "us", 0.002, "Step size of the pulse width sweep."),
                        update_flag("pi-pulse amplitude")};
        d.analysis_instructions = std::string(kFitAdvice) +
                                  "The experiment succeeded if at least one full oscillation with amplitude above "
                                  "0.2 is visible and the fit follows it.";
        d.run_hook = "rabi";
        d.visual_hooks = {{"rabi.plot",
                           "The plot shows a Rabi oscillation. A good result has at least one full, regular "
                           "oscillation with amplitude above 0.2 and a fit that follows the points."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "PowerRabi";
        d.doc = "Power Rabi on one qubit: the drive amplitude of a fixed-width pulse is swept to find the pi "
                "amplitude.";
        d.parameters = {qubit_ref("dut", "The qubit to drive."),
                        number("amp_start", "", 0.0, "Lowest drive amplitude of the sweep."),
                        number("amp_stop", "", 0.5, "Highest drive amplitude of the sweep."),
                        number("points", "", 51, "Number of amplitude points."),
                        update_flag("pi-pulse amplitude")};
        d.analysis_instructions = "The experiment succeeded if the sweep reaches at least half an oscillation.";
        d.run_hook = "power_rabi";
        d.visual_hooks = {{"power_rabi.plot", "The population should rise to a clear maximum inside the sweep."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "AmpPingpongCalibrationSingleQubitMultilevel";
        d.doc = "Ping-pong amplitude refinement on one qubit. Repeated pulse sequences amplify a small amplitude "
                "error, and every iteration corrects the pi-pulse amplitude.";
        d.parameters = {qubit_ref("dut", "The qubit to calibrate."),
                        number("iteration", "", 9, "Number of refinement iterations."),
                        number("points", "", 10, "Number of repeated-gate sequences in each iteration."),
                        update_flag("refined amplitude")};
        d.analysis_instructions = "The experiment succeeded if the amplitude settles over the iterations.";
        d.run_hook = "pingpong";
        d.visual_hooks = {{"pingpong.plot",
                           "The plot shows the amplitude after each iteration. It should change at first and "
                           "then stay flat."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "DragCalibrationSingleQubitMultilevel";
        d.doc = "DRAG coefficient calibration on one qubit. Two pulse sequences respond with opposite slopes to "
                "the DRAG coefficient; the crossing of the two fitted lines is the optimum.";
        d.parameters = {qubit_ref("dut", "The qubit to calibrate."),
                        number("N", "", 1, "Number of repetitions of the pulse pair in each sequence."),
                        number("num", "", 21, "Number of points in the DRAG coefficient sweep."),
                        number("sweep_start", "", nullptr,
                               "Lowest DRAG coefficient of the sweep; defaults to the current value minus 0.006."),
                        number("sweep_stop", "", nullptr,
                               "Highest DRAG coefficient of the sweep; defaults to the current value plus 0.006."),
                        update_flag("DRAG coefficient")};
        d.analysis_instructions =
            "The experiment succeeded if the two lines are clearly separated, the residuals are small and the "
            "crossing falls within the central half of the sweep. Otherwise re-centre the sweep on the crossing.";
        d.run_hook = "drag";
        d.visual_hooks = {{"drag.plot",
                           "The plot shows two data sets with fitted lines of opposite slope. They should cross "
                           "near the middle of the sweep with little scatter around the lines."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "SingleQubitRandomizedBenchmarking";
        d.doc = "Randomized benchmarking on one qubit. Random Clifford sequences of growing length are followed "
                "by their inverse; the survival decay gives the average gate infidelity.";
        d.parameters = {qubit_ref("dut", "The qubit to benchmark."),
                        number("seq_length", "", 1024, "Longest Clifford sequence length."),
                        number("kinds", "", 10, "Number of random sequences per length.")};
        d.analysis_instructions = "The experiment succeeded if a clean exponential decay was fitted.";
        d.run_hook = "rb";
        d.visual_hooks = {{"rb.plot", "The survival probability should decay smoothly towards 0.5."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "SimpleT1";
        d.doc = "Energy relaxation (T1) measurement on one qubit: the qubit is excited and read out after a "
                "variable delay.";
        d.parameters = {qubit_ref("dut", "The qubit to measure."),
                        number("start", "us", 0.0, "Start of the delay sweep."),
                        number("stop", "us", 150.0, "Stop of the delay sweep."),
                        number("step", "us", 2.0, "Step size of the delay sweep.")};
        d.analysis_instructions = "The experiment succeeded if the decay is resolved within the sweep.";
        d.run_hook = "t1";
        d.visual_hooks = {{"t1.plot", "The population should decay exponentially within the sweep."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "SpinEchoMultilevel";
        d.doc = "Hahn spin echo on one qubit: a refocusing pulse sits in the middle of a variable delay, "
                "giving the echo coherence time.";
        d.parameters = {qubit_ref("dut", "The qubit to measure."),
                        number("start", "us", 0.0, "Start of the delay sweep."),
                        number("stop", "us", 100.0, "Stop of the delay sweep."),
                        number("step", "us", 2.0, "Step size of the delay sweep.")};
        d.analysis_instructions = "The experiment succeeded if the decay is resolved within the sweep.";
        d.run_hook = "spin_echo";
        d.visual_hooks = {{"echo.plot", "The echo signal should decay smoothly towards 0.5."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    auto stark = [](bool repeated) {
        ExperimentDescriptor d;
        d.name = repeated ? "ConditionalStarkShiftRepeatedGate" : "ConditionalStarkShiftContinuous";
        d.doc = repeated
                    ? "Conditional Stark shift tomography with repeated gates: a fixed-width siZZle gate on a "
                      "qubit pair is applied a growing number of times while the target phase is tracked with "
                      "the control in |0> and in |1>. Stores the pair calibration on success."
                    : "Conditional Stark shift tomography with a continuous pulse: both qubits of a pair are "
                      "driven off resonance and the pulse width is swept while the target phase is tracked "
                      "with the control in |0> and in |1>. The frequency difference is the ZZ rate. Stores the "
                      "pair calibration on success.";
        d.parameters = {qubit_ref("duts", "Control and target qubit.", "pair"),
                        required("frequency", "MHz", "Drive frequency of the Stark tones."),
                        required("amp_control", "", "Drive amplitude on the control qubit."),
                        number("amp_target", "", nullptr,
                               "Drive amplitude on the target qubit; inferred from the pi amplitudes when absent."),
                        number("rise", "us", 0.015, "Rise time of the pulse edges."),
                        number("phase_diff", "rad", 0.0, "Phase difference between the two drives.")};
        if (repeated) {
            d.parameters.push_back(number("width", "us", 0.2, "Width of each Stark gate."));
            d.parameters.push_back(boolean("echo", true, "Insert an echo pulse in each gate."));
            d.parameters.push_back(number("start_gate_number", "", 0, "First number of gates in the sweep."));
            d.parameters.push_back(number("gate_count", "", 40, "Number of gate counts in the sweep."));
        } else {
            d.parameters.push_back(boolean("echo", true, "Insert an echo pulse."));
            d.parameters.push_back(number("start", "us", 0.0, "Shortest Stark pulse width."));
            d.parameters.push_back(number("stop", "us", 10.0, "Longest Stark pulse width."));
            d.parameters.push_back(number("sweep_points", "", 101, "Number of pulse widths in the sweep."));
        }
        d.parameters.push_back(update_flag("pair calibration"));
        d.analysis_instructions =
            "The experiment succeeded only if the target oscillates with good contrast, the spectrum shows a clear "
            "peak, the control qubit stays in place and the ZZ rate lies in the target band.";
        d.run_hook = repeated ? "stark_repeated" : "stark_continuous";
        d.visual_hooks = {{"stark.oscillation", "The target qubit should oscillate cleanly for both control states."},
                          {"stark.fourier", "The spectrum should show a clear peak for each control state."},
                          {"stark.control", "The control qubit population should stay near one."}};
        d.text_hooks = {"fitting"};
        return d;
    };
    out.push_back(stark(false));
    out.push_back(stark(true));
    {
        ExperimentDescriptor d;
        d.name = "GHZStateTomography";
        d.doc = "Prepares a three-qubit GHZ state with siZZle gates along a chain and reconstructs it by state "
                "tomography. Both links need a pair calibration.";
        d.parameters = {qubit_ref("duts", "Three qubits in chain order.", "qubits")};
        d.analysis_instructions = "Report the state fidelity.";
        d.run_hook = "ghz";
        d.visual_hooks = {{"ghz.density", "The bars should show the four GHZ corner elements standing out."}};
        d.text_hooks = {"fitting"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "StarkFrequencyProposal";
        d.doc = "Asks the parameter-search model for the next siZZle drive frequency on a qubit pair, based on "
                "every earlier attempt on that pair. Injects frequency, amp_control, rise, width and phase_diff.";
        d.parameters = {qubit_ref("duts", "Control and target qubit.", "pair")};
        d.analysis_instructions = "A proposal always succeeds.";
        d.run_hook = "stark_frequency_proposal";
        d.text_hooks = {"proposal_report"};
        out.push_back(d);
    }
    {
        ExperimentDescriptor d;
        d.name = "StarkAmplitudeProposal";
        d.doc = "Asks the parameter-search model for the siZZle control amplitude at a fixed drive frequency, "
                "based on earlier attempts. Injects amp_control, rise, width and phase_diff.";
        d.parameters = {qubit_ref("duts", "Control and target qubit.", "pair"),
                        required("frequency", "MHz", "Drive frequency at which the amplitude is chosen.")};
        d.analysis_instructions = "A proposal always succeeds.";
        d.run_hook = "stark_amplitude_proposal";
        d.text_hooks = {"proposal_report"};
        out.push_back(d);
    }
    auto single = [](const char* name, const char* doc, const char* hook, const char* figure, const char* prompt) {
        ExperimentDescriptor d;
        d.name = name;
        d.doc = doc;
        d.parameters = {qubit_ref("dut", "The qubit to measure.")};
        d.analysis_instructions = "Follow the figure.";
        d.run_hook = hook;
        d.visual_hooks = {{figure, prompt}};
        d.text_hooks = {"fitting"};
        return d;
    };
    out.push_back(single("ResonatorSpectroscopy",
                         "Sweeps the readout tone across the readout resonator of a qubit and records the "
                         "transmitted magnitude.",
                         "resonator_spectroscopy", "resonator.plot",
                         "A successful scan shows one clear dip well above the noise."));
    out.push_back(single("MeasurementCalibrationMultilevelGMM",
                         "Calibrates the readout discrimination of a qubit by fitting a Gaussian mixture to the "
                         "IQ points of the prepared states.",
                         "gmm_readout", "gmm.plot",
                         "Exactly two major distributions should be visible. One or more than two is a failure."));
    out.push_back(single("QubitSpectroscopyFrequency",
                         "Sweeps a weak drive around the expected qubit frequency to locate the transition by "
                         "spectroscopy.",
                         "qubit_spectroscopy", "qubit_spectroscopy.plot",
                         "A successful scan shows one clear peak inside the sweep."));
    out.push_back(single("QubitStateTomography",
                         "Measures the three Pauli expectation values of one qubit and reconstructs its state.",
                         "state_tomography", "tomography.plot", "The Bloch vector should have length close to one."));
    return out;
}

} // namespace

const std::vector<ExperimentDescriptor>& builtin_descriptors() {
    static const std::vector<ExperimentDescriptor> all = build();
    return all;
}

std::vector<std::string> default_experiment_names() {
    return {"SimpleRamseyMultilevel", "NormalisedRabi", "PowerRabi", "AmpPingpongCalibrationSingleQubitMultilevel",
            "DragCalibrationSingleQubitMultilevel", "SingleQubitRandomizedBenchmarking", "SimpleT1",
            "SpinEchoMultilevel", "ConditionalStarkShiftContinuous", "ConditionalStarkShiftRepeatedGate",
            "GHZStateTomography", "StarkFrequencyProposal", "StarkAmplitudeProposal"};
}

std::vector<std::string> benchmark_experiment_names() {
    auto names = default_experiment_names();
    for (const char* n : {"ResonatorSpectroscopy", "MeasurementCalibrationMultilevelGMM", "QubitSpectroscopyFrequency",
                          "QubitStateTomography"})
        names.push_back(n);
    return names;
}

const ExperimentDescriptor& builtin(const std::string& name) {
    for (const auto& d : builtin_descriptors())
        if (d.name == name) return d;
    throw NotFound("no built-in experiment named '" + name + "'");
}

ExperimentDescriptor execute_procedure_descriptor() {
    ExperimentDescriptor d;
    d.name = kExecuteProcedure;
    d.doc = "Runs a stored procedure as a nested run, with its backticked inputs mapped to available variables.";
    ParameterSpec proc;
    proc.name = "procedure";
    proc.kind = ParamKind::string;
    proc.required = true;
    proc.description = "Title of the stored procedure.";
    ParameterSpec instr;
    instr.name = "instruction";
    instr.kind = ParamKind::string;
    instr.default_value = "";
    instr.description = "The rewritten instruction.";
    ParameterSpec mapping;
    mapping.name = "mapping";
    mapping.kind = ParamKind::list;
    mapping.default_value = nlohmann::json::array();
    mapping.description = "Entries name=variable binding procedure inputs.";
    d.parameters = {proc, instr, mapping};
    d.analysis_instructions = "The nested run decides success.";
    d.run_hook = "execute_procedure";
    d.text_hooks = {"procedure_report"};
    d.internal = true;
    return d;
}

} // namespace kagents::knowledge
