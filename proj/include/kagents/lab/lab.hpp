#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kagents/lab/device.hpp"
#include "kagents/lab/physics.hpp"
#include "kagents/lab/record.hpp"

namespace kagents::lab {

struct RamseyArgs {
    std::string qubit;
    double set_offset = 1.0; // MHz
    double start = 0.0;      // us
    double stop = 4.0;
    double step = 0.04;
    bool update = true;
};

struct RabiArgs {
    std::string qubit;
    double amp = 0.2;
    double start = 0.0; // us
    double stop = 0.3;
    double step = 0.002;
    bool update = true;
};

struct PowerRabiArgs {
    std::string qubit;
    double amp_start = 0.0;
    double amp_stop = 0.5;
    int points = 51;
    bool update = true;
};

struct PingpongArgs {
    std::string qubit;
    int iterations = 9;
    int points = 10;
    bool update = true;
};

struct DragArgs {
    std::string qubit;
    std::optional<double> sweep_start;
    std::optional<double> sweep_stop;
    int points = 21;
    int repetitions = 1;
    bool update = true;
};

struct RbArgs {
    std::string qubit;
    int seq_length = 1024;
    int kinds = 10;
};

struct DecayArgs {
    std::string qubit;
    double start = 0.0;
    double stop = 150.0;
    double step = 2.0;
};

enum class StarkMode { continuous, repeated };

struct StarkArgs {
    std::string control;
    std::string target;
    double frequency = 0;
    double amp_control = 0;
    std::optional<double> amp_target;
    double rise = 0.015;
    double phase_diff = 0.0;
    bool echo = true;
    StarkMode mode = StarkMode::continuous;
    // continuous: pulse width sweep in us
    double start = 0.0;
    double stop = 10.0;
    int sweep_points = 101;
    // repeated: gate count sweep at a fixed width
    double width = 0.2;
    int start_gate_number = 0;
    int gate_count = 40;
    bool update = true;
};

struct StarkAttempt {
    std::string control;
    std::string target;
    double frequency = 0;
    double amp_control = 0;
    double amp_target = 0;
    std::string outcome; // unstable, weak, strong, success
    double zz = 0;
};

class Lab {
public:
    Lab(DeviceSpec spec, std::uint64_t seed);

    const DeviceSpec& spec() const { return spec_; }
    const QubitTruth& truth(const std::string& qubit) const;
    const QubitCalibration& calibration(const std::string& qubit) const;
    void set_calibration(const std::string& qubit, const QubitCalibration& c);
    const std::map<std::string, QubitCalibration>& calibrations() const { return calibration_; }

    const PairTruth& pair(const std::string& a, const std::string& b) const;
    std::optional<PairCalibration> pair_calibration(const std::string& a, const std::string& b) const;
    void set_pair_calibration(const std::string& a, const std::string& b, const PairCalibration& c);

    const std::vector<StarkAttempt>& stark_attempts() const { return attempts_; }
    std::vector<StarkAttempt> stark_attempts(const std::string& a, const std::string& b) const;

    ExperimentRecord ramsey(const RamseyArgs& args);
    ExperimentRecord rabi(const RabiArgs& args);
    ExperimentRecord power_rabi(const PowerRabiArgs& args);
    ExperimentRecord pingpong(const PingpongArgs& args);
    ExperimentRecord drag(const DragArgs& args);
    ExperimentRecord rb(const RbArgs& args);
    ExperimentRecord t1(const DecayArgs& args);
    ExperimentRecord spin_echo(const DecayArgs& args);
    ExperimentRecord stark_tomography(const StarkArgs& args);
    ExperimentRecord ghz(const std::vector<std::string>& qubits);
    ExperimentRecord resonator_spectroscopy(const std::string& qubit);
    ExperimentRecord qubit_spectroscopy(const std::string& qubit);
    ExperimentRecord gmm_readout(const std::string& qubit);
    ExperimentRecord state_tomography(const std::string& qubit);

    // Noisy population sample clipped to [0, 1].
    double sample(double p);
    std::mt19937_64& rng() { return rng_; }

private:
    std::vector<double> grid(double start, double stop, double step) const;

    DeviceSpec spec_;
    std::map<std::string, QubitCalibration> calibration_;
    std::map<std::pair<std::string, std::string>, PairCalibration> pair_calibration_;
    std::vector<StarkAttempt> attempts_;
    std::mt19937_64 rng_;
};

// Predicate used by the DRAG analysis.
bool in_central_half(double x, double start, double stop);

} // namespace kagents::lab
