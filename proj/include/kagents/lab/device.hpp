#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace kagents::lab {

// Hidden ground truth of one transmon. Frequencies in MHz, times in microseconds.
struct QubitTruth {
    double f01 = 4888.0;
    double anharmonicity = -200.0;
    double rabi_rate_per_amp = 88.0; // MHz of Rabi frequency per unit drive amplitude
    double pi_amp = 0.2;
    double drag_opt = -0.006;
    double t1 = 50.0;
    double t2 = 30.0;
    double readout_snr = 6.0;
};

// What the software currently believes.
struct QubitCalibration {
    double f01 = 0;
    double pi_amp = 0;
    double drag = 0;
};

struct PairTruth {
    std::string control;
    std::string target;
    double coupling = 3.0;        // J, MHz
    double zz_static = 0.02;      // MHz
    double delta_min = 30.0;      // closest stable detuning of the drive from either qubit, MHz
    double omega_max = 0.45;      // largest stable drive amplitude
    double zz_min = 0.1;          // target band for |ZZ|, MHz
    double zz_max = 1.0;
};

struct PairCalibration {
    bool calibrated = false;
    std::string control; // qubit driven with amp_control
    std::string target;
    double frequency = 0;
    double amp_control = 0;
    double amp_target = 0;
    double rise = 0;
    double width = 0;
    double phase_diff = 0;
    double zz = 0;
};

struct DeviceSpec {
    std::map<std::string, QubitTruth> qubits;
    std::map<std::string, QubitCalibration> calibration;
    std::vector<PairTruth> pairs;
    double noise_sigma = 0.02;
    int shots = 0; // > 0 adds binomial sampling on top of the Gaussian noise
    // Named device references handed to the agents: name -> qubit name or list of names.
    nlohmann::json variables = nlohmann::json::object();
};

DeviceSpec device_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DeviceSpec& d);
DeviceSpec load_device(const std::filesystem::path& path);

nlohmann::json calibration_to_json(const std::map<std::string, QubitCalibration>& cal);
std::map<std::string, QubitCalibration> calibration_from_json(const nlohmann::json& j);

} // namespace kagents::lab
