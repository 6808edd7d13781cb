#include "kagents/lab/device.hpp"

#include <fstream>

#include "kagents/errors.hpp"

namespace kagents::lab {

nlohmann::json calibration_to_json(const std::map<std::string, QubitCalibration>& cal) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, c] : cal) j[name] = {{"f01", c.f01}, {"pi_amp", c.pi_amp}, {"drag", c.drag}};
    return j;
}

std::map<std::string, QubitCalibration> calibration_from_json(const nlohmann::json& j) {
    std::map<std::string, QubitCalibration> cal;
    for (auto it = j.begin(); it != j.end(); ++it)
        cal[it.key()] = {it->at("f01").get<double>(), it->at("pi_amp").get<double>(), it->value("drag", 0.0)};
    return cal;
}

DeviceSpec device_from_json(const nlohmann::json& j) {
    DeviceSpec d;
    try {
        for (auto it = j.at("qubits").begin(); it != j.at("qubits").end(); ++it) {
            const auto& q = *it;
            QubitTruth t;
            t.f01 = q.at("f01").get<double>();
            t.anharmonicity = q.value("anharmonicity", t.anharmonicity);
            t.rabi_rate_per_amp = q.value("rabi_rate_per_amp", t.rabi_rate_per_amp);
            t.pi_amp = q.value("pi_amp", t.pi_amp);
            t.drag_opt = q.value("drag_opt", t.drag_opt);
            t.t1 = q.value("t1", t.t1);
            t.t2 = q.value("t2", t.t2);
            t.readout_snr = q.value("readout_snr", t.readout_snr);
            d.qubits[it.key()] = t;
        }
        if (j.contains("calibration")) d.calibration = calibration_from_json(j.at("calibration"));
        for (const auto& [name, t] : d.qubits)
            if (!d.calibration.count(name)) d.calibration[name] = {t.f01, t.pi_amp, t.drag_opt};
        for (const auto& p : j.value("pairs", nlohmann::json::array())) {
            PairTruth pt;
            pt.control = p.at("control").get<std::string>();
            pt.target = p.at("target").get<std::string>();
            pt.coupling = p.value("coupling", pt.coupling);
            pt.zz_static = p.value("zz_static", pt.zz_static);
            pt.delta_min = p.value("delta_min", pt.delta_min);
            pt.omega_max = p.value("omega_max", pt.omega_max);
            pt.zz_min = p.value("zz_min", pt.zz_min);
            pt.zz_max = p.value("zz_max", pt.zz_max);
            if (!d.qubits.count(pt.control) || !d.qubits.count(pt.target))
                throw ConfigError("pair refers to an unknown qubit");
            d.pairs.push_back(pt);
        }
        d.noise_sigma = j.value("noise_sigma", d.noise_sigma);
        d.shots = j.value("shots", 0);
        d.variables = j.value("variables", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed device description: ") + e.what());
    }
    if (d.qubits.empty()) throw ConfigError("device has no qubits");
    return d;
}

nlohmann::json to_json(const DeviceSpec& d) {
    nlohmann::json qubits = nlohmann::json::object();
    for (const auto& [name, t] : d.qubits)
        qubits[name] = {{"f01", t.f01}, {"anharmonicity", t.anharmonicity},
                        {"rabi_rate_per_amp", t.rabi_rate_per_amp}, {"pi_amp", t.pi_amp},
                        {"drag_opt", t.drag_opt}, {"t1", t.t1}, {"t2", t.t2}, {"readout_snr", t.readout_snr}};
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : d.pairs)
        pairs.push_back({{"control", p.control}, {"target", p.target}, {"coupling", p.coupling},
                         {"zz_static", p.zz_static}, {"delta_min", p.delta_min}, {"omega_max", p.omega_max},
                         {"zz_min", p.zz_min}, {"zz_max", p.zz_max}});
    return {{"qubits", qubits}, {"calibration", calibration_to_json(d.calibration)}, {"pairs", pairs},
            {"noise_sigma", d.noise_sigma}, {"shots", d.shots}, {"variables", d.variables}};
}

DeviceSpec load_device(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open device file " + path.string());
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ConfigError("device file " + path.string() + " is not valid JSON");
    return device_from_json(j);
}

} // namespace kagents::lab
