#include "kagents/lab/physics.hpp"

#include <algorithm>
#include <cmath>

#include "kagents/errors.hpp"

namespace kagents::lab {

double zz_rate(double J, double alpha0, double alpha1, double omega0, double omega1, double phase_diff,
               double delta0, double delta1, double zz_static) {
    if (delta0 == 0.0 || delta1 == 0.0 || delta0 + alpha0 == 0.0 || delta1 + alpha1 == 0.0)
        throw SingularDetuning("drive is resonant with a qubit transition");
    double num = 2.0 * J * alpha0 * alpha1 * omega0 * omega1 * std::cos(phase_diff);
    double den = delta0 * delta1 * (delta0 + alpha0) * (delta1 + alpha1);
    return zz_static + num / den;
}

double pi_pulse_width(const QubitTruth& q) { return 1.0 / (2.0 * q.rabi_rate_per_amp * q.pi_amp); }

double readout_contrast(double snr) { return std::erf(snr / (2.0 * std::sqrt(2.0))); }

RbInfidelity rb_infidelity(double p, int dimension, double gates_per_clifford) {
    double d = static_cast<double>(dimension);
    double r = (1.0 - p) * (d - 1.0) / d;
    return {r, r / gates_per_clifford};
}

double single_gate_error(const QubitTruth& q, const QubitCalibration& c, GateErrorModel m) {
    constexpr double pi = 3.14159265358979323846;
    double tg = pi_pulse_width(q);
    double coherence = tg / (3.0 * q.t1) + tg / (3.0 * q.t2);
    double amp = pi * (c.pi_amp - q.pi_amp) / q.pi_amp;
    double detuning = 2.0 * pi * (q.f01 - c.f01) * tg;
    double drag = m.drag_sensitivity * (c.drag - q.drag_opt);
    return coherence + (amp * amp + detuning * detuning + drag * drag) / 6.0;
}

double rb_decay(const QubitTruth& q, const QubitCalibration& c, GateErrorModel m) {
    double r_clifford = kGatesPerClifford * single_gate_error(q, c, m);
    return std::clamp(1.0 - 2.0 * r_clifford, 0.0, 1.0);
}

DensityMatrix8 ghz_density(double F) {
    Eigen::Matrix<double, 8, 1> ghz = Eigen::Matrix<double, 8, 1>::Zero();
    ghz[0] = ghz[7] = 1.0 / std::sqrt(2.0);
    return F * (ghz * ghz.transpose()) + (1.0 - F) * DensityMatrix8::Identity() / 8.0;
}

double ghz_fidelity(const DensityMatrix8& rho) {
    Eigen::Matrix<double, 8, 1> ghz = Eigen::Matrix<double, 8, 1>::Zero();
    ghz[0] = ghz[7] = 1.0 / std::sqrt(2.0);
    return ghz.transpose() * rho * ghz;
}

} // namespace kagents::lab
