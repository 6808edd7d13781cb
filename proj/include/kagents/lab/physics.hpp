#pragma once

#include <Eigen/Dense>

#include "kagents/lab/device.hpp"

namespace kagents::lab {

constexpr double kGatesPerClifford = 1.833;

// Stark-induced ZZ rate of two simultaneously driven, coupled transmons (MHz).
// Throws SingularDetuning when the drive sits on a transition.
double zz_rate(double J, double alpha0, double alpha1, double omega0, double omega1, double phase_diff,
               double delta0, double delta1, double zz_static);

// Duration (us) of the configured pi pulse: half a Rabi period at the true pi amplitude.
double pi_pulse_width(const QubitTruth& q);

double readout_contrast(double snr);

struct RbInfidelity {
    double per_clifford = 0;
    double per_gate = 0;
};

// r = (1 - p)(d - 1)/d, per gate = r / gates_per_clifford.
RbInfidelity rb_infidelity(double p, int dimension = 2, double gates_per_clifford = kGatesPerClifford);

struct GateErrorModel {
    double drag_sensitivity = 20.0; // rad of phase error per unit DRAG miscalibration
};

// Average error of one physical single-qubit gate given the believed calibration.
double single_gate_error(const QubitTruth& q, const QubitCalibration& c, GateErrorModel m = {});

// RB decay per Clifford implied by the gate error.
double rb_decay(const QubitTruth& q, const QubitCalibration& c, GateErrorModel m = {});

using DensityMatrix8 = Eigen::Matrix<double, 8, 8>;

// F |GHZ><GHZ| + (1 - F) I/8.
DensityMatrix8 ghz_density(double fidelity_model);
double ghz_fidelity(const DensityMatrix8& rho);

} // namespace kagents::lab
