#pragma once

#include <random>

#include "kagents/inspection/figure.hpp"

// Trace generators for the auxiliary measurements and the inspection corpora.
namespace kagents::lab {

struct ResonatorParams {
    double center = 7000.0; // MHz
    double linewidth = 0.6;
    double depth_db = 12.0;
    double start = 6990.0;
    double stop = 7010.0;
    int points = 201;
    double noise_db = 0.4;
};

// Transmission magnitude in dB with a Lorentzian dip.
inspection::Series resonator_trace(ResonatorParams p, std::mt19937_64& rng);

struct PeakParams {
    double center = 4888.0;
    double linewidth = 1.5;
    double height = 1.0;
    double start = 4868.0;
    double stop = 4908.0;
    int points = 161;
    double noise = 0.05;
};

inspection::Series peak_trace(PeakParams p, std::mt19937_64& rng);

struct GmmParams {
    double separation = 6.0; // in units of the cluster width
    double sigma = 1.0;
    int points = 500;
    double third_weight = 0.0; // share of points in a spurious cluster above the pair
};

// Scatter of IQ points, half prepared in |0> and half in |1>.
inspection::Series gmm_points(GmmParams p, std::mt19937_64& rng);

struct RabiTraceParams {
    double frequency = 10.0; // MHz
    double contrast = 0.9;
    double decay = 5.0;       // us
    double stop = 0.5;
    int points = 101;
    double noise = 0.03;
};

inspection::Series rabi_trace(RabiTraceParams p, std::mt19937_64& rng);

} // namespace kagents::lab
