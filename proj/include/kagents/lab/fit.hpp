#pragma once

#include <optional>
#include <string>
#include <vector>

#include "kagents/inspection/figure.hpp"

namespace kagents::lab {

enum class FitKind { sinusoid, decaying_sinusoid, exponential, two_lines };

std::string to_string(FitKind kind);

struct FitParameter {
    std::string name;
    double value = 0;
    double uncertainty = 0;
};

// Parameter names:
//   sinusoid           amplitude, frequency, phase, offset       y = A cos(2 pi f x + phi) + c
//   decaying_sinusoid  ... plus decay                            y = A exp(-x/tau) cos(...) + c
//   exponential        amplitude, decay, offset                  y = A exp(-x/tau) + c
//   two_lines          slope_a, intercept_a, slope_b, intercept_b
struct FitResult {
    FitKind kind = FitKind::sinusoid;
    std::vector<FitParameter> params;
    double residual_rms = 0;
    double seed_residual_rms = 0;
    bool success = false;
    std::string narrative;
    std::optional<double> intersection; // two_lines only
    double intersection_error = 0;

    double value(const std::string& name) const;
    double error(const std::string& name) const;
};

// Sinusoidal kinds expect uniformly spaced x. two_lines takes two series, the others one.
// Throws InsufficientData or FitDiverged.
FitResult fit_model(FitKind kind, const std::vector<inspection::Series>& data);

double oscillation_count(const FitResult& fit, double span);

std::vector<double> evaluate(const FitResult& fit, const std::vector<double>& x, int line = 0);

// Dominant non-zero frequency of uniformly sampled data (zero-padded FFT, parabolic refinement).
double dominant_frequency(const std::vector<double>& x, const std::vector<double>& y);

// |FFT| of mean-removed data on the positive frequency grid.
inspection::Series spectrum(const std::vector<double>& x, const std::vector<double>& y,
                            const std::string& label);

} // namespace kagents::lab
