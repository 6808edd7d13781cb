#include "kagents/lab/synthetic.hpp"

#include <algorithm>
#include <cmath>

namespace kagents::lab {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> x;
    for (int i = 0; i < n; ++i) x.push_back(a + (b - a) * i / std::max(1, n - 1));
    return x;
}

} // namespace

inspection::Series resonator_trace(ResonatorParams p, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, p.noise_db);
    inspection::Series s{"magnitude", linspace(p.start, p.stop, p.points), {}, false};
    double hw = p.linewidth / 2;
    for (double f : s.x) {
        double l = hw * hw / ((f - p.center) * (f - p.center) + hw * hw);
        s.y.push_back(-20.0 - p.depth_db * l + n(rng));
    }
    return s;
}

inspection::Series peak_trace(PeakParams p, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, p.noise);
    inspection::Series s{"response", linspace(p.start, p.stop, p.points), {}, false};
    double hw = p.linewidth / 2;
    for (double f : s.x) s.y.push_back(p.height * hw * hw / ((f - p.center) * (f - p.center) + hw * hw) + n(rng));
    return s;
}

inspection::Series gmm_points(GmmParams p, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, p.sigma);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    inspection::Series s{"iq", {}, {}, true};
    for (int i = 0; i < p.points; ++i) {
        if (p.third_weight > 0 && u(rng) < p.third_weight) {
            s.x.push_back(n(rng));
            s.y.push_back(p.separation * p.sigma + n(rng));
            continue;
        }
        double c = (i % 2 == 0 ? -0.5 : 0.5) * p.separation * p.sigma;
        s.x.push_back(c + n(rng));
        s.y.push_back(n(rng));
    }
    return s;
}

inspection::Series rabi_trace(RabiTraceParams p, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, p.noise);
    inspection::Series s{"population", linspace(0.0, p.stop, p.points), {}, true};
    for (double t : s.x)
        s.y.push_back(0.5 - 0.5 * p.contrast * std::exp(-t / p.decay) * std::cos(2 * kPi * p.frequency * t) + n(rng));
    return s;
}

} // namespace kagents::lab
