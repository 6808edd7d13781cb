#include "kagents/lab/fit.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::lab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

using Eigen::MatrixXd;
using Eigen::VectorXd;

using ModelFn = std::function<double(const VectorXd&, double)>;
using GradFn = std::function<void(const VectorXd&, double, double*)>;

struct Model {
    ModelFn f;
    GradFn grad;
    std::vector<std::string> names;
};

Model sinusoid_model() {
    return {[](const VectorXd& p, double x) { return p[0] * std::cos(kTwoPi * p[1] * x + p[2]) + p[3]; },
            [](const VectorXd& p, double x, double* g) {
                double arg = kTwoPi * p[1] * x + p[2];
                double c = std::cos(arg);
                double s = std::sin(arg);
                g[0] = c;
                g[1] = -p[0] * s * kTwoPi * x;
                g[2] = -p[0] * s;
                g[3] = 1.0;
            },
            {"amplitude", "frequency", "phase", "offset"}};
}

Model decaying_model() {
    return {[](const VectorXd& p, double x) {
                return p[0] * std::exp(-x / p[4]) * std::cos(kTwoPi * p[1] * x + p[2]) + p[3];
            },
            [](const VectorXd& p, double x, double* g) {
                double e = std::exp(-x / p[4]);
                double arg = kTwoPi * p[1] * x + p[2];
                double c = std::cos(arg);
                double s = std::sin(arg);
                g[0] = e * c;
                g[1] = -p[0] * e * s * kTwoPi * x;
                g[2] = -p[0] * e * s;
                g[3] = 1.0;
                g[4] = p[0] * c * e * x / (p[4] * p[4]);
            },
            {"amplitude", "frequency", "phase", "offset", "decay"}};
}

Model exponential_model() {
    return {[](const VectorXd& p, double x) { return p[0] * std::exp(-x / p[1]) + p[2]; },
            [](const VectorXd& p, double x, double* g) {
                double e = std::exp(-x / p[1]);
                g[0] = e;
                g[1] = p[0] * e * x / (p[1] * p[1]);
                g[2] = 1.0;
            },
            {"amplitude", "decay", "offset"}};
}

struct LmFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = VectorXd;
    using ValueType = VectorXd;
    using JacobianType = MatrixXd;

    const Model* model;
    const std::vector<double>* x;
    const std::vector<double>* y;

    int inputs() const { return static_cast<int>(model->names.size()); }
    int values() const { return static_cast<int>(x->size()); }

    int operator()(const VectorXd& p, VectorXd& fvec) const {
        for (int i = 0; i < values(); ++i) fvec[i] = model->f(p, (*x)[i]) - (*y)[i];
        return 0;
    }
    int df(const VectorXd& p, MatrixXd& jac) const {
        std::vector<double> g(static_cast<std::size_t>(inputs()));
        for (int i = 0; i < values(); ++i) {
            model->grad(p, (*x)[i], g.data());
            for (int j = 0; j < inputs(); ++j) jac(i, j) = g[static_cast<std::size_t>(j)];
        }
        return 0;
    }
};

double rms_of(const Model& m, const VectorXd& p, const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = m.f(p, x[i]) - y[i];
        s += r * r;
    }
    return std::sqrt(s / static_cast<double>(x.size()));
}

bool all_finite(const VectorXd& p) {
    for (int i = 0; i < p.size(); ++i)
        if (!std::isfinite(p[i])) return false;
    return true;
}

VectorXd lm_minimize(const Model& m, VectorXd p, const std::vector<double>& x, const std::vector<double>& y) {
    LmFunctor functor{&m, &x, &y};
    Eigen::LevenbergMarquardt<LmFunctor> lm(functor);
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.parameters.maxfev = 4000;
    lm.minimize(p);
    return p;
}

std::vector<double> uncertainties(const Model& m, const VectorXd& p, const std::vector<double>& x,
                                  const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    const int k = static_cast<int>(p.size());
    MatrixXd J(n, k);
    std::vector<double> g(static_cast<std::size_t>(k));
    double ssr = 0;
    for (int i = 0; i < n; ++i) {
        m.grad(p, x[static_cast<std::size_t>(i)], g.data());
        for (int j = 0; j < k; ++j) J(i, j) = g[static_cast<std::size_t>(j)];
        double r = m.f(p, x[static_cast<std::size_t>(i)]) - y[static_cast<std::size_t>(i)];
        ssr += r * r;
    }
    double s2 = ssr / std::max(1, n - k);
    MatrixXd cov = (J.transpose() * J).completeOrthogonalDecomposition().pseudoInverse() * s2;
    std::vector<double> err(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) err[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j)));
    return err;
}

double wrap_phase(double phi) {
    phi = std::fmod(phi + kPi, kTwoPi);
    if (phi < 0) phi += kTwoPi;
    return phi - kPi;
}

// Linear least squares for y ~ sum_j coef_j * basis_j(x).
VectorXd linear_fit(const std::vector<std::function<double(double)>>& basis, const std::vector<double>& x,
                    const std::vector<double>& y) {
    MatrixXd A(static_cast<int>(x.size()), static_cast<int>(basis.size()));
    VectorXd b(static_cast<int>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) A(static_cast<int>(i), static_cast<int>(j)) = basis[j](x[i]);
        b[static_cast<int>(i)] = y[i];
    }
    return A.colPivHouseholderQr().solve(b);
}

VectorXd sinusoid_seed(const std::vector<double>& x, const std::vector<double>& y, double f, double tau) {
    auto env = [tau](double t) { return tau > 0 ? std::exp(-t / tau) : 1.0; };
    VectorXd c = linear_fit({[](double) { return 1.0; },
                             [&](double t) { return env(t) * std::cos(kTwoPi * f * t); },
                             [&](double t) { return env(t) * std::sin(kTwoPi * f * t); }},
                            x, y);
    double amp = std::hypot(c[1], c[2]);
    double phi = std::atan2(-c[2], c[1]);
    if (tau > 0) {
        VectorXd p(5);
        p << amp, f, phi, c[0], tau;
        return p;
    }
    VectorXd p(4);
    p << amp, f, phi, c[0];
    return p;
}

void require_points(const std::vector<double>& x, std::size_t needed, const char* what) {
    if (x.size() < needed)
        throw InsufficientData(std::string(what) + " fit needs at least " + std::to_string(needed) +
                               " points, got " + std::to_string(x.size()));
}

void check_series(const inspection::Series& s) {
    if (s.x.size() != s.y.size()) throw InsufficientData("series '" + s.label + "' has mismatched lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i)
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
            throw InsufficientData("series '" + s.label + "' has non-finite samples");
}

FitResult finish(FitKind kind, const Model& m, const VectorXd& p, const std::vector<double>& x,
                 const std::vector<double>& y, double seed_rms) {
    if (!all_finite(p)) throw FitDiverged(to_string(kind) + " fit produced non-finite parameters");
    FitResult r;
    r.kind = kind;
    r.residual_rms = rms_of(m, p, x, y);
    r.seed_residual_rms = seed_rms;
    if (!std::isfinite(r.residual_rms)) throw FitDiverged(to_string(kind) + " fit produced a non-finite residual");
    auto err = uncertainties(m, p, x, y);
    for (std::size_t j = 0; j < m.names.size(); ++j)
        r.params.push_back({m.names[j], p[static_cast<int>(j)], err[j]});
    return r;
}

} // namespace

std::string to_string(FitKind kind) {
    switch (kind) {
    case FitKind::sinusoid: return "sinusoid";
    case FitKind::decaying_sinusoid: return "decaying_sinusoid";
    case FitKind::exponential: return "exponential";
    case FitKind::two_lines: return "two_lines";
    }
    return "sinusoid";
}

double FitResult::value(const std::string& name) const {
    for (const auto& p : params)
        if (p.name == name) return p.value;
    throw NotFound("fit has no parameter '" + name + "'");
}

double FitResult::error(const std::string& name) const {
    for (const auto& p : params)
        if (p.name == name) return p.uncertainty;
    throw NotFound("fit has no parameter '" + name + "'");
}

inspection::Series spectrum(const std::vector<double>& x, const std::vector<double>& y, const std::string& label) {
    inspection::Series s;
    s.label = label;
    if (x.size() < 2) return s;
    const std::size_t n = x.size();
    double dx = (x.back() - x.front()) / static_cast<double>(n - 1);
    double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    std::vector<double> in(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = y[i] - mean;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    for (std::size_t k = 1; k < n / 2 + 1 && k < out.size(); ++k) {
        s.x.push_back(static_cast<double>(k) / (static_cast<double>(n) * dx));
        s.y.push_back(std::abs(out[k]) / static_cast<double>(n));
    }
    return s;
}

double dominant_frequency(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 4) throw InsufficientData("frequency estimate needs at least 4 points");
    double dx = (x.back() - x.front()) / static_cast<double>(n - 1);
    if (!(dx > 0)) throw InsufficientData("x must be increasing");
    std::size_t m = 1;
    while (m < n) m <<= 1;
    m = std::min<std::size_t>(m * 16, 1u << 17);
    double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    std::vector<double> in(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) in[i] = y[i] - mean;
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> out;
    fft.fwd(out, in);
    std::vector<double> mag(m / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(out[k]);
    // Skip the leakage lobe of the removed mean.
    std::size_t start = std::max<std::size_t>(1, m / n / 2);
    std::size_t best = start;
    for (std::size_t k = start; k + 1 < mag.size(); ++k)
        if (mag[k] > mag[best]) best = k;
    double delta = 0;
    if (best > 0 && best + 1 < mag.size()) {
        double a = mag[best - 1], b = mag[best], c = mag[best + 1];
        double den = a - 2 * b + c;
        if (std::abs(den) > 1e-300) delta = 0.5 * (a - c) / den;
    }
    return (static_cast<double>(best) + delta) / (static_cast<double>(m) * dx);
}

FitResult fit_model(FitKind kind, const std::vector<inspection::Series>& data) {
    if (data.empty()) throw InsufficientData("no data series given");
    for (const auto& s : data) check_series(s);

    if (kind == FitKind::two_lines) {
        if (data.size() < 2) throw InsufficientData("two_lines fit needs two series");
        FitResult r;
        r.kind = kind;
        double m[2], b[2], sm[2], ssr_total = 0;
        std::size_t n_total = 0;
        for (int k = 0; k < 2; ++k) {
            const auto& s = data[static_cast<std::size_t>(k)];
            require_points(s.x, 3, "two_lines");
            VectorXd c = linear_fit({[](double) { return 1.0; }, [](double t) { return t; }}, s.x, s.y);
            b[k] = c[0];
            m[k] = c[1];
            double ssr = 0, mx = 0, sxx = 0;
            for (double t : s.x) mx += t;
            mx /= static_cast<double>(s.x.size());
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                double res = b[k] + m[k] * s.x[i] - s.y[i];
                ssr += res * res;
                sxx += (s.x[i] - mx) * (s.x[i] - mx);
            }
            ssr_total += ssr;
            n_total += s.x.size();
            double s2 = ssr / std::max<double>(1.0, static_cast<double>(s.x.size()) - 2);
            sm[k] = sxx > 0 ? std::sqrt(s2 / sxx) : std::numeric_limits<double>::infinity();
            r.params.push_back({k == 0 ? "slope_a" : "slope_b", m[k], sm[k]});
            r.params.push_back({k == 0 ? "intercept_a" : "intercept_b", b[k],
                                std::sqrt(s2 * (1.0 / static_cast<double>(s.x.size()) + (sxx > 0 ? mx * mx / sxx : 0)))});
        }
        if (!std::isfinite(m[0]) || !std::isfinite(m[1])) throw FitDiverged("two_lines fit is singular");
        r.residual_rms = std::sqrt(ssr_total / static_cast<double>(n_total));
        r.seed_residual_rms = r.residual_rms;
        double dm = m[0] - m[1];
        double sdm = std::hypot(sm[0], sm[1]);
        bool separated = std::abs(dm) > 1e-12 * (1 + std::abs(m[0]) + std::abs(m[1])) && std::abs(dm) > 3 * sdm;
        if (separated) {
            double xi = (b[1] - b[0]) / dm;
            r.intersection = xi;
            r.intersection_error = std::abs(dm) > 0 ? sdm / std::abs(dm) * std::abs(xi) : 0;
            r.success = true;
            r.narrative = "Lines cross at " + text::format_number(xi) + ".";
        } else {
            r.success = false;
            r.narrative = "The two lines are parallel within the uncertainty; no crossing point.";
        }
        return r;
    }

    const auto& s = data.front();
    const auto& x = s.x;
    const auto& y = s.y;
    double span = x.empty() ? 0 : x.back() - x.front();
    double ymean = y.empty() ? 0 : std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    double scale = 1.0 + std::abs(ymean);

    if (kind == FitKind::exponential) {
        require_points(x, 6, "exponential");
        Model model = exponential_model();
        // Ratio of successive differences gives the per-step decay for uniform spacing.
        double num = 0, den = 0;
        for (std::size_t i = 0; i + 2 < y.size(); ++i) {
            double d0 = y[i + 1] - y[i];
            double d1 = y[i + 2] - y[i + 1];
            num += d1 * d0;
            den += d0 * d0;
        }
        double dx = span / static_cast<double>(x.size() - 1);
        double ratio = den > 0 ? num / den : 0.5;
        double tau = (ratio > 0 && ratio < 1) ? -dx / std::log(ratio) : span / 2;
        if (!(tau > 0) || !std::isfinite(tau)) tau = span / 2;
        VectorXd c = linear_fit({[tau](double t) { return std::exp(-t / tau); }, [](double) { return 1.0; }}, x, y);
        VectorXd p(3);
        p << c[0], tau, c[1];
        double seed_rms = rms_of(model, p, x, y);
        VectorXd q = lm_minimize(model, p, x, y);
        if (!all_finite(q) || rms_of(model, q, x, y) > seed_rms) q = p;
        FitResult r = finish(kind, model, q, x, y, seed_rms);
        double amp = std::abs(r.value("amplitude"));
        r.success = r.value("decay") > 0 && amp > std::max(2 * r.residual_rms, 1e-9 * scale);
        r.narrative = r.success ? "Exponential decay with time constant " + text::format_number(r.value("decay")) + "."
                                : "No exponential decay could be resolved.";
        return r;
    }

    bool decaying = kind == FitKind::decaying_sinusoid;
    require_points(x, decaying ? 10 : 8, decaying ? "decaying_sinusoid" : "sinusoid");
    if (!(span > 0)) throw InsufficientData("x must be increasing");
    Model model = decaying ? decaying_model() : sinusoid_model();
    double f0 = dominant_frequency(x, y);
    VectorXd best_seed;
    double best_rms = std::numeric_limits<double>::infinity();
    std::vector<double> taus = decaying ? std::vector<double>{span / 4, span, 4 * span} : std::vector<double>{0};
    for (double tau : taus) {
        VectorXd p = sinusoid_seed(x, y, f0, tau);
        double r = rms_of(model, p, x, y);
        if (r < best_rms) {
            best_rms = r;
            best_seed = p;
        }
    }
    VectorXd q = lm_minimize(model, best_seed, x, y);
    if (!all_finite(q) || rms_of(model, q, x, y) > best_rms) q = best_seed;
    // Canonical signs: positive amplitude and frequency, phase in (-pi, pi].
    if (q[1] < 0) {
        q[1] = -q[1];
        q[2] = -q[2];
    }
    if (q[0] < 0) {
        q[0] = -q[0];
        q[2] += kPi;
    }
    q[2] = wrap_phase(q[2]);
    FitResult r = finish(kind, model, q, x, y, best_rms);
    double nyquist = 0.5 * static_cast<double>(x.size() - 1) / span;
    double amp = r.value("amplitude");
    double f = r.value("frequency");
    r.success = amp > std::max(2 * r.residual_rms, 1e-9 * scale) && f > 0 && f <= 1.01 * nyquist &&
                (!decaying || r.value("decay") > 0);
    r.narrative = r.success ? "Oscillation at " + text::format_number(f) + " with amplitude " +
                                  text::format_number(amp) + "."
                            : "No oscillation could be resolved above the noise.";
    return r;
}

double oscillation_count(const FitResult& fit, double span) { return fit.value("frequency") * span; }

std::vector<double> evaluate(const FitResult& fit, const std::vector<double>& x, int line) {
    std::vector<double> out;
    out.reserve(x.size());
    for (double t : x) {
        switch (fit.kind) {
        case FitKind::sinusoid:
            out.push_back(fit.value("amplitude") * std::cos(kTwoPi * fit.value("frequency") * t + fit.value("phase")) +
                          fit.value("offset"));
            break;
        case FitKind::decaying_sinusoid:
            out.push_back(fit.value("amplitude") * std::exp(-t / fit.value("decay")) *
                              std::cos(kTwoPi * fit.value("frequency") * t + fit.value("phase")) +
                          fit.value("offset"));
            break;
        case FitKind::exponential:
            out.push_back(fit.value("amplitude") * std::exp(-t / fit.value("decay")) + fit.value("offset"));
            break;
        case FitKind::two_lines:
            out.push_back(line == 0 ? fit.value("slope_a") * t + fit.value("intercept_a")
                                    : fit.value("slope_b") * t + fit.value("intercept_b"));
            break;
        }
    }
    return out;
}

} // namespace kagents::lab
