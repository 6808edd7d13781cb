#include "kagents/inspection/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "kagents/errors.hpp"
#include "kagents/lab/fit.hpp"
#include "kagents/text.hpp"

namespace kagents::inspection {

namespace {

using lab::FitKind;

double median(std::vector<double> v) {
    if (v.empty()) return 0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<const Series*> data_series(const FigureArtifact& f) {
    std::vector<const Series*> out;
    for (const auto& s : f.series)
        if (s.scatter) out.push_back(&s);
    if (out.empty() && !f.series.empty()) out.push_back(&f.series.front());
    return out;
}

void oscillation_features(const FigureArtifact& f, FitKind kind, std::map<std::string, double>& out) {
    double converged = 1, amplitude = 1e300, oscillations = 1e300, residual = 0;
    auto data = data_series(f);
    if (data.empty()) {
        out["fit_converged"] = 0;
        return;
    }
    for (const Series* s : data) {
        try {
            auto fit = lab::fit_model(kind, {*s});
            double span = s->x.back() - s->x.front();
            converged = std::min(converged, fit.success ? 1.0 : 0.0);
            amplitude = std::min(amplitude, 2 * std::abs(fit.value("amplitude")));
            oscillations = std::min(oscillations, lab::oscillation_count(fit, span));
            residual = std::max(residual, fit.residual_rms);
        } catch (const LabError&) {
            converged = 0;
            amplitude = 0;
            oscillations = 0;
        }
    }
    out["fit_converged"] = converged;
    out["amplitude"] = amplitude;
    out["oscillations"] = oscillations;
    out["residual"] = residual;
}

double peak_ratio(const Series& s) {
    if (s.y.size() < 3) return 0;
    double peak = *std::max_element(s.y.begin(), s.y.end());
    double med = median(s.y);
    return med > 0 ? peak / med : (peak > 0 ? 1e6 : 0);
}

void decay_features(const FigureArtifact& f, std::map<std::string, double>& out) {
    auto data = data_series(f);
    out["fit_converged"] = 0;
    out["decay_contrast"] = 0;
    if (data.empty()) return;
    try {
        auto fit = lab::fit_model(FitKind::exponential, {*data.front()});
        auto ends = lab::evaluate(fit, {data.front()->x.front(), data.front()->x.back()});
        out["fit_converged"] = fit.success ? 1 : 0;
        out["decay_contrast"] = std::abs(ends[0] - ends[1]);
        out["decay"] = fit.value("decay");
    } catch (const LabError&) {
    }
}

void drag_features(const FigureArtifact& f, std::map<std::string, double>& out) {
    auto data = data_series(f);
    out["intersection_position"] = -1;
    out["slope_separation"] = 0;
    out["residual_ratio"] = 1e3;
    if (data.size() < 2) return;
    try {
        auto fit = lab::fit_model(FitKind::two_lines, {*data[0], *data[1]});
        double start = data[0]->x.front(), stop = data[0]->x.back();
        if (f.meta.contains("start") && f.meta.contains("stop")) {
            start = f.meta["start"].get<double>();
            stop = f.meta["stop"].get<double>();
        }
        double span = stop - start;
        double ma = fit.value("slope_a"), mb = fit.value("slope_b");
        double sep_err = std::hypot(fit.error("slope_a"), fit.error("slope_b"));
        out["slope_separation"] = sep_err > 0 ? std::abs(ma - mb) / sep_err : 1e6;
        double swing = std::max(std::abs(ma), std::abs(mb)) * std::abs(span);
        out["residual_ratio"] = swing > 0 ? fit.residual_rms / swing : 1e3;
        if (fit.intersection && span != 0) out["intersection_position"] = (*fit.intersection - start) / span;
    } catch (const LabError&) {
    }
}

} // namespace

double noise_level(const std::vector<double>& y) {
    if (y.size() < 3) return 0;
    std::vector<double> d;
    for (std::size_t i = 1; i < y.size(); ++i) d.push_back(y[i] - y[i - 1]);
    double m = median(d);
    for (double& v : d) v = std::abs(v - m);
    return median(d) / 0.6745 / std::sqrt(2.0);
}

int count_clusters(const Series& points, double min_weight) {
    const std::size_t n = points.x.size();
    if (n < 8) return static_cast<int>(n > 0);
    Eigen::MatrixXd X(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) {
        X(static_cast<Eigen::Index>(i), 0) = points.x[i];
        X(static_cast<Eigen::Index>(i), 1) = points.y[i];
    }
    const double kTwoPi = 6.283185307179586;
    double best_bic = 1e300;
    int best_major = 1;
    for (int k = 1; k <= 4; ++k) {
        // farthest-point initialisation keeps the result deterministic
        std::vector<Eigen::Vector2d> mu;
        Eigen::Vector2d mean = X.colwise().mean();
        Eigen::Index far = 0;
        (X.rowwise() - mean.transpose()).rowwise().squaredNorm().maxCoeff(&far);
        mu.push_back(X.row(far));
        while (static_cast<int>(mu.size()) < k) {
            Eigen::VectorXd dist(static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
                double m = 1e300;
                for (const auto& c : mu) m = std::min(m, (X.row(i).transpose() - c).squaredNorm());
                dist(i) = m;
            }
            dist.maxCoeff(&far);
            mu.push_back(X.row(far));
        }
        Eigen::Matrix2d cov0 = ((X.rowwise() - mean.transpose()).transpose() * (X.rowwise() - mean.transpose())) /
                               static_cast<double>(n);
        cov0 += Eigen::Matrix2d::Identity() * 1e-9;
        std::vector<Eigen::Matrix2d> cov(static_cast<std::size_t>(k), cov0 / (k * k));
        std::vector<double> w(static_cast<std::size_t>(k), 1.0 / k);
        Eigen::MatrixXd r(static_cast<Eigen::Index>(n), k);
        double loglik = 0;
        for (int iter = 0; iter < 200; ++iter) {
            double prev = loglik;
            loglik = 0;
            for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
                double total = 0;
                for (int c = 0; c < k; ++c) {
                    const auto& S = cov[static_cast<std::size_t>(c)];
                    Eigen::Vector2d d = X.row(i).transpose() - mu[static_cast<std::size_t>(c)];
                    double det = std::max(S.determinant(), 1e-300);
                    double p = w[static_cast<std::size_t>(c)] * std::exp(-0.5 * d.dot(S.inverse() * d)) /
                               (kTwoPi * std::sqrt(det));
                    r(i, c) = p;
                    total += p;
                }
                total = std::max(total, 1e-300);
                r.row(i) /= total;
                loglik += std::log(total);
            }
            for (int c = 0; c < k; ++c) {
                double nk = std::max(r.col(c).sum(), 1e-12);
                w[static_cast<std::size_t>(c)] = nk / static_cast<double>(n);
                Eigen::Vector2d m = (X.transpose() * r.col(c)) / nk;
                mu[static_cast<std::size_t>(c)] = m;
                Eigen::MatrixXd D = X.rowwise() - m.transpose();
                Eigen::Matrix2d S = (D.transpose() * r.col(c).asDiagonal() * D) / nk;
                cov[static_cast<std::size_t>(c)] = S + Eigen::Matrix2d::Identity() * 1e-6 * cov0.trace();
            }
            if (iter > 0 && std::abs(loglik - prev) < 1e-8 * std::abs(loglik)) break;
        }
        double params = 6.0 * k - 1.0;
        double bic = -2 * loglik + params * std::log(static_cast<double>(n));
        if (bic < best_bic - 1e-9) {
            best_bic = bic;
            best_major = 0;
            for (double wc : w)
                if (wc >= min_weight) ++best_major;
        }
    }
    return best_major;
}

std::map<std::string, double> figure_features(const FigureArtifact& f) {
    std::map<std::string, double> out;
    const std::string& k = f.kind;
    if (k == "ramsey") {
        oscillation_features(f, FitKind::decaying_sinusoid, out);
    } else if (k == "rabi" || k == "power-rabi" || k == "stark-oscillation") {
        oscillation_features(f, FitKind::sinusoid, out);
    } else if (k == "rabi-fourier" || k == "stark-fourier") {
        double ratio = 1e300;
        for (const auto& s : f.series) ratio = std::min(ratio, peak_ratio(s));
        out["peak_ratio"] = f.series.empty() ? 0 : ratio;
    } else if (k == "drag") {
        drag_features(f, out);
    } else if (k == "pingpong") {
        const auto& y = f.series.empty() ? std::vector<double>{} : f.series.front().y;
        out["final_change"] = y.size() >= 2 && y.back() != 0 ? std::abs(y.back() - y[y.size() - 2]) / std::abs(y.back()) : 1;
    } else if (k == "rb" || k == "t1" || k == "echo") {
        decay_features(f, out);
    } else if (k == "gmm") {
        out["clusters"] = f.series.empty() ? 0 : count_clusters(f.series.front());
    } else if (k == "resonator" || k == "qubit-spectroscopy") {
        const auto& y = f.series.empty() ? std::vector<double>{} : f.series.front().y;
        double sigma = std::max(noise_level(y), 1e-12);
        double med = median(y);
        if (k == "resonator") out["dip_depth"] = y.empty() ? 0 : (med - *std::min_element(y.begin(), y.end())) / sigma;
        else out["peak_height"] = y.empty() ? 0 : (*std::max_element(y.begin(), y.end()) - med) / sigma;
    } else if (k == "stark-control") {
        const auto& y = f.series.empty() ? std::vector<double>{} : f.series.front().y;
        if (!y.empty()) {
            std::size_t n = std::min<std::size_t>(5, y.size());
            out["mean"] = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
            double head = std::accumulate(y.begin(), y.begin() + static_cast<long>(n), 0.0) / static_cast<double>(n);
            double tail = std::accumulate(y.end() - static_cast<long>(n), y.end(), 0.0) / static_cast<double>(n);
            out["drift"] = head - tail;
        }
    }
    out["points"] = f.series.empty() ? 0 : static_cast<double>(f.series.front().x.size());
    return out;
}

std::string feature_digest(const FigureArtifact& f) {
    std::string s;
    for (const auto& [key, value] : figure_features(f)) s += key + ": " + text::format_number(value) + "\n";
    return s;
}

} // namespace kagents::inspection
