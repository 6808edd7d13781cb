#pragma once

#include <map>
#include <string>

#include "kagents/inspection/figure.hpp"

namespace kagents::inspection {

// Numeric description of a figure, by kind. Pure function of the series and meta.
std::map<std::string, double> figure_features(const FigureArtifact& figure);

// "key: value" lines, sorted by key.
std::string feature_digest(const FigureArtifact& figure);

// Number of major components of a 2-D point cloud (Gaussian mixture, BIC over 1..4).
int count_clusters(const Series& points, double min_weight = 0.1);

// Robust noise level from first differences.
double noise_level(const std::vector<double>& y);

} // namespace kagents::inspection
