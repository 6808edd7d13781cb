#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace kagents::inspection {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool scatter = false; // points only, as opposed to a line
};

struct Raster {
    std::vector<std::uint8_t> bytes;
    std::string media_type = "image/png";
};

// A figure as data. `kind` selects the feature extraction used by the inspectors.
struct FigureArtifact {
    std::string figure_id;
    std::string kind;
    std::vector<Series> series;
    std::pair<std::string, std::string> axis_labels;
    std::string caption;
    std::optional<Raster> raster;
    nlohmann::json meta = nlohmann::json::object(); // sweep bounds and the like
};

// Throws std::invalid_argument when a series has mismatched lengths or non-finite samples.
void validate(const FigureArtifact& figure);

nlohmann::json to_json(const FigureArtifact& figure);

} // namespace kagents::inspection
