#include "kagents/inspection/figure.hpp"
#include "kagents/inspection/verdict.hpp"

#include <cmath>
#include <stdexcept>

namespace kagents::inspection {

void validate(const FigureArtifact& figure) {
    if (figure.figure_id.empty()) throw std::invalid_argument("figure has no id");
    for (const auto& s : figure.series) {
        if (s.x.size() != s.y.size())
            throw std::invalid_argument("series '" + s.label + "' of " + figure.figure_id + " has mismatched lengths");
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                throw std::invalid_argument("series '" + s.label + "' of " + figure.figure_id + " has non-finite samples");
    }
}

nlohmann::json to_json(const FigureArtifact& figure) {
    nlohmann::json series = nlohmann::json::array();
    for (const auto& s : figure.series) series.push_back({{"label", s.label}, {"x", s.x}, {"y", s.y}});
    return {{"figure_id", figure.figure_id}, {"kind", figure.kind}, {"series", series},
            {"axis_labels", {figure.axis_labels.first, figure.axis_labels.second}},
            {"caption", figure.caption}, {"meta", figure.meta}};
}

std::string to_string(Verdict v) {
    switch (v) {
    case Verdict::success: return "success";
    case Verdict::failure: return "failure";
    case Verdict::inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

Verdict verdict_from_string(const std::string& s) {
    if (s == "success") return Verdict::success;
    if (s == "failure") return Verdict::failure;
    if (s == "inconclusive") return Verdict::inconclusive;
    throw std::invalid_argument("unknown verdict '" + s + "'");
}

} // namespace kagents::inspection
