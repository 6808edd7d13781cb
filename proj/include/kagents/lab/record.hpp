#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/inspection/figure.hpp"
#include "kagents/inspection/verdict.hpp"
#include "kagents/lab/fit.hpp"

namespace kagents::lab {

// The experiment's own reading of its fit; text inspectors pass it on.
struct AnalysisSummary {
    std::string text;
    inspection::Verdict verdict = inspection::Verdict::inconclusive;
    std::map<std::string, double> suggested_updates;
};

struct ExperimentRecord {
    std::string experiment;
    nlohmann::json arguments = nlohmann::json::object();
    std::vector<inspection::Series> datasets;
    std::vector<inspection::FigureArtifact> figures;
    std::optional<FitResult> fit;
    AnalysisSummary analysis;
    nlohmann::json injected_variables = nlohmann::json::object();
    nlohmann::json extras = nlohmann::json::object();

    bool success() const { return analysis.verdict == inspection::Verdict::success; }
    const inspection::FigureArtifact* figure(const std::string& id) const;
};

// One CSV per dataset (x,y) in dir; returns the written paths.
std::vector<std::filesystem::path> export_csv(const ExperimentRecord& record, const std::filesystem::path& dir,
                                              const std::string& prefix);

} // namespace kagents::lab
