#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "kagents/inspection/figure.hpp"
#include "kagents/inspection/png.hpp"
#include "kagents/inspection/verdict.hpp"
#include "kagents/lab/record.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::inspection {

struct InspectionReport {
    std::string source; // "visual:<figure id>" or "text:<producer id>"
    Verdict verdict = Verdict::inconclusive;
    std::string narrative;
    std::map<std::string, double> suggested_updates;
};

struct SummaryReport {
    bool success = false;
    std::string analysis;
    std::map<std::string, double> parameter_updates;
    std::vector<InspectionReport> raw_reports;
};

nlohmann::json to_json(const InspectionReport& r);
nlohmann::json to_json(const SummaryReport& s);

// Splits the prompt at Image("path") tokens; each path loads from asset_dir (or as given, when absolute).
// Throws MissingImageFile.
std::vector<llm::Part> expand_image_refs(const std::string& prompt, const std::filesystem::path& asset_dir);

// Text report producers: fitting, proposal_report, procedure_report.
bool has_text_producer(const std::string& id);
// Throws ProducerError for unknown producers.
InspectionReport run_text_producer(const std::string& id, const lab::ExperimentRecord& record);

// "[report k] source=... verdict=..." blocks, read back by the rules backend.
std::string render_reports(const std::vector<InspectionReport>& reports);

struct VisualHookRef {
    std::string figure_id;
    std::string prompt;
};

class Inspector {
public:
    Inspector(llm::Gateway& gateway, std::filesystem::path asset_dir = {}, RenderOptions render = {});

    InspectionReport inspect_visual(const FigureArtifact& figure, const std::string& prompt);
    InspectionReport inspect_text(const std::string& producer_id, const lab::ExperimentRecord& record);
    // Throws std::invalid_argument on an empty report list, StructureError on a malformed reply.
    SummaryReport summarize(const std::vector<InspectionReport>& reports, const std::string& analysis_instructions);

    // A model's reading of a fit report, without the producer's own verdict.
    InspectionReport judge_report_text(const std::string& report);

    // All hooks of one record, visual first. A figure missing from the record yields an inconclusive report.
    std::vector<InspectionReport> inspect_record(const lab::ExperimentRecord& record,
                                                 const std::vector<VisualHookRef>& visual_hooks,
                                                 const std::vector<std::string>& text_hooks);

private:
    llm::Gateway& gateway_;
    std::filesystem::path asset_dir_;
    RenderOptions render_;
};

} // namespace kagents::inspection
