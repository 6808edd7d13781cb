#include "kagents/inspection/inspector.hpp"

#include <fstream>
#include <iterator>
#include <regex>
#include <stdexcept>

#include "kagents/errors.hpp"
#include "kagents/inspection/features.hpp"
#include "kagents/prompts.hpp"
#include "kagents/text.hpp"

namespace kagents::inspection {

using nlohmann::json;

namespace {

std::string media_type_for(const std::filesystem::path& p) {
    std::string ext = text::to_lower(p.extension().string());
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".gif") return "image/gif";
    if (ext == ".webp") return "image/webp";
    return "image/png";
}

bool as_bool(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        std::string s = text::to_lower(text::trim(v.get<std::string>()));
        if (s == "true" || s == "yes") return true;
        if (s == "false" || s == "no") return false;
    }
    if (v.is_number()) return v.get<double>() != 0;
    throw StructureError("expected a boolean, got " + v.dump());
}

std::map<std::string, double> number_map(const json& v) {
    std::map<std::string, double> out;
    if (!v.is_object()) return out;
    for (const auto& [k, x] : v.items()) {
        if (x.is_number()) out[k] = x.get<double>();
        else if (x.is_string()) {
            try {
                std::size_t used = 0;
                double d = std::stod(x.get<std::string>(), &used);
                if (used == x.get<std::string>().size()) out[k] = d;
            } catch (const std::exception&) {
            }
        }
    }
    return out;
}

} // namespace

json to_json(const InspectionReport& r) {
    return {{"source", r.source},
            {"verdict", to_string(r.verdict)},
            {"narrative", r.narrative},
            {"suggested_updates", r.suggested_updates}};
}

json to_json(const SummaryReport& s) {
    json raw = json::array();
    for (const auto& r : s.raw_reports) raw.push_back(to_json(r));
    return {{"success", s.success},
            {"analysis", s.analysis},
            {"parameter_updates", s.parameter_updates},
            {"raw_reports", raw}};
}

std::vector<llm::Part> expand_image_refs(const std::string& prompt, const std::filesystem::path& asset_dir) {
    static const std::regex token(R"re(Image\(\s*"([^"]*)"\s*\))re");
    std::vector<llm::Part> parts;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), token); it != std::sregex_iterator(); ++it) {
        const auto& m = *it;
        auto pos = static_cast<std::size_t>(m.position(0));
        if (pos > last) parts.push_back(llm::TextPart{prompt.substr(last, pos - last)});
        std::filesystem::path p = m[1].str();
        if (p.is_relative() && !asset_dir.empty()) p = asset_dir / p;
        std::ifstream in(p, std::ios::binary);
        if (!in) throw MissingImageFile("image not found: " + p.string());
        llm::ImagePart img;
        img.bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        img.media_type = media_type_for(p);
        img.source = m[1].str();
        parts.push_back(std::move(img));
        last = pos + static_cast<std::size_t>(m.length(0));
    }
    if (last < prompt.size() || parts.empty()) parts.push_back(llm::TextPart{prompt.substr(last)});
    return parts;
}

bool has_text_producer(const std::string& id) {
    return id == "fitting" || id == "proposal_report" || id == "procedure_report";
}

InspectionReport run_text_producer(const std::string& id, const lab::ExperimentRecord& record) {
    if (!has_text_producer(id)) throw ProducerError("unknown report producer '" + id + "'");
    InspectionReport r;
    r.source = "text:" + id;
    r.verdict = record.analysis.verdict;
    r.narrative = record.analysis.text;
    if (id == "fitting" && record.fit && !record.fit->narrative.empty() &&
        record.analysis.text.find(record.fit->narrative) == std::string::npos)
        r.narrative += "\n" + record.fit->narrative;
    if (r.narrative.empty()) r.narrative = "No report text was produced.";
    r.suggested_updates = record.analysis.suggested_updates;
    return r;
}

std::string render_reports(const std::vector<InspectionReport>& reports) {
    std::string out;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out += "[report " + std::to_string(i + 1) + "] source=" + r.source + " verdict=" + to_string(r.verdict) + "\n";
        out += text::trim(r.narrative) + "\n";
        if (!r.suggested_updates.empty()) {
            std::vector<std::string> items;
            for (const auto& [k, v] : r.suggested_updates) items.push_back(k + "=" + text::format_number(v));
            out += "suggested: " + text::join(items, ", ") + "\n";
        }
    }
    return out;
}

Inspector::Inspector(llm::Gateway& gateway, std::filesystem::path asset_dir, RenderOptions render)
    : gateway_(gateway), asset_dir_(std::move(asset_dir)), render_(render) {}

InspectionReport Inspector::inspect_visual(const FigureArtifact& figure, const std::string& prompt) {
    validate(figure);
    std::string features = feature_digest(figure);
    std::vector<llm::Part> guidance;
    std::optional<llm::ImagePart> image;
    if (gateway_.accepts_images()) {
        if (!prompt.empty()) guidance = expand_image_refs(prompt, asset_dir_);
        llm::ImagePart img;
        img.source = figure.figure_id;
        if (figure.raster) {
            img.bytes = figure.raster->bytes;
            img.media_type = figure.raster->media_type;
        } else {
            img.bytes = render_png(figure, render_);
        }
        image = std::move(img);
    } else if (!prompt.empty()) {
        // Text-only backends still read the guidance; example images are dropped.
        static const std::regex token(R"re(Image\(\s*"[^"]*"\s*\))re");
        guidance.push_back(llm::TextPart{std::regex_replace(prompt, token, "[example image]")});
    }
    auto request = prompts::visual_inspection(figure.kind, features, guidance, image ? &*image : nullptr);
    json reply = gateway_.complete_structured(std::move(request), prompts::visual_inspection_keys());
    InspectionReport r;
    r.source = "visual:" + figure.figure_id;
    r.verdict = as_bool(reply["success"]) ? Verdict::success : Verdict::failure;
    r.narrative = reply["analysis"].is_string() ? reply["analysis"].get<std::string>() : reply["analysis"].dump();
    return r;
}

InspectionReport Inspector::inspect_text(const std::string& producer_id, const lab::ExperimentRecord& record) {
    return run_text_producer(producer_id, record);
}

SummaryReport Inspector::summarize(const std::vector<InspectionReport>& reports,
                                   const std::string& analysis_instructions) {
    if (reports.empty()) throw std::invalid_argument("summarize needs at least one report");
    json reply = gateway_.complete_structured(prompts::result_summary(analysis_instructions, render_reports(reports)),
                                              prompts::result_summary_keys());
    SummaryReport s;
    s.raw_reports = reports;
    s.success = as_bool(reply["success"]);
    s.analysis = reply["analysis"].is_string() ? reply["analysis"].get<std::string>() : reply["analysis"].dump();
    s.parameter_updates = number_map(reply["parameter_updates"]);
    bool any_failure = false;
    for (const auto& r : reports) any_failure = any_failure || r.verdict == Verdict::failure;
    if (s.success && any_failure) {
        s.success = false;
        s.analysis += " The reports disagree, so the experiment counts as failed.";
    }
    if (s.success) s.parameter_updates.clear();
    return s;
}

InspectionReport Inspector::judge_report_text(const std::string& report) {
    json reply = gateway_.complete_structured(prompts::report_judgement(report), prompts::report_judgement_keys());
    InspectionReport r;
    r.source = "text:judgement";
    r.verdict = as_bool(reply["success"]) ? Verdict::success : Verdict::failure;
    r.narrative = reply["analysis"].is_string() ? reply["analysis"].get<std::string>() : reply["analysis"].dump();
    return r;
}

std::vector<InspectionReport> Inspector::inspect_record(const lab::ExperimentRecord& record,
                                                        const std::vector<VisualHookRef>& visual_hooks,
                                                        const std::vector<std::string>& text_hooks) {
    std::vector<InspectionReport> out;
    for (const auto& h : visual_hooks) {
        const FigureArtifact* f = record.figure(h.figure_id);
        if (!f) {
            out.push_back({"visual:" + h.figure_id, Verdict::inconclusive,
                           "The experiment did not produce figure " + h.figure_id + ".", {}});
            continue;
        }
        out.push_back(inspect_visual(*f, h.prompt));
    }
    for (const auto& t : text_hooks) out.push_back(inspect_text(t, record));
    return out;
}

} // namespace kagents::inspection
