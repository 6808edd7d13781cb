#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kagents::procedure {

struct ProcedureDoc {
    std::string title;
    std::optional<std::string> background;
    std::vector<std::string> steps;
    std::optional<std::string> results;
    std::string source_path;

    bool operator==(const ProcedureDoc& other) const {
        return title == other.title && background == other.background && steps == other.steps &&
               results == other.results;
    }
};

struct ValidationResult {
    std::vector<std::string> errors;
    std::vector<std::string> notes;
    bool ok() const { return errors.empty(); }
};

// Markdown subset: one "# " title, "## Background|Steps|Results" sections, flat "- " lists.
ProcedureDoc parse(std::string_view text, std::string source_path = "");
ProcedureDoc load(const std::string& path);

ValidationResult validate(const ProcedureDoc& doc);

std::string render(const ProcedureDoc& doc);

} // namespace kagents::procedure
