#include "kagents/procedure/procedure_doc.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "kagents/errors.hpp"
#include "kagents/text.hpp"

namespace kagents::procedure {

namespace {

enum class Section { none, background, steps, results };

std::string where(const std::string& source, std::size_t line) {
    return (source.empty() ? std::string("line ") : source + ":") + std::to_string(line);
}

std::string strip_blank_edges(const std::vector<std::string>& lines) {
    std::size_t b = 0;
    std::size_t e = lines.size();
    while (b < e && text::trim(lines[b]).empty()) ++b;
    while (e > b && text::trim(lines[e - 1]).empty()) --e;
    std::string out;
    for (std::size_t i = b; i < e; ++i) {
        if (i > b) out += "\n";
        out += lines[i];
    }
    return out;
}

} // namespace

ProcedureDoc parse(std::string_view input, std::string source_path) {
    ProcedureDoc doc;
    doc.source_path = source_path;
    bool have_title = false;
    Section section = Section::none;
    std::set<Section> seen;
    std::vector<std::string> background;
    std::vector<std::string> results;
    bool steps_seen = false;

    auto lines = text::split_lines(input);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        const std::string& line = lines[n];
        std::string t = text::trim(line);
        std::size_t lineno = n + 1;
        if (line.rfind("# ", 0) == 0) {
            if (have_title) throw DuplicateSection(where(source_path, lineno) + ": second title");
            doc.title = text::trim(line.substr(2));
            if (doc.title.empty()) throw MissingTitle(where(source_path, lineno) + ": empty title");
            have_title = true;
            continue;
        }
        if (line.rfind("## ", 0) == 0) {
            if (!have_title) throw MissingTitle(where(source_path, lineno) + ": section before the title");
            std::string name = text::to_lower(text::trim(line.substr(3)));
            Section s;
            if (name == "background") s = Section::background;
            else if (name == "steps") s = Section::steps;
            else if (name == "results") s = Section::results;
            else throw UnknownSection(where(source_path, lineno) + ": unknown section '" + text::trim(line.substr(3)) + "'");
            if (!seen.insert(s).second)
                throw DuplicateSection(where(source_path, lineno) + ": section '" + name + "' appears twice");
            section = s;
            if (s == Section::steps) steps_seen = true;
            continue;
        }
        if (t.empty()) {
            if (section == Section::background) background.push_back("");
            if (section == Section::results) results.push_back("");
            continue;
        }
        if (!have_title) throw MissingTitle(where(source_path, lineno) + ": text before the title");
        switch (section) {
        case Section::none:
            throw UnknownSection(where(source_path, lineno) + ": text outside any section");
        case Section::background: background.push_back(line); break;
        case Section::results: results.push_back(line); break;
        case Section::steps: {
            if (line.rfind("- ", 0) == 0 || line == "-") {
                doc.steps.push_back(line.size() > 2 ? text::trim(line.substr(2)) : "");
            } else if (t.rfind("- ", 0) == 0 || t.rfind("* ", 0) == 0 || t == "-") {
                throw MalformedStep(where(source_path, lineno) + ": nested lists are not supported");
            } else if (line.rfind("* ", 0) == 0 || (std::isdigit(static_cast<unsigned char>(t[0])) &&
                                                    t.find(". ") != std::string::npos &&
                                                    t.find(". ") < 4)) {
                throw MalformedStep(where(source_path, lineno) + ": steps must use '- ' items");
            } else if ((line[0] == ' ' || line[0] == '\t') && !doc.steps.empty()) {
                doc.steps.back() += " " + t;
            } else {
                throw MalformedStep(where(source_path, lineno) + ": text in Steps outside a list item");
            }
            break;
        }
        }
    }
    if (!have_title) throw MissingTitle(where(source_path, 1) + ": no title");
    if (!steps_seen) throw MissingSteps(where(source_path, lines.size()) + ": no Steps section");
    if (doc.steps.empty()) throw MissingSteps(where(source_path, lines.size()) + ": Steps section is empty");
    if (seen.count(Section::background)) doc.background = strip_blank_edges(background);
    if (seen.count(Section::results)) doc.results = strip_blank_edges(results);
    return doc;
}

ProcedureDoc load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw NotFound("cannot open procedure file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

ValidationResult validate(const ProcedureDoc& doc) {
    ValidationResult r;
    if (text::trim(doc.title).empty()) r.errors.push_back("title is empty");
    if (doc.steps.empty()) r.errors.push_back("no steps");
    for (std::size_t i = 0; i < doc.steps.size(); ++i)
        if (text::trim(doc.steps[i]).empty()) r.errors.push_back("step " + std::to_string(i + 1) + " is empty");
    if (!doc.results) r.notes.push_back("no Results section; the final report will be generic");
    if (!doc.background) r.notes.push_back("no Background section");
    return r;
}

std::string render(const ProcedureDoc& doc) {
    std::string out = "# " + doc.title + "\n";
    if (doc.background) out += "\n## Background\n\n" + *doc.background + "\n";
    out += "\n## Steps\n\n";
    for (const auto& s : doc.steps) out += "- " + s + "\n";
    if (doc.results) out += "\n## Results\n\n" + *doc.results + "\n";
    return out;
}

} // namespace kagents::procedure
