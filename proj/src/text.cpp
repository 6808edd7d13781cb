#include "kagents/text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>

namespace kagents::text {

namespace {

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words = {
        "a", "an", "the", "do", "does", "run", "conduct", "perform", "execute", "carry", "out",
        "implement", "please", "experiment", "experiments", "qubit", "qubits", "single", "on",
        "with", "of", "for", "to", "in", "and", "by", "using", "use", "then", "this", "that",
        "it", "is", "are", "at", "from", "as", "be", "its", "which", "measure", "apply", "via",
        "start", "initiate", "launch", "trigger", "procedure", "following", "given", "device",
        "all", "me", "can", "you", "we", "should", "now", "let", "lets", "s", "test", "check",
        "our", "my", "one", "some", "into", "under", "over", "get", "set", "up", "type",
        "based", "obtain", "find", "determine", "estimate", "evaluate", "assess", "analyze",
        "analyse", "characterize", "characterise", "routine", "protocol", "sequence", "task",
    };
    return words;
}

const std::set<std::string>& generic_class_words() {
    static const std::set<std::string> words = {
        "simple", "multilevel", "multi", "level", "single", "qubit", "calibration", "normalised",
        "normalized", "amp", "experiment",
    };
    return words;
}

bool is_number_word(const std::string& w) {
    return !w.empty() && std::isdigit(static_cast<unsigned char>(w[0]));
}

std::string normalise_phrases(std::string_view input) {
    std::string s = to_lower(input);
    s = replace_all(s, "ping-pong", "pingpong");
    s = replace_all(s, "ping pong", "pingpong");
    s = replace_all(s, "randomised", "randomized");
    s = replace_all(s, "multi-level", "multilevel");
    return s;
}

std::string strip_backticked(std::string_view s) {
    std::string out;
    bool inside = false;
    for (char c : s) {
        if (c == '`') {
            inside = !inside;
            out.push_back(' ');
        } else if (!inside) {
            out.push_back(c);
        }
    }
    return out;
}

} // namespace

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : s) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) {
        if (current.back() == '\r') current.pop_back();
        lines.push_back(std::move(current));
    }
    return lines;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::string current;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    parts.push_back(std::move(current));
    return parts;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (prefix.size() > s.size()) return false;
    return to_lower(s.substr(0, prefix.size())) == to_lower(prefix);
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
    return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    if (from.empty()) return s;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::vector<std::string> split_camel_case(std::string_view name) {
    std::vector<std::string> parts;
    std::string current;
    auto upper = [](char c) { return std::isupper(static_cast<unsigned char>(c)) != 0; };
    auto lower = [](char c) { return std::islower(static_cast<unsigned char>(c)) != 0; };
    for (std::size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (!std::isalnum(static_cast<unsigned char>(c))) {
            if (!current.empty()) parts.push_back(std::move(current));
            current.clear();
            continue;
        }
        bool boundary = false;
        if (!current.empty() && upper(c)) {
            char prev = current.back();
            if (lower(prev) || std::isdigit(static_cast<unsigned char>(prev))) boundary = true;
            // "GHZState": the S starts a new word when followed by lowercase.
            if (upper(prev) && i + 1 < name.size() && lower(name[i + 1])) boundary = true;
        }
        if (boundary) {
            parts.push_back(std::move(current));
            current.clear();
        }
        current.push_back(c);
    }
    if (!current.empty()) parts.push_back(std::move(current));
    return parts;
}

std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string current;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::string stem(std::string_view word) {
    std::string w = to_lower(word);
    auto ends = [&](std::string_view suffix) {
        return w.size() >= suffix.size() && w.compare(w.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (w.size() > 4 && ends("ies")) {
        w.replace(w.size() - 3, 3, "y");
    } else if (ends("sses")) {
        w.resize(w.size() - 2);
    } else if (w.size() > 3 && ends("s") && !ends("ss") && !ends("us")) {
        w.pop_back();
    }
    if (w.size() > 7 && ends("ational")) {
        w.replace(w.size() - 7, 7, "ate");
    } else if (w.size() > 6 && ends("ation")) {
        w.replace(w.size() - 5, 5, "ate");
    } else if (w.size() > 5 && ends("ing")) {
        w.resize(w.size() - 3);
    } else if (w.size() > 4 && ends("ed")) {
        w.resize(w.size() - 2);
    } else if (w.size() > 4 && ends("ly")) {
        w.resize(w.size() - 2);
    }
    if (w.size() > 3 && ends("e")) w.pop_back();
    return w;
}

std::vector<std::string> backticked_names(std::string_view s) {
    std::vector<std::string> names;
    std::size_t pos = 0;
    while (true) {
        std::size_t open = s.find('`', pos);
        if (open == std::string_view::npos) break;
        std::size_t close = s.find('`', open + 1);
        if (close == std::string_view::npos) break;
        std::string name = trim(s.substr(open + 1, close - open - 1));
        if (!name.empty()) names.push_back(name);
        pos = close + 1;
    }
    return names;
}

std::set<std::string> content_terms(std::string_view s) {
    std::set<std::string> terms;
    std::string cleaned = normalise_phrases(strip_backticked(s));
    for (const auto& w : words(cleaned)) {
        if (is_number_word(w)) continue;
        if (w == "rb") {
            terms.insert(stem("randomized"));
            terms.insert(stem("benchmarking"));
            continue;
        }
        if (stopwords().count(w)) continue;
        terms.insert(stem(w));
    }
    return terms;
}

std::set<std::string> experiment_terms(std::string_view class_name) {
    std::set<std::string> terms;
    for (const auto& part : split_camel_case(class_name)) {
        std::string lower = to_lower(part);
        if (generic_class_words().count(lower)) continue;
        terms.insert(stem(lower));
    }
    return terms;
}

std::optional<std::string> tag_content(std::string_view s, std::string_view tag) {
    std::string open = "<" + std::string(tag) + ">";
    std::string close = "</" + std::string(tag) + ">";
    std::size_t b = s.find(open);
    if (b == std::string_view::npos) return std::nullopt;
    b += open.size();
    std::size_t e = s.find(close, b);
    if (e == std::string_view::npos) return std::nullopt;
    return std::string(s.substr(b, e - b));
}

std::string format_number(double v) {
    return fmt::format("{}", v);
}

std::string fixed(double v, int digits) {
    return fmt::format("{:.{}f}", v, digits);
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace kagents::text
