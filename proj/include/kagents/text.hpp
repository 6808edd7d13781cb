#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace kagents::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_ci(std::string_view s, std::string_view prefix);
bool contains_ci(std::string_view haystack, std::string_view needle);
std::string replace_all(std::string s, std::string_view from, std::string_view to);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

// "SimpleRamseyMultilevel" -> {"Simple", "Ramsey", "Multilevel"}; digit runs stay attached ("T1").
std::vector<std::string> split_camel_case(std::string_view name);

// Lowercase alphanumeric runs.
std::vector<std::string> words(std::string_view s);

std::string stem(std::string_view word);

// Names written between backticks, in order of appearance.
std::vector<std::string> backticked_names(std::string_view s);

// Stemmed words with stopwords, numbers and backticked names removed.
std::set<std::string> content_terms(std::string_view s);

// Distinctive stems of an experiment class name (generic words dropped).
std::set<std::string> experiment_terms(std::string_view class_name);

// Text between <tag> and </tag>.
std::optional<std::string> tag_content(std::string_view s, std::string_view tag);

// Shortest round-trip decimal rendering.
std::string format_number(double v);

// Fixed precision rendering ("0.102").
std::string fixed(double v, int digits);

std::string quote(std::string_view s);

} // namespace kagents::text
