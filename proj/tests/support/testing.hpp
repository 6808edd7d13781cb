#pragma once

#include <filesystem>
#include <string>

namespace kagents::testing {

// Fresh empty directory under the system temp dir, unique per call.
std::filesystem::path temp_dir(const std::string& tag);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

std::filesystem::path data_path(const std::string& relative);

// Runs the kagents CLI with the given arguments; returns its exit code, stdout in *out.
int run_cli(const std::string& args, std::string* out = nullptr);

} // namespace kagents::testing
