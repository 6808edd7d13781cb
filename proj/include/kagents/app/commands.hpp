#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "kagents/app/config.hpp"

namespace kagents::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct CommandContext {
    Config config = default_config();
    std::filesystem::path out_dir = ".";
    std::filesystem::path transcript; // empty: timestamped file in out_dir
    std::ostream* out = nullptr;      // defaults to std::cout
    std::ostream* err = nullptr;      // defaults to std::cerr
};

int cmd_run(const std::filesystem::path& procedure_path, const CommandContext& ctx);
// pair is "Q0,Q1"; budget counts stage executions.
int cmd_sizzle_search(const std::string& pair, const CommandContext& ctx, std::optional<int> budget = std::nullopt);
int cmd_bench(const std::string& kind, const CommandContext& ctx);
int cmd_replay(const std::filesystem::path& transcript_path, const CommandContext& ctx);
int cmd_list(const CommandContext& ctx);

// The stored search procedure driven by cmd_sizzle_search.
std::filesystem::path sizzle_procedure_path();

} // namespace kagents::app
