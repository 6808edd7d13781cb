#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kagents/execution/variables.hpp"
#include "kagents/inspection/figure.hpp"
#include "kagents/knowledge/registry.hpp"
#include "kagents/llm/gateway.hpp"

namespace kagents::bench {

struct BenchResult {
    std::string method;
    std::map<std::string, double> per_kind_accuracy;
    std::map<std::string, int> per_kind_cases;
    double accuracy = 0;
    int cases = 0;
    int correct = 0;
    llm::UsageSnapshot usage; // consumed by this run
    std::vector<nlohmann::json> misses;

    nlohmann::json to_json() const;
};

// Plain-text comparison table, one row per method.
std::string format_table(const std::vector<BenchResult>& results);

// ---- translation ---------------------------------------------------------------------------

struct TranslationCase {
    std::string instruction;
    std::string expected_experiment;
};

// JSON Lines with {"instruction", "expected_experiment"}. Throws ConfigError.
std::vector<TranslationCase> load_translation_cases(const std::filesystem::path& path);

struct TranslationBenchOptions {
    int n_k = 2;
    int n_max = 0; // 0: registry size + 2, so escalation can reach every agent
    int baseline_top_k = 2;
    int workers = 1;
};

// method: "agents" or "baseline-rag". Per-kind accuracy is keyed by the expected experiment.
BenchResult run_translation_bench(const std::vector<TranslationCase>& cases, const std::string& method,
                                  const knowledge::Registry& registry, llm::Gateway& gateway,
                                  const execution::VariableTable& table, const TranslationBenchOptions& options = {});

// Variables every benchmark instruction may refer to.
execution::VariableTable benchmark_variables();

// ---- inspection ----------------------------------------------------------------------------

const std::vector<std::string>& inspection_kinds(); // rabi-fourier, resonator-spectroscopy, gmm-readout, drag

struct InspectionCase {
    std::string kind;
    inspection::FigureArtifact figure;
    std::string fitting_report;
    bool label_success = false;
};

// Pure function of its arguments. Throws std::invalid_argument for unknown kinds or n < 1.
std::vector<InspectionCase> generate_inspection_corpus(const std::string& kind, int n_success, int n_fail,
                                                       std::uint64_t seed);

// One success and one failure PNG per kind, named <kind>_success.png and <kind>_failure.png.
void write_few_shot_assets(const std::filesystem::path& dir, std::uint64_t seed);

// Visual prompt per kind; the few-shot variant references the example images above.
std::string visual_prompt(const std::string& kind, bool few_shot);

struct InspectionBenchOptions {
    bool few_shot = false;
    std::filesystem::path asset_dir;
    int workers = 1;
};

// mode: fitting, visual or combined.
BenchResult run_inspection_bench(const std::vector<InspectionCase>& cases, const std::string& mode,
                                 llm::Gateway& gateway, const InspectionBenchOptions& options = {});

} // namespace kagents::bench
