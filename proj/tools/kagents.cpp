#include <iostream>

#include <CLI11.hpp>

#include "kagents/app/commands.hpp"
#include "kagents/errors.hpp"
#include "kagents/llm/backend.hpp"

using namespace kagents;

int main(int argc, char** argv) {
    CLI::App cli{"kagents: language-model agents driving a simulated qubit lab"};
    cli.require_subcommand(1);

    std::string config_path, device, backend, out_dir = ".", transcript;
    std::optional<std::uint64_t> seed;
    cli.add_option("--config", config_path, "JSON config file");
    cli.add_option("--device", device, "Device file (overrides the config)");
    cli.add_option("--backend", backend, "remote, scripted or rules (overrides the config)");
    cli.add_option("--seed", seed, "Random seed (overrides the config)");
    cli.add_option("--out", out_dir, "Output directory");
    cli.add_option("--transcript", transcript, "Transcript path (default: timestamped file in --out)");

    auto* run = cli.add_subcommand("run", "Run a procedure document");
    std::string procedure;
    run->add_option("--procedure,procedure", procedure, "Procedure Markdown file")->required();

    auto* sizzle = cli.add_subcommand("sizzle-search", "Search siZZle gate parameters on a qubit pair");
    std::string pair = "Q0,Q1";
    std::optional<int> budget;
    sizzle->add_option("--pair", pair, "CONTROL,TARGET");
    sizzle->add_option("--budget", budget, "Maximum number of stage executions");

    auto* bench = cli.add_subcommand("bench", "Run a benchmark");
    std::string bench_kind;
    bench->add_option("kind", bench_kind, "translate or inspect")->required();

    auto* replay = cli.add_subcommand("replay", "Replay a transcript with its recorded responses");
    std::string replay_path;
    replay->add_option("transcript", replay_path, "Transcript file")->required();

    cli.add_subcommand("list", "List registered experiments and procedures");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = cli.exit(e);
        return code == 0 ? 0 : app::kExitConfig;
    }

    app::CommandContext ctx;
    try {
        if (!config_path.empty()) ctx.config = app::load_config(config_path);
        if (!device.empty()) ctx.config.device_file = device;
        if (!backend.empty()) ctx.config.backend.kind = llm::backend_kind_from_string(backend);
        if (seed) ctx.config.seed = *seed;
        app::validate(ctx.config);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return app::kExitConfig;
    }
    ctx.out_dir = out_dir;
    ctx.transcript = transcript;

    if (run->parsed()) return app::cmd_run(procedure, ctx);
    if (sizzle->parsed()) return app::cmd_sizzle_search(pair, ctx, budget);
    if (bench->parsed()) return app::cmd_bench(bench_kind, ctx);
    if (replay->parsed()) return app::cmd_replay(replay_path, ctx);
    return app::cmd_list(ctx);
}
