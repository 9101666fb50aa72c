#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "spatzsim/cli.hpp"

using namespace spatzsim;

namespace {

struct CommonArgs {
    std::string config_path;
    CliOverrides ov;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "JSON config file");
    cmd->add_option("--mode", args.ov.mode, "override experiment mode (split|merge)");
    cmd->add_option("--format", args.ov.format, "report format (json|csv)");
    cmd->add_option("--seed", args.ov.seed, "override rng seed");
    cmd->add_option("--max-cycles", args.ov.max_cycles, "override simulation cycle limit");
    cmd->add_option("--out", args.ov.out, "report output path (default stdout)");
    cmd->add_flag("--trace", args.ov.trace, "write an execution trace to stderr");
}

int load_and_dispatch(const CommonArgs& args, int (*body)(const CliConfig&, std::ostream&,
                                                          std::ostream&)) {
    CliConfig cfg;
    try {
        if (!args.config_path.empty()) cfg = load_config_file(args.config_path);
        apply_overrides(cfg, args.ov);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_usage;
    }
    return body(cfg, std::cout, std::cerr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual-core scalar+vector cluster simulator"};
    app.require_subcommand(1);

    CommonArgs run_args, sweep_args, mixed_args;
    CLI::App* run = app.add_subcommand("run", "run one experiment from a config");
    add_common(run, run_args);
    CLI::App* sweep = app.add_subcommand("sweep", "run kernel x mode cells and compare");
    add_common(sweep, sweep_args);
    CLI::App* mixed = app.add_subcommand("mixed", "run the mixed kernel+scalar experiment");
    add_common(mixed, mixed_args);

    std::string asm_path;
    CLI::App* check = app.add_subcommand("asm-check", "assemble a file without running it");
    check->add_option("path", asm_path, "assembly source file")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return load_and_dispatch(run_args, cmd_run);
    if (sweep->parsed()) return load_and_dispatch(sweep_args, cmd_sweep);
    if (mixed->parsed()) return load_and_dispatch(mixed_args, cmd_mixed);
    if (check->parsed()) return cmd_asm_check(asm_path, std::cerr);
    return exit_usage;
}
