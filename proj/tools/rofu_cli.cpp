#include <CLI11.hpp>

#include "rofu/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"rofu: contextual bandits with regularized-optimism UCBs"};
    app.require_subcommand(1);

    std::string config_arg;
    rofu::cli::Overrides ov;
    long seeds_flag = 0, horizon_flag = 0;
    std::string out_flag;
    auto* run = app.add_subcommand("run", "run an experiment from a config file or bundled preset");
    run->add_option("config", config_arg, "config path or preset name")->required();
    run->add_option("--seeds", seeds_flag, "override the number of seeds");
    run->add_option("--horizon", horizon_flag, "override the horizon T");
    run->add_option("--out", out_flag, "override the output directory");

    std::string suite;
    auto* verify = app.add_subcommand("verify", "run an oracle-equivalence suite");
    verify->add_option("suite", suite, "one of: linucb, ucb1, ntk, gradcheck, linalg")->required();

    std::string plot_dir;
    auto* plot = app.add_subcommand("plot-data", "merge per-agent curves into comparison.csv");
    plot->add_option("dir", plot_dir, "experiment output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (run->parsed()) {
        if (seeds_flag > 0) ov.seeds = seeds_flag;
        if (horizon_flag > 0) ov.horizon = horizon_flag;
        if (!out_flag.empty()) ov.out = out_flag;
        return rofu::cli::cmd_run(config_arg, ov);
    }
    if (verify->parsed()) return rofu::cli::cmd_verify(suite);
    if (plot->parsed()) return rofu::cli::cmd_plotdata(plot_dir);
    return 2;
}
