#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "aexch/cli.hpp"

int main(int argc, char** argv) {
    namespace cli = aexch::cli;
    CLI::App app{"Conservative multiplicative asset-exchange toolkit"};
    app.set_version_flag("--version", std::string(cli::tool_name) + " " +
                                          cli::tool_version);
    app.require_subcommand(1);

    // simulate
    std::string sim_config, sim_out;
    std::size_t replicas = 1, jobs = 1;
    auto* simulate = app.add_subcommand("simulate", "Run an exchange simulation");
    simulate->add_option("--config", sim_config, "Config file")->required();
    simulate->add_option("--out", sim_out, "Output directory")->required();
    simulate->add_option("--replicas", replicas, "Independent seeds to run");
    simulate->add_option("--jobs", jobs, "Parallel workers for replicas");

    // solve-exponent
    std::string se_dist;
    bool require_stable = false;
    auto* solve = app.add_subcommand("solve-exponent",
                                     "Solve the small-wealth exponent condition");
    solve->add_option("--dist", se_dist, "Distribution spec")->required();
    solve->add_flag("--require-stable", require_stable,
                    "Exit 4 unless the phase is Stable");

    // interface
    std::string if_out;
    auto* interface_cmd =
        app.add_subcommand("interface", "Tabulate the condensation interface");
    interface_cmd->add_option("--out", if_out, "Output directory")->required();

    // kinetic
    std::string kin_dist, kin_out;
    std::size_t kin_nodes = 0, kin_max_iters = 400;
    double kin_tol = 1e-8;
    auto* kinetic =
        app.add_subcommand("kinetic", "Solve the stationary kinetic equation");
    kinetic->add_option("--dist", kin_dist, "Distribution spec")->required();
    kinetic->add_option("--out", kin_out, "Output directory")->required();
    kinetic->add_option("--nodes", kin_nodes, "Grid nodes (default 2000)");
    kinetic->add_option("--tol", kin_tol, "Sup-norm residual tolerance");
    kinetic->add_option("--max-iters", kin_max_iters, "Iteration cap");

    // reversibility
    std::string rev_dist, rev_out;
    auto* reversibility =
        app.add_subcommand("reversibility", "Detailed-balance violation report");
    reversibility->add_option("--dist", rev_dist, "Distribution spec")->required();
    reversibility->add_option("--out", rev_out, "Output directory")->required();

    // rank-profile
    std::string rp_snapshot, rp_dist, rp_out;
    auto* rank = app.add_subcommand("rank-profile",
                                    "Rank-wealth profile and condensing checks");
    rank->add_option("--snapshot", rp_snapshot, "Snapshot file")->required();
    rank->add_option("--dist", rp_dist, "Distribution spec")->required();
    rank->add_option("--out", rp_out, "Output directory")->required();

    // figure
    std::string fig_name, fig_out;
    auto* figure = app.add_subcommand("figure", "Reproduce a figure data recipe");
    figure->add_option("name", fig_name, "Recipe: fig1a fig1b fig2a fig2b fig3a fig3b")
        ->required();
    figure->add_option("--out", fig_out, "Output directory")->required();

    // analyze
    std::string an_snapshot, an_out;
    std::size_t an_bins = 96;
    double an_gamma = 0.0;
    bool an_has_gamma = false;
    auto* analyze = app.add_subcommand("analyze", "Histogram and fits of a snapshot");
    analyze->add_option("--snapshot", an_snapshot, "Snapshot file")->required();
    analyze->add_option("--out", an_out, "Output directory")->required();
    analyze->add_option("--bins", an_bins, "Histogram bins");
    analyze->add_option("--gamma-T", an_gamma, "Compare against gamma approx with this T")
        ->each([&](const std::string&) { an_has_gamma = true; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_config;
    }

    if (simulate->parsed())
        return cli::cmd_simulate(sim_config, sim_out, replicas, jobs, std::cout,
                                 std::cerr);
    if (solve->parsed())
        return cli::cmd_solve_exponent(se_dist, require_stable, std::cout, std::cerr);
    if (interface_cmd->parsed()) return cli::cmd_interface(if_out, std::cerr);
    if (kinetic->parsed())
        return cli::cmd_kinetic(kin_dist, kin_out, kin_nodes, kin_max_iters, kin_tol,
                                std::cerr);
    if (reversibility->parsed())
        return cli::cmd_reversibility(rev_dist, rev_out, std::cout, std::cerr);
    if (rank->parsed())
        return cli::cmd_rank_profile(rp_snapshot, rp_dist, rp_out, std::cerr);
    if (figure->parsed()) return cli::cmd_figure(fig_name, fig_out, std::cerr);
    if (analyze->parsed())
        return cli::cmd_analyze(an_snapshot, an_out, an_bins,
                                an_has_gamma ? std::optional<double>(an_gamma)
                                             : std::nullopt,
                                std::cerr);
    return cli::exit_config;
}
