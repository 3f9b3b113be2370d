#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <vector>

#include "aexch/analysis.hpp"
#include "aexch/cli.hpp"
#include "aexch/errors.hpp"
#include "aexch/exponent.hpp"

namespace aexch::cli {

namespace {

using Clock = std::chrono::steady_clock;

// Fixed log-spaced binning (no trimming) so every measured curve in a figure
// shares the same abscissae as the theory file.
struct FixedGrid {
    std::vector<double> edges;

    FixedGrid(double lo, double hi, std::size_t bins) {
        edges.resize(bins + 1);
        for (std::size_t i = 0; i <= bins; ++i)
            edges[i] = lo * std::pow(hi / lo, static_cast<double>(i) /
                                                  static_cast<double>(bins));
    }
    std::size_t bins() const { return edges.size() - 1; }
    double center(std::size_t i) const { return std::sqrt(edges[i] * edges[i + 1]); }
    double width(std::size_t i) const { return edges[i + 1] - edges[i]; }

    std::pair<std::vector<std::size_t>, std::vector<double>>
    bin(const std::vector<double>& samples) const {
        std::vector<std::size_t> counts(bins(), 0);
        for (double w : samples) {
            if (w < edges.front() || w >= edges.back()) continue;
            const auto it = std::upper_bound(edges.begin(), edges.end(), w);
            ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
        }
        std::vector<double> density(bins(), 0.0);
        for (std::size_t i = 0; i < bins(); ++i)
            density[i] = static_cast<double>(counts[i]) /
                         (static_cast<double>(samples.size()) * width(i));
        return {std::move(counts), std::move(density)};
    }
};

std::vector<double> final_wealths(const ReturnDistribution& dist, std::size_t agents,
                                  std::uint64_t sweeps, std::uint64_t seed) {
    const SimConfig sim{.agents = agents,
                        .sweeps = sweeps,
                        .dist = dist,
                        .seed = seed,
                        .measure_every = 0,
                        .init = InitKind::egalitarian,
                        .snapshot_path = {},
                        .total_wealth = 0.0};
    const RunResult result = run(sim);
    return rescaled_to_unit_mean(result.measurements.back().population.wealths);
}

void write_fixed_hist(CsvWriter& csv, const FixedGrid& grid,
                      const std::vector<std::size_t>& counts,
                      const std::vector<double>& density) {
    for (std::size_t i = 0; i < grid.bins(); ++i) {
        std::ostringstream line;
        line << format_double(grid.center(i)) << ',' << format_double(density[i])
             << ',' << counts[i];
        csv.raw_row(line.str());
    }
}

std::string f_tag(double value) {
    std::ostringstream tag;
    tag << value;
    return tag.str();
}

struct FigureContext {
    std::filesystem::path dir;
    Manifest manifest;

    CsvWriter csv(const std::string& name, std::string_view header) {
        manifest.outputs.push_back(name);
        return CsvWriter(dir / name, header);
    }
};

// Stable-phase histogram figures: three runs against one theory curve.
void equilibrium_figure(FigureContext& ctx, const std::string& stem,
                        const std::vector<std::pair<std::string, ReturnDistribution>>& cases,
                        std::size_t agents, std::uint64_t sweeps, std::uint64_t seed0,
                        double theory_T) {
    const FixedGrid grid(1e-3, 20.0, 72);
    std::uint64_t seed = seed0;
    for (const auto& [tag, dist] : cases) {
        const auto wealths = final_wealths(dist, agents, sweeps, seed++);
        const auto [counts, density] = grid.bin(wealths);
        auto csv = ctx.csv(stem + "_" + tag + ".csv", "w_center,density,count");
        write_fixed_hist(csv, grid, counts, density);
    }
    const GammaApprox gamma = gamma_approx(theory_T);
    auto theory = ctx.csv(stem + "_theory.csv", "w,P");
    for (std::size_t i = 0; i < grid.bins(); ++i)
        theory.row({grid.center(i), gamma.density(grid.center(i))});
}

void figure_1a(FigureContext& ctx) {
    std::vector<std::pair<std::string, ReturnDistribution>> cases;
    for (double f : {0.1, 0.3, 0.5})
        cases.emplace_back("f" + f_tag(f),
                           ReturnDistribution::binary(0.5 * (1.0 + f), f));
    equilibrium_figure(ctx, "fig1a", cases, 10000, 3000, 1101, 1.0);
}

void figure_1b(FigureContext& ctx) {
    std::vector<std::pair<std::string, ReturnDistribution>> cases;
    for (double f : {0.1, 0.3, 0.5})
        cases.emplace_back(
            "f" + f_tag(f),
            ReturnDistribution::binary(0.5 + 0.25 * (3.0 * f - f * f * f), f));
    equilibrium_figure(ctx, "fig1b", cases, 30000, 4000, 1201, 2.0);
}

void figure_2a(FigureContext& ctx) {
    std::vector<std::pair<std::string, ReturnDistribution>> cases;
    for (double z : {1.5, 2.5, 4.9215}) {
        const auto [a, b] = flat_t1_parameterization(z);
        cases.emplace_back("z" + f_tag(z), ReturnDistribution::flat(a, b));
    }
    equilibrium_figure(ctx, "fig2a", cases, 10000, 3000, 1301, 1.0);
}

void figure_2b(FigureContext& ctx) {
    std::vector<std::pair<std::string, ReturnDistribution>> cases;
    for (double b : {0.25, 0.5, 0.9})
        cases.emplace_back("b" + f_tag(b),
                           ReturnDistribution::flat(-b / (1.0 + b), b));
    equilibrium_figure(ctx, "fig2b", cases, 30000, 4000, 1401, 2.0);
}

// Condensing-phase run shared by fig3a and fig3b: flat returns on
// [-0.1, 0.1], measured at rank-law times t in {2.5e4, 5e4, 7.5e4, 1e5}
// (one time unit = one interaction per agent, so sweeps = t/2).
RunResult condensing_run() {
    const SimConfig sim{.agents = 1000,
                        .sweeps = 50000,
                        .dist = ReturnDistribution::flat(-0.1, 0.1),
                        .seed = 1501,
                        .measure_every = 12500,
                        .init = InitKind::egalitarian,
                        .snapshot_path = {},
                        .total_wealth = 0.0};
    return run(sim);
}

void figure_3a(FigureContext& ctx) {
    const RunResult result = condensing_run();
    const double phi = moments(ReturnDistribution::flat(-0.1, 0.1)).phi();
    for (const Measurement& m : result.measurements) {
        const double t = trades_per_agent(m.population);
        const RankProfile profile = rank_profile(m.population);
        auto csv = ctx.csv("fig3a_t" + std::to_string(static_cast<long long>(t)) + ".csv",
                           "r,w,w_pred");
        const double n = static_cast<double>(m.population.size());
        const double W = m.population.total_wealth;
        for (std::size_t i = 0; i < profile.rank.size(); ++i)
            csv.row({profile.rank[i], profile.wealth[i],
                     predicted_rank_wealth(profile.rank[i], t, phi, n, W)});
    }
}

void figure_3b(FigureContext& ctx) {
    const RunResult result = condensing_run();
    const Population& pop = result.measurements.back().population;
    const auto hist = histogram(pop.wealths, static_cast<std::size_t>(
                                                 4.0 * std::log10(pop.total_wealth /
                                                                  *std::min_element(
                                                                      pop.wealths.begin(),
                                                                      pop.wealths.end()))));
    {
        auto csv = ctx.csv("fig3b_hist.csv", "w_center,density,count");
        for (std::size_t i = 0; i < hist.counts.size(); ++i) {
            std::ostringstream line;
            line << format_double(hist.center(i)) << ','
                 << format_double(hist.density[i]) << ',' << hist.counts[i];
            csv.raw_row(line.str());
        }
    }
    // 1/w guide scaled to the occupied mid-range
    double log_c = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        if (hist.counts[i] < 3) continue;
        log_c += std::log(hist.density[i] * hist.center(i));
        ++used;
    }
    const double c = used > 0 ? std::exp(log_c / static_cast<double>(used)) : 1.0;
    auto theory = ctx.csv("fig3b_theory.csv", "w,P");
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        theory.row({hist.center(i), c / hist.center(i)});
}

} // namespace

std::vector<std::string> figure_names() {
    return {"fig1a", "fig1b", "fig2a", "fig2b", "fig3a", "fig3b"};
}

int cmd_figure(const std::string& name, const std::filesystem::path& out_dir,
               std::ostream& diag) {
    try {
        const auto start = Clock::now();
        FigureContext ctx;
        ctx.dir = out_dir;
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw Error("cannot create output directory '" + out_dir.string() + "'");

        if (name == "fig1a")
            figure_1a(ctx);
        else if (name == "fig1b")
            figure_1b(ctx);
        else if (name == "fig2a")
            figure_2a(ctx);
        else if (name == "fig2b")
            figure_2b(ctx);
        else if (name == "fig3a")
            figure_3a(ctx);
        else if (name == "fig3b")
            figure_3b(ctx);
        else
            throw ConfigError("unknown figure recipe '" + name + "'");

        ctx.manifest.subcommand = "figure " + name;
        ctx.manifest.config_digest = fnv1a_hex(name);
        ctx.manifest.wall_clock_seconds =
            std::chrono::duration<double>(Clock::now() - start).count();
        write_manifest(out_dir, ctx.manifest);
        return exit_ok;
    } catch (const ConfigError& e) {
        diag << tool_name << ": config error: " << e.what() << '\n';
        return exit_config;
    } catch (const Error& e) {
        diag << tool_name << ": i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        diag << tool_name << ": " << e.what() << '\n';
        return exit_failure;
    }
}

} // namespace aexch::cli
