#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <thread>

#include "aexch/analysis.hpp"
#include "aexch/cli.hpp"
#include "aexch/detail/threads.hpp"
#include "aexch/errors.hpp"
#include "aexch/exponent.hpp"
#include "aexch/kinetic.hpp"
#include "aexch/reversibility.hpp"

namespace aexch::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Exception-to-exit-code mapping shared by every subcommand.
template <class Body>
int guarded(std::ostream& diag, const Body& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        diag << tool_name << ": config error: " << e.what() << '\n';
        return exit_config;
    } catch (const PhaseError& e) {
        diag << tool_name << ": " << e.what() << '\n';
        return exit_phase;
    } catch (const std::invalid_argument& e) {
        diag << tool_name << ": config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::domain_error& e) {
        diag << tool_name << ": config error: " << e.what() << '\n';
        return exit_config;
    } catch (const ConvergenceError& e) {
        diag << tool_name << ": " << e.what() << '\n';
        return exit_failure;
    } catch (const InsufficientDataError& e) {
        diag << tool_name << ": " << e.what() << '\n';
        return exit_failure;
    } catch (const Error& e) {
        diag << tool_name << ": i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::filesystem::filesystem_error& e) {
        diag << tool_name << ": i/o error: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        diag << tool_name << ": " << e.what() << '\n';
        return exit_failure;
    }
}

void ensure_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory '" + dir.string() + "'");
}

std::string relative_name(const std::filesystem::path& base,
                          const std::filesystem::path& file) {
    return std::filesystem::relative(file, base).generic_string();
}

void write_histogram_csv(const std::filesystem::path& path,
                         const WealthHistogram& hist) {
    CsvWriter csv(path, "w_center,density,count");
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        std::ostringstream line;
        line << format_double(hist.center(i)) << ',' << format_double(hist.density[i])
             << ',' << hist.counts[i];
        csv.raw_row(line.str());
    }
}

// One replica of a simulate run: snapshots plus raw-wealth histograms at each
// measurement.
std::vector<std::string> run_one_replica(const SimConfig& sim,
                                         const std::filesystem::path& dir,
                                         const std::filesystem::path& rel_base,
                                         std::uint64_t bins) {
    ensure_dir(dir);
    std::vector<std::string> outputs;
    run(sim, [&](const Measurement& m) {
        const std::string tag = std::to_string(m.sweep);
        const auto snap_path = dir / ("snapshot_" + tag + ".txt");
        write_snapshot(snap_path, m.population, sim.seed, m.draws);
        outputs.push_back(relative_name(rel_base, snap_path));

        const auto hist = histogram(m.population.wealths, bins);
        const auto hist_path = dir / ("hist_" + tag + ".csv");
        write_histogram_csv(hist_path, hist);
        outputs.push_back(relative_name(rel_base, hist_path));
    });
    return outputs;
}

} // namespace

int cmd_simulate(const std::filesystem::path& config_path,
                 const std::filesystem::path& out_dir, std::size_t replicas,
                 std::size_t jobs, std::ostream& out, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto start = Clock::now();
        const Config config = Config::from_file(config_path);
        const SimConfig base = sim_config_from(config);
        const std::uint64_t bins = config.uint_or("bins", 96);
        ensure_dir(out_dir);

        if (replicas == 0) replicas = 1;
        std::vector<std::vector<std::string>> outputs(replicas);
        if (replicas == 1) {
            outputs[0] = run_one_replica(base, out_dir, out_dir, bins);
        } else {
            // independent seeds, no shared state; output order fixed by index
            const std::size_t workers = detail::worker_count(replicas, jobs);
            std::atomic<std::size_t> next{0};
            auto work = [&] {
                for (std::size_t r = next.fetch_add(1); r < replicas;
                     r = next.fetch_add(1)) {
                    SimConfig sim = base;
                    sim.seed = base.seed + r;
                    char name[32];
                    std::snprintf(name, sizeof name, "replica_%02zu", r);
                    outputs[r] = run_one_replica(sim, out_dir / name, out_dir, bins);
                }
            };
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
            for (auto& th : pool) th.join();
        }

        Manifest manifest;
        manifest.subcommand = "simulate";
        manifest.config_digest = fnv1a_hex(config.text());
        manifest.seed = base.seed;
        for (auto& files : outputs)
            manifest.outputs.insert(manifest.outputs.end(), files.begin(), files.end());
        manifest.wall_clock_seconds = seconds_since(start);
        write_manifest(out_dir, manifest);
        out << "simulate: wrote " << manifest.outputs.size() << " files to "
            << out_dir.string() << '\n';
        return exit_ok;
    });
}

int cmd_solve_exponent(const std::string& dist_spec, bool require_stable,
                       std::ostream& out, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto dist = parse_distribution_spec(dist_spec);
        const ExponentReport rep = solve_exponent(dist);
        std::string t_field;
        if (rep.exponent) {
            t_field = std::isfinite(*rep.exponent)
                          ? format_double(*rep.exponent, 11)
                          : std::string("inf");
        }
        out << phase_name(rep.phase) << ',' << t_field << ','
            << format_double(rep.first_order, 11) << ','
            << format_double(rep.log_gain_mean, 11) << '\n';
        if (rep.no_negative_support)
            diag << tool_name
                 << ": warning: pi has no mass on kappa < 0; the moment is strictly "
                    "decreasing and only the +inf sentinel exists\n";
        if (require_stable && rep.phase != Phase::stable) return exit_phase;
        return exit_ok;
    });
}

int cmd_interface(const std::filesystem::path& out_dir, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto start = Clock::now();
        ensure_dir(out_dir);
        Manifest manifest;
        manifest.subcommand = "interface";

        {
            CsvWriter csv(out_dir / "yard_sale_interface.csv", "f,p_c");
            for (int i = 1; i <= 99; ++i) {
                const double f = 0.01 * i;
                csv.row({f, yard_sale_critical_p(f)});
            }
            manifest.outputs.push_back("yard_sale_interface.csv");
        }
        {
            CsvWriter csv(out_dir / "flat_interface.csv", "a,b,residual,phase");
            for (int ia = -18; ia <= 18; ++ia) {
                for (int ib = ia + 1; ib <= 18; ++ib) {
                    const double a = 0.05 * ia;
                    const double b = 0.05 * ib;
                    const double r = flat_interface_residual(a, b);
                    std::ostringstream line;
                    line << format_double(a) << ',' << format_double(b) << ','
                         << format_double(r) << ','
                         << (r > 0 ? "Stable" : (r < 0 ? "Condensing" : "Critical"));
                    csv.raw_row(line.str());
                }
            }
            manifest.outputs.push_back("flat_interface.csv");
        }
        manifest.wall_clock_seconds = seconds_since(start);
        write_manifest(out_dir, manifest);
        return exit_ok;
    });
}

int cmd_kinetic(const std::string& dist_spec, const std::filesystem::path& out_dir,
                std::size_t nodes, std::size_t max_iters, double tol,
                std::ostream& diag) {
    return guarded(diag, [&] {
        const auto start = Clock::now();
        const auto dist = parse_distribution_spec(dist_spec);
        GridSpec spec;
        if (nodes > 0) spec.nodes = nodes;
        const FixedPointResult result = solve_fixed_point(dist, spec, max_iters, tol);
        ensure_dir(out_dir);

        Manifest manifest;
        manifest.subcommand = "kinetic";
        manifest.config_digest = fnv1a_hex(dist_spec);
        {
            CsvWriter csv(out_dir / "grid.csv", "w,P");
            for (std::size_t i = 0; i < result.grid.nodes.size(); ++i)
                csv.row({result.grid.nodes[i], result.grid.values[i]});
            manifest.outputs.push_back("grid.csv");
        }
        {
            CsvWriter csv(out_dir / "residuals.csv", "iter,sup_norm_residual");
            for (std::size_t i = 0; i < result.residuals.size(); ++i)
                csv.row({static_cast<double>(i), result.residuals[i]});
            manifest.outputs.push_back("residuals.csv");
        }
        manifest.wall_clock_seconds = seconds_since(start);
        write_manifest(out_dir, manifest);
        return exit_ok;
    });
}

int cmd_reversibility(const std::string& dist_spec,
                      const std::filesystem::path& out_dir, std::ostream& out,
                      std::ostream& diag) {
    return guarded(diag, [&] {
        const auto start = Clock::now();
        const auto dist = parse_distribution_spec(dist_spec);
        const ViolationReport report = violation(dist);
        ensure_dir(out_dir);

        Manifest manifest;
        manifest.subcommand = "reversibility";
        manifest.config_digest = fnv1a_hex(dist_spec);
        CsvWriter csv(out_dir / "report.csv", "x,z,rho,forward,backward,rel_violation");
        for (const KernelSample& s : report.samples)
            csv.row({s.x, s.z, s.rho, s.forward, s.backward, s.violation});
        manifest.outputs.push_back("report.csv");
        manifest.wall_clock_seconds = seconds_since(start);
        write_manifest(out_dir, manifest);

        out << "max_violation," << format_double(report.max_violation) << '\n';
        return exit_ok;
    });
}

int cmd_rank_profile(const std::filesystem::path& snapshot_path,
                     const std::string& dist_spec,
                     const std::filesystem::path& out_dir, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto start = Clock::now();
        const Snapshot snap = read_snapshot(snapshot_path);
        const auto dist = parse_distribution_spec(dist_spec);
        const ExponentReport rep = solve_exponent(dist);
        if (rep.phase != Phase::condensing)
            throw PhaseError(
                std::string("rank-profile: distribution is in the ") +
                phase_name(rep.phase) +
                " phase; the rank law applies to condensing runs only");

        const double phi = -rep.log_gain_mean;
        const double t = trades_per_agent(snap.population);
        const RankProfile profile = rank_profile(snap.population);
        const CondensingReport checks = condensing_checks(profile, phi, t);
        ensure_dir(out_dir);

        Manifest manifest;
        manifest.subcommand = "rank-profile";
        manifest.config_digest = fnv1a_hex(dist_spec);
        manifest.seed = snap.seed;
        {
            CsvWriter csv(out_dir / "rank.csv", "r,w,w_pred");
            const double n = static_cast<double>(snap.population.size());
            const double W = snap.population.total_wealth;
            for (std::size_t i = 0; i < profile.rank.size(); ++i)
                csv.row({profile.rank[i], profile.wealth[i],
                         predicted_rank_wealth(profile.rank[i], t, phi, n, W)});
            manifest.outputs.push_back("rank.csv");
        }
        {
            CsvWriter csv(out_dir / "checks.csv", "quantity,estimate,stderr,lo,hi,theory");
            std::ostringstream r1;
            r1 << "mid_rank_slope," << format_double(checks.mid_rank_slope) << ",,"
               << format_double(checks.fit_r_lo) << ','
               << format_double(checks.fit_r_hi) << ','
               << format_double(checks.slope_theory);
            csv.raw_row(r1.str());
            std::ostringstream r2;
            r2 << "pw_slope," << format_double(checks.pw_slope) << ",,"
               << format_double(checks.pw_w_lo) << ','
               << format_double(checks.pw_w_hi) << ",-1";
            csv.raw_row(r2.str());
            manifest.outputs.push_back("checks.csv");
        }
        manifest.wall_clock_seconds = seconds_since(start);
        write_manifest(out_dir, manifest);
        return exit_ok;
    });
}

int cmd_analyze(const std::filesystem::path& snapshot_path,
                const std::filesystem::path& out_dir, std::size_t bins,
                std::optional<double> gamma_T, std::ostream& diag) {
    return guarded(diag, [&] {
        const auto start = Clock::now();
        const Snapshot snap = read_snapshot(snapshot_path);
        const auto rescaled = rescaled_to_unit_mean(snap.population.wealths);
        const auto hist = histogram(rescaled, bins ? bins : 96);
        ensure_dir(out_dir);

        Manifest manifest;
        manifest.subcommand = "analyze";
        manifest.seed = snap.seed;
        write_histogram_csv(out_dir / "hist.csv", hist);
        manifest.outputs.push_back("hist.csv");

        CsvWriter csv(out_dir / "fit.csv", "quantity,estimate,stderr,lo,hi,theory");
        try {
            const SlopeFit fit = small_w_exponent(hist);
            std::ostringstream line;
            line << "small_w_slope," << format_double(fit.slope) << ','
                 << format_double(fit.std_error) << ',' << format_double(fit.w_lo)
                 << ',' << format_double(fit.w_hi) << ',';
            csv.raw_row(line.str());
        } catch (const InsufficientDataError& e) {
            diag << tool_name << ": note: " << e.what() << '\n';
        }
        if (gamma_T) {
            const GammaDistance d = gamma_comparison(hist, *gamma_T);
            std::ostringstream l1;
            l1 << "gamma_sup_distance," << format_double(d.sup_distance) << ",,,,";
            csv.raw_row(l1.str());
            std::ostringstream l2;
            l2 << "gamma_l1_distance," << format_double(d.l1_distance) << ",,,,";
            csv.raw_row(l2.str());
        }
        manifest.outputs.push_back("fit.csv");
        manifest.wall_clock_seconds = seconds_since(start);
        write_manifest(out_dir, manifest);
        return exit_ok;
    });
}

} // namespace aexch::cli
