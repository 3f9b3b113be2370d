#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "aexch/returns.hpp"
#include "aexch/rng.hpp"

namespace aexch {

/// Wealths of N agents plus the conserved total and the trade counter.
/// Every wealth stays positive (|kappa| < 1 and the stake is the poorer
/// agent's); the sum tracks total_wealth up to floating-point drift, which is
/// monitored but never corrected.
struct Population {
    std::vector<double> wealths;
    double total_wealth = 0.0;
    std::uint64_t trades = 0;

    std::size_t size() const { return wealths.size(); }

    /// Relative deviation of sum(wealths) from the conserved total.
    double conservation_drift() const;
};

Population make_egalitarian(std::size_t agents, double total_wealth);

/// One conservative trade (the poorer agent holds w_poor):
/// w_poor' = w_poor (1 + kappa), w_rich' = w_rich - kappa w_poor.
struct TradeOutcome {
    double poor;
    double rich;
};

inline TradeOutcome trade(double w_poor, double w_rich, double kappa) {
    const double transfer = kappa * w_poor;
    return {w_poor + transfer, w_rich - transfer};
}

/// Applies one trade between agents i and j with return kappa. The poorer of
/// the two receives the return; on a tie the first-drawn agent i counts as
/// poor.
void apply_pair_trade(Population& pop, std::size_t i, std::size_t j, double kappa);

/// One trade between a uniformly random unordered pair of distinct agents.
void step(Population& pop, const ReturnDistribution& dist, RngStream& rng);

/// n trades in sequence (the engine hot loop).
void run_trades(Population& pop, const ReturnDistribution& dist, RngStream& rng,
                std::uint64_t n);

enum class InitKind { egalitarian, from_snapshot };

struct SimConfig {
    std::size_t agents = 0;
    std::uint64_t sweeps = 0; ///< one sweep = N trades
    ReturnDistribution dist;
    std::uint64_t seed = 1;
    std::uint64_t measure_every = 0; ///< sweeps between measurements; 0 = final only
    InitKind init = InitKind::egalitarian;
    std::filesystem::path snapshot_path{};
    double total_wealth = 0.0; ///< 0 = one wealth unit per agent
};

struct Measurement {
    std::uint64_t sweep = 0;
    std::uint64_t draws = 0; ///< stream position, for snapshot headers
    Population population;
};

struct RunResult {
    std::vector<Measurement> measurements;
    std::uint64_t final_draws = 0;
};

/// Runs the configured simulation, invoking the observer at each measurement
/// (the final state is always measured). Deterministic given (seed, config).
void run(const SimConfig& config, const std::function<void(const Measurement&)>& observe);
RunResult run(const SimConfig& config);

/// (relative rank, wealth) pairs with wealth sorted descending and
/// r = (R-1)/(N-1), so r = 0 is the richest agent.
struct RankProfile {
    std::vector<double> rank;
    std::vector<double> wealth;
};

RankProfile rank_profile(const Population& pop);

/// Eq-of-motion time of the rank law: each trade involves two agents, so
/// t = 2 * trades / N interactions per agent.
double trades_per_agent(const Population& pop);

/// Condensing-phase rank-wealth prediction
/// w(r, t) = W (1 - e^(-t phi/N)) / (1 - e^(-t phi)) e^(-r t phi),
/// with the t -> 0 limit W/N taken analytically.
double predicted_rank_wealth(double r, double t, double phi, double agents,
                             double total_wealth);

// Snapshot file format (text):
//   AEXCH-SNAPSHOT v1
//   N=<int> t=<int> seed=<u64> draws=<u64>
//   <N lines of decimal wealths, 17 significant digits>
struct Snapshot {
    Population population;
    std::uint64_t seed = 0;
    std::uint64_t draws = 0;
};

void write_snapshot(std::ostream& out, const Population& pop, std::uint64_t seed,
                    std::uint64_t draws);
void write_snapshot(const std::filesystem::path& path, const Population& pop,
                    std::uint64_t seed, std::uint64_t draws);
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::filesystem::path& path);

} // namespace aexch
