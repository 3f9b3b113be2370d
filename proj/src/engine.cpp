#include "aexch/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

#include "aexch/errors.hpp"

namespace aexch {

double Population::conservation_drift() const {
    if (total_wealth == 0.0) return 0.0;
    const double sum = std::accumulate(wealths.begin(), wealths.end(), 0.0);
    return std::abs(sum - total_wealth) / total_wealth;
}

Population make_egalitarian(std::size_t agents, double total_wealth) {
    if (agents < 2) throw std::invalid_argument("population needs at least 2 agents");
    if (!(total_wealth > 0)) throw std::invalid_argument("total wealth must be positive");
    Population pop;
    pop.wealths.assign(agents, total_wealth / static_cast<double>(agents));
    pop.total_wealth = total_wealth;
    return pop;
}

void apply_pair_trade(Population& pop, std::size_t i, std::size_t j, double kappa) {
    double& wi = pop.wealths[i];
    double& wj = pop.wealths[j];
    if (wj < wi) {
        const double transfer = kappa * wj;
        wj += transfer;
        wi -= transfer;
    } else {
        const double transfer = kappa * wi;
        wi += transfer;
        wj -= transfer;
    }
    ++pop.trades;
}

void step(Population& pop, const ReturnDistribution& dist, RngStream& rng) {
    const std::size_t n = pop.wealths.size();
    const std::size_t i = rng.next_below(n);
    std::size_t j = rng.next_below(n - 1);
    j += (j >= i);
    apply_pair_trade(pop, i, j, dist.sample(rng));
}

void run_trades(Population& pop, const ReturnDistribution& dist, RngStream& rng,
                std::uint64_t n_trades) {
    const std::size_t n = pop.wealths.size();
    double* w = pop.wealths.data();

    auto exchange = [&](std::size_t i, std::size_t j, double kappa) {
        const double wi = w[i];
        const double wj = w[j];
        if (wj < wi) { // j is poorer; ties fall through so the first draw is poor
            const double transfer = kappa * wj;
            w[j] = wj + transfer;
            w[i] = wi - transfer;
        } else {
            const double transfer = kappa * wi;
            w[i] = wi + transfer;
            w[j] = wj - transfer;
        }
    };

    switch (dist.kind()) {
    case DistKind::binary: {
        const double p = dist.binary_p();
        const double f = dist.binary_f();
        for (std::uint64_t k = 0; k < n_trades; ++k) {
            const std::size_t i = rng.next_below(n);
            std::size_t j = rng.next_below(n - 1);
            j += (j >= i);
            exchange(i, j, rng.next_unit() < p ? f : -f);
        }
        break;
    }
    case DistKind::flat: {
        const double a = dist.flat_a();
        const double width = dist.flat_b() - a;
        for (std::uint64_t k = 0; k < n_trades; ++k) {
            const std::size_t i = rng.next_below(n);
            std::size_t j = rng.next_below(n - 1);
            j += (j >= i);
            exchange(i, j, a + width * rng.next_unit());
        }
        break;
    }
    default:
        for (std::uint64_t k = 0; k < n_trades; ++k) {
            const std::size_t i = rng.next_below(n);
            std::size_t j = rng.next_below(n - 1);
            j += (j >= i);
            exchange(i, j, dist.sample(rng));
        }
        break;
    }
    pop.trades += n_trades;
}

void run(const SimConfig& config,
         const std::function<void(const Measurement&)>& observe) {
    if (config.sweeps < 1) throw std::invalid_argument("run: sweeps must be >= 1");

    Population pop;
    std::uint64_t draws0 = 0;
    std::uint64_t seed = config.seed;
    if (config.init == InitKind::from_snapshot) {
        Snapshot snap = read_snapshot(config.snapshot_path);
        pop = std::move(snap.population);
        seed = snap.seed;
        draws0 = snap.draws;
    } else {
        const double total = config.total_wealth > 0
                                 ? config.total_wealth
                                 : static_cast<double>(config.agents);
        pop = make_egalitarian(config.agents, total);
    }

    RngStream rng(seed, draws0);
    const std::uint64_t n = pop.size();
    const std::uint64_t chunk =
        config.measure_every > 0 ? config.measure_every : config.sweeps;

    std::uint64_t done = 0;
    while (done < config.sweeps) {
        const std::uint64_t sweeps_now = std::min(chunk, config.sweeps - done);
        run_trades(pop, config.dist, rng, sweeps_now * n);
        done += sweeps_now;
        observe(Measurement{done, rng.draws(), pop});
    }
}

RunResult run(const SimConfig& config) {
    RunResult result;
    run(config, [&](const Measurement& m) {
        result.measurements.push_back(m);
        result.final_draws = m.draws;
    });
    return result;
}

RankProfile rank_profile(const Population& pop) {
    RankProfile profile;
    const std::size_t n = pop.size();
    profile.wealth = pop.wealths;
    std::sort(profile.wealth.begin(), profile.wealth.end(), std::greater<>());
    profile.rank.resize(n);
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (std::size_t i = 0; i < n; ++i)
        profile.rank[i] = static_cast<double>(i) / denom;
    return profile;
}

double trades_per_agent(const Population& pop) {
    return 2.0 * static_cast<double>(pop.trades) / static_cast<double>(pop.size());
}

double predicted_rank_wealth(double r, double t, double phi, double agents,
                             double total_wealth) {
    if (!(phi > 0)) throw std::domain_error("predicted_rank_wealth: phi must be > 0");
    if (t < 0) throw std::domain_error("predicted_rank_wealth: t must be >= 0");
    const double tphi = t * phi;
    if (tphi == 0.0) return total_wealth / agents;
    const double numerator = -std::expm1(-tphi / agents);
    const double denominator = -std::expm1(-tphi);
    return total_wealth * (numerator / denominator) * std::exp(-r * tphi);
}

namespace {

void format_wealth(std::string& buf, double w) {
    char tmp[48];
    const auto res =
        std::to_chars(tmp, tmp + sizeof tmp, w, std::chars_format::general, 17);
    buf.append(tmp, res.ptr);
    buf.push_back('\n');
}

std::uint64_t parse_u64_field(const std::string& line, const std::string& key) {
    const std::string token = key + "=";
    const auto pos = line.find(token);
    if (pos == std::string::npos)
        throw Error("snapshot header missing field '" + key + "'");
    std::uint64_t value = 0;
    const char* first = line.data() + pos + token.size();
    const char* last = line.data() + line.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first)
        throw Error("snapshot header field '" + key + "' is not an integer");
    return value;
}

} // namespace

void write_snapshot(std::ostream& out, const Population& pop, std::uint64_t seed,
                    std::uint64_t draws) {
    std::string buf;
    buf.reserve(pop.size() * 26 + 96);
    buf += "AEXCH-SNAPSHOT v1\n";
    buf += "N=" + std::to_string(pop.size()) + " t=" + std::to_string(pop.trades) +
           " seed=" + std::to_string(seed) + " draws=" + std::to_string(draws) + "\n";
    for (double w : pop.wealths) format_wealth(buf, w);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw Error("snapshot write failed");
}

void write_snapshot(const std::filesystem::path& path, const Population& pop,
                    std::uint64_t seed, std::uint64_t draws) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open snapshot file '" + path.string() + "'");
    write_snapshot(out, pop, seed, draws);
}

Snapshot read_snapshot(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "AEXCH-SNAPSHOT v1")
        throw Error("not an AEXCH-SNAPSHOT v1 file");
    if (!std::getline(in, line)) throw Error("snapshot missing header line");

    Snapshot snap;
    const std::uint64_t n = parse_u64_field(line, "N");
    snap.population.trades = parse_u64_field(line, "t");
    snap.seed = parse_u64_field(line, "seed");
    snap.draws = parse_u64_field(line, "draws");

    snap.population.wealths.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        if (!std::getline(in, line))
            throw Error("snapshot truncated: expected " + std::to_string(n) +
                        " wealths, got " + std::to_string(i));
        double w = 0;
        const char* first = line.data();
        const char* last = line.data() + line.size();
        const auto [ptr, ec] = std::from_chars(first, last, w);
        if (ec != std::errc{} || ptr == first || !(w > 0))
            throw Error("snapshot wealth line " + std::to_string(i + 1) + " invalid");
        snap.population.wealths.push_back(w);
    }
    snap.population.total_wealth = std::accumulate(
        snap.population.wealths.begin(), snap.population.wealths.end(), 0.0);
    return snap;
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open snapshot file '" + path.string() + "'");
    return read_snapshot(in);
}

} // namespace aexch
