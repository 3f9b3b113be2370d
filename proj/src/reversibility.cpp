#include "aexch/reversibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aexch/errors.hpp"

namespace aexch {

double forward_rate(const ReturnDistribution& dist, double x, double z, double rho) {
    if (!(x - rho > 0) || !(z > 0))
        throw std::domain_error("forward_rate: need x - rho > 0 and z > 0");
    double rate = 0.0;
    if (z > x - rho) rate += dist.density(rho / (x - rho)) / (x - rho);
    if (x - rho > z) rate += dist.density(-rho / z) / z;
    return rate;
}

double backward_rate(const ReturnDistribution& dist, double x, double z, double rho) {
    if (!(x > 0) || !(z - rho > 0))
        throw std::domain_error("backward_rate: need x > 0 and z - rho > 0");
    double rate = 0.0;
    if (z - rho > x) rate += dist.density(-rho / x) / x;
    if (x > z - rho) rate += dist.density(rho / (z - rho)) * z / ((z - rho) * (z - rho));
    return rate;
}

double reduced_condition_first(const ReturnDistribution& dist, double kappa) {
    const double mapped = kappa / (1.0 - kappa);
    if (std::abs(mapped) >= 1.0) return 0.0;
    return dist.density(mapped) / (1.0 - kappa);
}

double reduced_condition_fourth(const ReturnDistribution& dist, double kappa) {
    const double mapped = kappa / (1.0 - kappa);
    if (std::abs(mapped) >= 1.0) return 0.0;
    return dist.density(mapped) / ((1.0 - kappa) * (1.0 - kappa));
}

namespace {

double rel_violation(double a, double b) {
    const double sum = a + b;
    return sum > 0 ? std::abs(a - b) / sum : 0.0;
}

struct RhoAtom {
    double rho;
    double mass;
};

// Compare two atomic measures on rho, pairing atoms by sorted position. A
// position mismatch counts like a mass mismatch (relative scale), so a pure
// shift of the atoms still registers as a violation.
double atomic_measure_violation(std::vector<RhoAtom> lhs, std::vector<RhoAtom> rhs) {
    auto by_rho = [](const RhoAtom& a, const RhoAtom& b) { return a.rho < b.rho; };
    std::sort(lhs.begin(), lhs.end(), by_rho);
    std::sort(rhs.begin(), rhs.end(), by_rho);
    if (lhs.size() != rhs.size()) return 1.0;
    double v = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double pos = std::abs(lhs[i].rho - rhs[i].rho) /
                           (std::abs(lhs[i].rho) + std::abs(rhs[i].rho) + 1e-300);
        v = std::max(v, std::max(rel_violation(lhs[i].mass, rhs[i].mass), pos));
    }
    return v;
}

// The four regime conditions for atomic pi, each reduced to a comparison of
// two atom measures on rho (the delta weights pick up the Jacobian of the
// regime's change of variables).
void atomic_violation(const ReturnDistribution& dist, ViolationReport& report) {
    std::vector<Atom> atoms;
    for (const Atom& a : dist.atoms())
        if (a.weight > 0) atoms.push_back(a);
    if (atoms.empty()) throw Error("violation: distribution has no mass");

    auto record = [&](double x, double z, std::vector<RhoAtom> f,
                      std::vector<RhoAtom> b) {
        const double v = atomic_measure_violation(f, b);
        for (std::size_t i = 0; i < f.size(); ++i)
            report.samples.push_back({x, z, f[i].rho, f[i].mass,
                                      i < b.size() ? b[i].mass : 0.0, v});
        report.max_violation = std::max(report.max_violation, v);
    };

    const double x = 1.0;
    {
        // condition 1 (z > x + |rho|): forward atoms at k x/(1+k) with mass
        // p/(1+k); backward atoms at -k x with mass p
        std::vector<RhoAtom> f, b;
        for (const Atom& a : atoms) {
            f.push_back({a.kappa * x / (1.0 + a.kappa), a.weight / (1.0 + a.kappa)});
            b.push_back({-a.kappa * x, a.weight});
        }
        record(x, 8.0 * x, std::move(f), std::move(b));
    }
    {
        // condition 2 (|z - x| < rho, rho > 0) at z = x: positions coincide,
        // masses p/(1+k) vs p
        std::vector<RhoAtom> f, b;
        for (const Atom& a : atoms) {
            if (a.kappa <= 0) continue;
            f.push_back({a.kappa * x / (1.0 + a.kappa), a.weight / (1.0 + a.kappa)});
            b.push_back({a.kappa * x / (1.0 + a.kappa), a.weight});
        }
        if (!f.empty()) record(x, x, std::move(f), std::move(b));
    }
    {
        // condition 3 (rho < 0, |z - x| < |rho|): equal masses but the atom
        // positions scale with z vs x
        double f_min = 1.0;
        for (const Atom& a : atoms)
            if (a.kappa > 0) f_min = std::min(f_min, a.kappa);
        if (f_min < 1.0) {
            const double z = x * (1.0 - 0.5 * f_min);
            std::vector<RhoAtom> f, b;
            for (const Atom& a : atoms) {
                if (a.kappa <= 0) continue;
                f.push_back({-a.kappa * z, a.weight});
                b.push_back({-a.kappa * x, a.weight});
            }
            if (!f.empty()) record(x, z, std::move(f), std::move(b));
        }
    }
    {
        // condition 4 (z < x - |rho|): forward atoms at -k z with mass p;
        // backward atoms at k z/(1+k) with mass p
        const double z = x / 8.0;
        std::vector<RhoAtom> f, b;
        for (const Atom& a : atoms) {
            f.push_back({-a.kappa * z, a.weight});
            b.push_back({a.kappa * z / (1.0 + a.kappa), a.weight});
        }
        record(x, z, std::move(f), std::move(b));
    }
}

} // namespace

ViolationReport violation(const ReturnDistribution& dist,
                          const ViolationOptions& options) {
    ViolationReport report;
    if (dist.atomic()) {
        atomic_violation(dist, report);
        return report;
    }

    std::vector<double> kappas;
    for (std::size_t i = 0; i < options.kappa_points; ++i) {
        const double q = options.quantile_margin +
                         (1.0 - 2.0 * options.quantile_margin) * static_cast<double>(i) /
                             static_cast<double>(options.kappa_points - 1);
        const double k = dist.quantile(q);
        if (dist.density(k) > 0) kappas.push_back(k);
    }
    std::vector<double> xs;
    for (std::size_t i = 0; i < options.wealth_points; ++i)
        xs.push_back(options.wealth_lo *
                     std::pow(options.wealth_hi / options.wealth_lo,
                              static_cast<double>(i) /
                                  static_cast<double>(options.wealth_points - 1)));

    std::size_t effective = 0;
    auto probe = [&](double x, double z, double rho) {
        if (!(x - rho > 0) || !(z - rho > 0) || !(z > 0) || !(x > 0)) return;
        const double f = forward_rate(dist, x, z, rho);
        const double b = backward_rate(dist, x, z, rho);
        if (f + b <= 0) return;
        ++effective;
        const double v = rel_violation(f, b);
        report.samples.push_back({x, z, rho, f, b, v});
        report.max_violation = std::max(report.max_violation, v);
    };

    for (double x : xs) {
        for (double k : kappas) {
            const double rho_pair = k * x / (1.0 + k); // forward arg = k exactly
            // condition 1: much richer partner
            probe(x, 4.0 * x * (1.0 + std::abs(k)), rho_pair);
            // condition 2: near-equal wealths, rho > 0
            if (k > 0)
                for (double theta : {-0.5, 0.0, 0.5})
                    probe(x, x + theta * rho_pair, rho_pair);
            // condition 3: near-equal wealths, rho < 0
            if (k < 0)
                for (double theta : {-0.5, 0.0, 0.5})
                    probe(x, x + theta * rho_pair, rho_pair);
            // condition 4: much poorer partner (forward branch arg = k)
            const double z = x / 4.0;
            probe(x, z, -k * z);
        }
    }
    if (effective == 0)
        throw Error("violation: every sampled rate vanished; distribution support "
                    "may be degenerate");
    return report;
}

} // namespace aexch
