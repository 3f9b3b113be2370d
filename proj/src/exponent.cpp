#include "aexch/exponent.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "aexch/errors.hpp"

namespace aexch {

namespace {

constexpr double critical_band = 1e-12;
constexpr double root_tol = 1e-12;
constexpr double bracket_cap = 1e4;

bool has_negative_support(const ReturnDistribution& dist) {
    if (dist.atomic()) {
        for (const Atom& a : dist.atoms())
            if (a.weight > 0 && a.kappa < 0) return true;
        return false;
    }
    return dist.support_lo() < 0;
}

} // namespace

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::stable: return "Stable";
    case Phase::condensing: return "Condensing";
    case Phase::critical: return "Critical";
    }
    return "?";
}

ExponentReport solve_exponent(const ReturnDistribution& dist) {
    const GainMoments m = moments(dist);
    ExponentReport rep;
    rep.log_gain_mean = m.log_gain_mean;
    rep.first_order =
        m.log_gain_sq_mean > 0 ? 2.0 * m.log_gain_mean / m.log_gain_sq_mean : 0.0;

    if (std::abs(m.log_gain_mean) <= critical_band) {
        rep.phase = Phase::critical;
        rep.exponent = 0.0;
        return rep;
    }
    if (m.log_gain_mean < 0) {
        rep.phase = Phase::condensing;
        return rep;
    }

    rep.phase = Phase::stable;
    if (!has_negative_support(dist)) {
        // g(T) is strictly decreasing: the poor agent never loses and only
        // the sentinel makes sense.
        rep.exponent = std::numeric_limits<double>::infinity();
        rep.no_negative_support = true;
        return rep;
    }

    auto g = [&](double T) { return generalized_moment(dist, T); };

    // g(0) = 1 and g'(0) = -<ln(1+kappa)> < 0, so g dips below one and, being
    // convex, crosses back exactly once. Expand the upper edge geometrically.
    double hi = 1.0;
    double ghi = g(hi);
    while (ghi <= 1.0 && hi < bracket_cap) {
        hi *= 2.0;
        ghi = g(hi);
    }
    if (ghi <= 1.0) {
        rep.exponent = std::numeric_limits<double>::infinity();
        rep.no_negative_support = true;
        return rep;
    }
    double lo = std::min(1e-6, 0.5 * hi);
    double glo = g(lo);
    while (glo >= 1.0 && lo > 1e-300) {
        lo /= 16.0;
        glo = g(lo);
    }
    if (glo >= 1.0)
        throw Error("solve_exponent: failed to bracket the root");

    // Verified sign change; refine by bisection with a secant pick when it
    // stays inside the bracket.
    double best = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        double mid = lo + (hi - lo) * (1.0 - glo) / (ghi - glo);
        if (!(mid > lo && mid < hi)) mid = 0.5 * (lo + hi);
        const double gmid = g(mid);
        best = mid;
        if (std::abs(gmid - 1.0) <= root_tol) break;
        if (gmid < 1.0) {
            lo = mid;
            glo = gmid;
        } else {
            hi = mid;
            ghi = gmid;
        }
        if (hi - lo <= 1e-15 * hi) {
            best = 0.5 * (lo + hi);
            break;
        }
    }
    rep.exponent = best;
    return rep;
}

double yard_sale_critical_p(double f) {
    if (!(f > 0.0 && f < 1.0))
        throw std::domain_error("yard_sale_critical_p: f must lie in (0, 1)");
    return -std::log1p(-f) / (std::log1p(f) - std::log1p(-f));
}

double flat_interface_residual(double a, double b) {
    if (!(a > -1.0 && a < b && b < 1.0))
        throw std::domain_error("flat_interface_residual: need -1 < a < b < 1");
    return (1.0 + b) * std::log1p(b) - (1.0 + a) * std::log1p(a) - (b - a);
}

std::pair<double, double> flat_t1_parameterization(double z) {
    constexpr double z_max = 4.9215;
    if (!(z >= 1.0 && z <= z_max))
        throw std::domain_error("flat_t1_parameterization: z must lie in [1, 4.9215]");
    const double u = z - 1.0;
    if (u == 0.0) return {0.0, 0.0};
    double ratio; // ln z / (z - 1)
    if (u < 1e-8)
        ratio = 1.0 - 0.5 * u + u * u / 3.0;
    else
        ratio = std::log1p(u) / u;
    const double a = ratio - 1.0;
    const double b = z * ratio - 1.0;
    return {a, b};
}

double GammaApprox::density(double w) const {
    if (w < 0) return 0.0;
    if (w == 0.0) {
        if (exponent > 1.0) return 0.0;
        if (exponent == 1.0) return amplitude;
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(std::log(amplitude) + (exponent - 1.0) * std::log(w) -
                    w / scale);
}

GammaApprox gamma_approx(double T) {
    if (!(T > 0.0)) throw std::domain_error("gamma_approx: T must be positive");
    GammaApprox g;
    g.exponent = T;
    g.amplitude = std::exp(T * std::lgamma(T + 1.0) - (T + 1.0) * std::lgamma(T));
    g.scale = std::exp(std::lgamma(T) - std::lgamma(T + 1.0));
    return g;
}

} // namespace aexch
