#pragma once

#include <optional>
#include <utility>

#include "aexch/returns.hpp"

namespace aexch {

enum class Phase { stable, condensing, critical };

const char* phase_name(Phase p);

/// Result of solving <(1+kappa)^(-T)> = 1 for the small-wealth exponent T.
struct ExponentReport {
    Phase phase = Phase::critical;
    /// The positive root T when it exists. Absent in the condensing phase;
    /// +infinity when pi has no mass on kappa < 0 (see no_negative_support).
    std::optional<double> exponent;
    /// Lowest-order approximation 2<ln(1+kappa)>/<ln^2(1+kappa)>.
    double first_order = 0.0;
    double log_gain_mean = 0.0;
    /// Set when pi has no mass on kappa < 0, where the moment is strictly
    /// decreasing in T and no finite root exists.
    bool no_negative_support = false;
};

/// Phase classification and exponent for the given return distribution.
/// The critical band is |<ln(1+kappa)>| <= 1e-12; in the stable phase the
/// root is bracketed (expanding the upper edge geometrically up to T=1e4)
/// and refined to |<(1+kappa)^(-T)> - 1| <= 1e-12.
ExponentReport solve_exponent(const ReturnDistribution& dist);

/// Yard-Sale critical probability p_c(f) = -ln(1-f)/ln((1+f)/(1-f));
/// condensation occurs for p < p_c. Requires 0 < f < 1.
double yard_sale_critical_p(double f);

/// Interface residual for a flat return distribution on [a, b]:
/// ln((1+b)^(1+b)/(1+a)^(1+a)) - (b-a). Zero on the condensation interface,
/// positive in the stable phase.
double flat_interface_residual(double a, double b);

/// The one-parameter family of flat distributions with T = 1:
/// a = ln z/(z-1) - 1, b = z ln z/(z-1) - 1, for z in [1, 4.9215]
/// (z -> 1 gives a = b = 0).
std::pair<double, double> flat_t1_parameterization(double z);

/// Gamma-shaped approximation a w^(T-1) e^(-w/b) with the amplitude and
/// scale fixed so the zeroth and first moments both equal one.
struct GammaApprox {
    double exponent = 1.0;  ///< T
    double amplitude = 1.0; ///< Gamma(T+1)^T / Gamma(T)^(T+1)
    double scale = 1.0;     ///< Gamma(T)/Gamma(T+1)

    double density(double w) const;
};

GammaApprox gamma_approx(double T);

} // namespace aexch
