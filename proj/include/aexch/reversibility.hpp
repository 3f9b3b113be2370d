#pragma once

#include <cstddef>
#include <vector>

#include "aexch/returns.hpp"

namespace aexch {

/// Transition rate density W[(x-rho, z) -> (x, z-rho)]:
///   theta(z-(x-rho)) (1/(x-rho)) pi(rho/(x-rho))
/// + theta((x-rho)-z) (1/z) pi(-rho/z).
/// Requires x - rho > 0 and z > 0; regime boundaries (equal wealths)
/// contribute nothing. Continuous distributions only.
double forward_rate(const ReturnDistribution& dist, double x, double z, double rho);

/// Transition rate density W[(x, z-rho) -> (x-rho, z)]:
///   theta((z-rho)-x) (1/x) pi(-rho/x)
/// + theta(x-(z-rho)) (z/(z-rho)^2) pi(rho/(z-rho)).
/// Requires x > 0 and z - rho > 0.
double backward_rate(const ReturnDistribution& dist, double x, double z, double rho);

/// Reduced detailed-balance conditions in kappa form (the first and fourth
/// regime conditions): (1/(1-kappa)) pi(kappa/(1-kappa)) and
/// (1/(1-kappa)^2) pi(kappa/(1-kappa)). Their ratio 1/(1-kappa) != 1 is why
/// the conditions are only compatible at kappa = 0.
double reduced_condition_first(const ReturnDistribution& dist, double kappa);
double reduced_condition_fourth(const ReturnDistribution& dist, double kappa);

struct KernelSample {
    double x = 0, z = 0, rho = 0;
    double forward = 0, backward = 0;
    double violation = 0;
};

struct ViolationOptions {
    std::size_t wealth_points = 9;  ///< log lattice over [wealth_lo, wealth_hi]
    double wealth_lo = 1e-2;
    double wealth_hi = 1e2;
    std::size_t kappa_points = 25;  ///< interior quantile levels of pi
    double quantile_margin = 0.02;  ///< keep this much mass away from each edge
};

struct ViolationReport {
    double max_violation = 0.0;
    std::vector<KernelSample> samples;
};

/// Maximum relative detailed-balance violation
/// |forward - backward| / (forward + backward) over a sample covering all
/// four regime conditions. Atomic distributions are compared atom by atom
/// under the regime change of variables (deltas cannot be compared
/// pointwise). Bounded away from zero for every non-degenerate distribution;
/// tends to zero only as the support concentrates at kappa = 0.
ViolationReport violation(const ReturnDistribution& dist,
                          const ViolationOptions& options = {});

} // namespace aexch
