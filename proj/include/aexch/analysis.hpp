#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "aexch/engine.hpp"

namespace aexch {

/// Log-binned wealth histogram. density[i] estimates P over bin i as
/// count/(total_input * bin width); leading and trailing empty bins are
/// trimmed.
struct WealthHistogram {
    std::vector<double> edges; ///< geometric bin edges, size counts.size()+1
    std::vector<std::size_t> counts;
    std::vector<double> density;
    std::size_t total_count = 0; ///< input sample size

    double center(std::size_t i) const; ///< geometric bin center
    double width(std::size_t i) const;
};

/// Geometric binning over [range.lo, range.hi] (defaults to the data range).
/// All wealths must be positive; an explicit range that excludes every
/// sample is an error.
WealthHistogram histogram(std::span<const double> wealths, std::size_t bins,
                          std::optional<std::pair<double, double>> range = {});

/// Copy of the wealths rescaled to mean one (for comparisons against
/// unit-mean theory curves).
std::vector<double> rescaled_to_unit_mean(std::span<const double> wealths);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double std_error = 0.0;
    double w_lo = 0.0; ///< fit window
    double w_hi = 0.0;
    std::size_t bins_used = 0;
};

/// Least-squares fit of log density vs log w over the lowest admissible
/// sub-decade below w = 0.3 (bins need count >= 10; at least 5 bins). The
/// slope estimates T - 1. Poisson-weighted in log space.
SlopeFit small_w_exponent(const WealthHistogram& hist);

/// Log-log slope over the central `decades` decades of the occupied bins,
/// same admissibility rules as small_w_exponent.
SlopeFit central_decades_slope(const WealthHistogram& hist, double decades = 2.0);

struct CondensingReport {
    double mid_rank_slope = 0.0;  ///< fitted d(ln w)/dr over r in [0.2, 0.8]
    double slope_theory = 0.0;    ///< -t*phi
    double pw_slope = 0.0;        ///< histogram log-log slope, central 2 decades
    double fit_r_lo = 0.2, fit_r_hi = 0.8;
    double pw_w_lo = 0.0, pw_w_hi = 0.0;
};

/// Condensing-phase checks of a rank profile against w(r,t) ~ e^(-r t phi)
/// and P(w) ~ 1/w. t is the rank-law time (interactions per agent).
CondensingReport condensing_checks(const RankProfile& profile, double phi, double t);

struct GammaDistance {
    double sup_distance = 0.0;
    double l1_distance = 0.0;
};

/// Distance between a (mean-1 rescaled) histogram and the gamma-shaped
/// approximation with exponent T. Reported, not judged: the gamma form is
/// approximate except in special cases.
GammaDistance gamma_comparison(const WealthHistogram& hist, double T);

/// Standard Gini inequality index in [0, 1].
double gini(std::span<const double> wealths);

/// Kolmogorov distance of the samples to the unit-mean exponential CDF
/// 1 - e^(-w).
double kolmogorov_distance_exp(std::span<const double> wealths);

} // namespace aexch
