#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "aexch/rng.hpp"

namespace aexch {

enum class DistKind { binary, flat, kelly_mixture, tabulated };

/// One (position, density) node of a piecewise-linear density.
struct Knot {
    double x = 0.0;
    double density = 0.0;
};

/// One point mass of an atomic distribution.
struct Atom {
    double kappa = 0.0;
    double weight = 0.0;
};

struct GainMoments {
    double log_gain_mean = 0.0;    ///< <ln(1+kappa)>
    double log_gain_sq_mean = 0.0; ///< <ln^2(1+kappa)>
    double mean_return = 0.0;      ///< <kappa>

    /// Condensing-phase decay rate, -<ln(1+kappa)>.
    double phi() const { return -log_gain_mean; }
};

/// Distribution pi(kappa) of per-trade returns. Support is kept strictly
/// inside (-1, 1) so both agents stay solvent after every trade; the
/// constructors reject |kappa| >= 1 - 1e-9 to keep downstream logs and powers
/// finite. Values are immutable after construction and safe to share across
/// threads.
class ReturnDistribution {
public:
    /// Yard-Sale bet: kappa = +f with probability p, -f with probability 1-p.
    static ReturnDistribution binary(double p, double f);

    /// Uniform density 1/(b-a) on [a, b], -1 < a < b < 1.
    static ReturnDistribution flat(double a, double b);

    /// pi(kappa) = ((1+kappa)/2) * weight(|kappa|) for a piecewise-linear
    /// weight on [0, 1]; the weight is renormalized at construction.
    static ReturnDistribution kelly_mixture(std::vector<Knot> weight);

    /// Piecewise-linear density between the given knots; renormalized at
    /// construction.
    static ReturnDistribution tabulated(std::vector<Knot> knots);

    DistKind kind() const { return kind_; }
    bool atomic() const { return kind_ == DistKind::binary; }

    /// Point masses (binary only).
    const std::vector<Atom>& atoms() const;

    /// Density at kappa (continuous kinds only; zero outside the support).
    double density(double kappa) const;

    /// Inverse CDF (continuous kinds only), q in [0, 1].
    double quantile(double q) const;

    double support_lo() const { return support_lo_; }
    double support_hi() const { return support_hi_; }

    /// Panel edges for quadrature over the support (continuous kinds).
    const std::vector<double>& breakpoints() const { return breakpoints_; }

    /// One draw with law pi. Uses a fixed number of stream draws per call
    /// (two for kelly_mixture, one otherwise) so snapshots can replay.
    double sample(RngStream& rng) const;

    // Parameter accessors for the closed-form kinds.
    double binary_p() const;
    double binary_f() const;
    double flat_a() const;
    double flat_b() const;

    /// Weight knots in f-space (kelly_mixture only).
    const std::vector<Knot>& mixture_weight() const;

private:
    ReturnDistribution() = default;

    DistKind kind_ = DistKind::binary;
    double p_ = 0.0, f_ = 0.0; // binary
    double a_ = 0.0, b_ = 0.0; // flat
    std::vector<Atom> atoms_;
    std::vector<Knot> knots_;       // tabulated density, or mixture weight in f
    std::vector<double> cum_mass_;  // cumulative mass at knots_ positions
    std::vector<double> breakpoints_;
    double support_lo_ = 0.0, support_hi_ = 0.0;

    friend GainMoments moments(const ReturnDistribution&);
    friend double generalized_moment(const ReturnDistribution&, double);
};

/// <ln(1+kappa)>, <ln^2(1+kappa)>, <kappa>. Closed forms for binary and flat;
/// adaptive quadrature to 1e-12 absolute otherwise.
GainMoments moments(const ReturnDistribution& dist);

/// <(1+kappa)^(-T)>. Closed forms for binary and flat (the T=1 limit of the
/// flat formula is taken analytically); quadrature otherwise. Throws
/// OverflowError when the support edge nearest -1 would overflow the power.
double generalized_moment(const ReturnDistribution& dist, double T);

namespace detail {
/// Quadrature route for the moments, defined for the continuous kinds; used
/// to cross-check the closed forms.
GainMoments moments_by_quadrature(const ReturnDistribution& dist);
double generalized_moment_by_quadrature(const ReturnDistribution& dist, double T);
} // namespace detail

/// Parses a distribution spec string as used in config files:
///   binary p=<real> f=<real>
///   flat a=<real> b=<real>
///   kelly-mixture file=<path>
///   tabulated file=<path>
/// File paths are resolved against base_dir when relative. Tabulated files
/// are two-column CSV (header required, strictly increasing first column).
ReturnDistribution parse_distribution_spec(
    std::string_view spec, const std::filesystem::path& base_dir = {});

} // namespace aexch
