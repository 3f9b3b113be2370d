#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "aexch/returns.hpp"

namespace aexch {

/// Wealth grid for the stationary kinetic equation: a linear toe on
/// [0, toe_end] (resolving the w^(T-1) behavior) continued geometrically up
/// to w_max, sized to roughly `nodes` points.
struct GridSpec {
    std::size_t nodes = 2000;
    double toe_end = 0.1;
    double w_max = 30.0;
};

/// Discretized P(w): values at strictly increasing nodes starting at w=0,
/// plus the mass carried by the fitted exponential tail beyond the last node.
struct WealthGrid {
    std::vector<double> nodes;
    std::vector<double> values;
    double tail_mass = 0.0;
};

WealthGrid make_grid(const GridSpec& spec);

/// Monotone-cubic interpolant of grid data with an exponential upper tail
/// fitted on the last decade of nodes. Provides P, the upper cumulative
/// P_>(w), and exact moments of the interpolant.
class GridFunction {
public:
    GridFunction(std::span<const double> nodes, std::span<const double> values);

    double value(double w) const;
    double upper_mass(double w) const; ///< integral of P from w to infinity
    double mass() const { return total_mass_; }
    double first_moment() const { return first_moment_; }
    double tail_mass() const { return tail_mass_; }
    double tail_rate() const { return tail_rate_; } ///< decay rate of the tail
    double top() const { return x_.back(); }

private:
    std::size_t piece(double w) const;
    double piece_integral_to(std::size_t i, double w) const;

    std::vector<double> x_, y_, slope_;
    std::vector<double> upper_; ///< P_>(x_i)
    double tail_rate_ = 0.0;
    double tail_mass_ = 0.0;
    double total_mass_ = 0.0;
    double first_moment_ = 0.0;
};

/// Right-hand side of the stationary kinetic equation evaluated at every
/// node: the pi-average of P(w/(1+k)) P_>(w/(1+k))/(1+k) plus the integral
/// term over trades with poorer agents. Off-node values use the monotone
/// cubic interpolant; values beyond the grid use the exponential tail.
WealthGrid apply_stationary_rhs(const WealthGrid& grid, const ReturnDistribution& dist);

struct FixedPointResult {
    WealthGrid grid;
    std::vector<double> residuals; ///< sup-norm fixed-point residual per iteration
    std::size_t iterations = 0;
    bool converged = false;
};

/// Damped fixed-point iteration P <- (1-damping) P + damping RHS(P), with
/// both moments renormalized each iteration (the fixed point is degenerate
/// under wealth rescaling; the mean-1 representative is returned). Starts
/// from the gamma-shaped approximation at the solved exponent. Refuses
/// condensing-phase distributions.
FixedPointResult solve_fixed_point(const ReturnDistribution& dist,
                                   const GridSpec& spec = {},
                                   std::size_t max_iters = 400, double tol = 1e-8,
                                   double damping = 0.5);

/// Residual of the exponential-solution sufficiency condition at wealth w:
/// <(e^(-w(1-k)/(1+k)) - e^(-w(1+k)/(1-k)) + 1)/(1+k)> - 1.
double exponential_condition_residual(const ReturnDistribution& dist, double w);

/// Zeroth and first moments of the time-derivative operator applied to the
/// grid; both vanish (within quadrature tolerance) for any density, since
/// trades conserve agent number and total wealth.
std::pair<double, double> moment_drift(const WealthGrid& grid,
                                       const ReturnDistribution& dist);

} // namespace aexch
