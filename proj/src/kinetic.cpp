#include "aexch/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

#include "aexch/detail/linear_fit.hpp"
#include "aexch/detail/threads.hpp"
#include "aexch/errors.hpp"
#include "aexch/exponent.hpp"
#include "aexch/quadrature.hpp"

namespace aexch {

namespace {

constexpr double kappa_quad_tol = 5e-10;
constexpr double inner_quad_tol = 5e-11;

template <class Body>
void parallel_for(std::size_t count, const Body& body) {
    const std::size_t workers = detail::worker_count(count / 64 + 1);
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < count; i += workers) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Integrals of the cubic Hermite basis over [0, t] (unit interval):
//   h00 = 2t^3-3t^2+1, h10 = t^3-2t^2+t, h01 = -2t^3+3t^2, h11 = t^3-t^2
double herm_int_00(double t) { return 0.5 * t * t * t * t - t * t * t + t; }
double herm_int_10(double t) {
    return 0.25 * t * t * t * t - (2.0 / 3.0) * t * t * t + 0.5 * t * t;
}
double herm_int_01(double t) { return -0.5 * t * t * t * t + t * t * t; }
double herm_int_11(double t) {
    return 0.25 * t * t * t * t - (1.0 / 3.0) * t * t * t;
}

} // namespace

WealthGrid make_grid(const GridSpec& spec) {
    if (!(spec.toe_end > 0 && spec.w_max > spec.toe_end))
        throw std::invalid_argument("make_grid: need 0 < toe_end < w_max");
    if (spec.nodes < 64) throw std::invalid_argument("make_grid: too few nodes");

    // nodes(r) = toe/(toe*(r-1)) + ln(w_max/toe)/ln r; solve for the ratio.
    const double span = std::log(spec.w_max / spec.toe_end);
    auto count_for = [&](double ratio) {
        return 1.0 / (ratio - 1.0) + span / std::log(ratio);
    };
    double lo = 1.0 + 1e-6, hi = 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (count_for(mid) > static_cast<double>(spec.nodes) ? lo : hi) = mid;
    }
    const double ratio = 0.5 * (lo + hi);

    WealthGrid grid;
    const auto linear_nodes = static_cast<std::size_t>(std::ceil(1.0 / (ratio - 1.0)));
    grid.nodes.reserve(spec.nodes + 16);
    for (std::size_t i = 0; i < linear_nodes; ++i)
        grid.nodes.push_back(spec.toe_end * static_cast<double>(i) /
                             static_cast<double>(linear_nodes));
    double w = spec.toe_end;
    while (w < spec.w_max) {
        grid.nodes.push_back(w);
        w *= ratio;
    }
    grid.nodes.push_back(spec.w_max);
    grid.values.assign(grid.nodes.size(), 0.0);
    return grid;
}

GridFunction::GridFunction(std::span<const double> nodes,
                           std::span<const double> values)
    : x_(nodes.begin(), nodes.end()), y_(values.begin(), values.end()) {
    const std::size_t n = x_.size();
    if (n < 4 || y_.size() != n)
        throw std::invalid_argument("GridFunction: need >= 4 matching nodes/values");

    // Fritsch-Carlson monotone cubic slopes: no overshoot, so nonnegative
    // data stays nonnegative.
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        if (!(h[i] > 0)) throw std::invalid_argument("GridFunction: nodes not increasing");
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    slope_.assign(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
            slope_[i] = 0.0;
        } else {
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            slope_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    auto endpoint = [&](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0)
            m = 0.0;
        else if ((d0 > 0) != (d1 > 0) && std::abs(m) > 3.0 * std::abs(d0))
            m = 3.0 * d0;
        return m;
    };
    slope_[0] = endpoint(h[0], h[1], d[0], d[1]);
    slope_[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);

    // Exponential tail fitted over the last decade of nodes with positive P.
    const double tail_from = x_.back() / 10.0;
    std::vector<double> tx, ty;
    for (std::size_t i = 0; i < n; ++i)
        if (x_[i] >= tail_from && y_[i] > 0.0) {
            tx.push_back(x_[i]);
            ty.push_back(std::log(y_[i]));
        }
    double rate = 0.0;
    if (tx.size() >= 3) rate = -detail::linear_fit(tx, ty).slope;
    tail_rate_ = rate > 1e-12 ? rate : 1e300; // non-decaying data: cut the tail
    tail_mass_ = y_.back() > 0.0 ? y_.back() / tail_rate_ : 0.0;

    // Exact integrals of each Hermite piece, accumulated from the top so
    // upper_[i] = P_>(x_i).
    upper_.assign(n, 0.0);
    upper_[n - 1] = tail_mass_;
    double first = tail_mass_ > 0.0 ? tail_mass_ * (x_.back() + 1.0 / tail_rate_) : 0.0;
    for (std::size_t i = n - 1; i-- > 0;) {
        const double hi = h[i];
        const double piece = hi * (0.5 * (y_[i] + y_[i + 1]) +
                                   hi * (slope_[i] - slope_[i + 1]) / 12.0);
        upper_[i] = upper_[i + 1] + piece;
        // first moment of the piece: x_i * piece + h^2 * int t * p(t) dt
        const double tmom = y_[i] * (3.0 / 20.0) + hi * slope_[i] / 30.0 +
                            y_[i + 1] * (7.0 / 20.0) - hi * slope_[i + 1] / 20.0;
        first += x_[i] * piece + hi * hi * tmom;
    }
    total_mass_ = upper_[0];
    first_moment_ = first;
}

std::size_t GridFunction::piece(double w) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), w);
    const std::size_t i = static_cast<std::size_t>(it - x_.begin());
    return std::min(std::max<std::size_t>(i, 1) - 1, x_.size() - 2);
}

double GridFunction::value(double w) const {
    if (w <= x_.front()) return y_.front();
    if (w >= x_.back()) {
        if (y_.back() == 0.0) return 0.0;
        const double e = tail_rate_ * (w - x_.back());
        return e > 700.0 ? 0.0 : y_.back() * std::exp(-e);
    }
    const std::size_t i = piece(w);
    const double h = x_[i + 1] - x_[i];
    const double t = (w - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return y_[i] * (2.0 * t3 - 3.0 * t2 + 1.0) +
           slope_[i] * h * (t3 - 2.0 * t2 + t) + y_[i + 1] * (-2.0 * t3 + 3.0 * t2) +
           slope_[i + 1] * h * (t3 - t2);
}

double GridFunction::piece_integral_to(std::size_t i, double w) const {
    const double h = x_[i + 1] - x_[i];
    const double t = (w - x_[i]) / h;
    return h * (y_[i] * herm_int_00(t) + slope_[i] * h * herm_int_10(t) +
                y_[i + 1] * herm_int_01(t) + slope_[i + 1] * h * herm_int_11(t));
}

double GridFunction::upper_mass(double w) const {
    if (w <= x_.front()) return total_mass_;
    if (w >= x_.back()) {
        if (tail_mass_ == 0.0) return 0.0;
        const double e = tail_rate_ * (w - x_.back());
        return e > 700.0 ? 0.0 : tail_mass_ * std::exp(-e);
    }
    const std::size_t i = piece(w);
    return upper_[i] - piece_integral_to(i, w);
}

namespace {

// One evaluation of the stationary RHS at a single wealth.
class RhsEvaluator {
public:
    RhsEvaluator(const GridFunction& p, const ReturnDistribution& dist)
        : p_(p), dist_(dist) {}

    double operator()(double w) const {
        if (dist_.atomic()) {
            double acc = 0.0;
            for (const Atom& a : dist_.atoms())
                if (a.weight > 0) acc += a.weight * contribution(w, a.kappa);
            return acc;
        }
        auto integrand = [&](double k) {
            const double pi = dist_.density(k);
            return pi == 0.0 ? 0.0 : pi * contribution(w, k);
        };
        const auto r =
            integrate_adaptive(integrand, dist_.support_lo(), dist_.support_hi(),
                               dist_.breakpoints(), kappa_quad_tol, 600);
        return r.value;
    }

private:
    double contribution(double w, double k) const {
        const double gain = 1.0 + k;
        const double u = w / gain;
        double total = p_.value(u) * p_.upper_mass(u) / gain;

        // integral over trades with poorer agents; the upper limit can pass
        // the grid top for k > 0, where the integrand rides the fitted tail
        const double limit = w / (1.0 - k);
        double v_hi = limit;
        const double tail_cut = p_.top() + 35.0 / std::max(0.1, tail_rate());
        v_hi = std::min(v_hi, tail_cut);
        if (v_hi > 0.0) {
            auto inner = [&](double v) { return p_.value(v) * p_.value(w + v * k); };
            double breaks[2];
            std::size_t nb = 0;
            if (p_.top() > 0 && p_.top() < v_hi) breaks[nb++] = p_.top();
            if (k > 0) {
                const double cross = (p_.top() - w) / k;
                if (cross > 0 && cross < v_hi) breaks[nb++] = cross;
            }
            const auto r = integrate_adaptive(inner, 0.0, v_hi,
                                              std::span<const double>(breaks, nb),
                                              inner_quad_tol, 400);
            total += r.value;
        }
        return total;
    }

    double tail_rate() const { return p_.tail_rate() < 1e290 ? p_.tail_rate() : 1.0; }

    const GridFunction& p_;
    const ReturnDistribution& dist_;
};

} // namespace

WealthGrid apply_stationary_rhs(const WealthGrid& grid, const ReturnDistribution& dist) {
    const GridFunction p(grid.nodes, grid.values);
    const RhsEvaluator rhs(p, dist);

    WealthGrid out;
    out.nodes = grid.nodes;
    out.values.assign(grid.nodes.size(), 0.0);
    parallel_for(grid.nodes.size(),
                 [&](std::size_t i) { out.values[i] = rhs(grid.nodes[i]); });
    out.tail_mass = GridFunction(out.nodes, out.values).tail_mass();
    return out;
}

FixedPointResult solve_fixed_point(const ReturnDistribution& dist, const GridSpec& spec,
                                   std::size_t max_iters, double tol, double damping) {
    const ExponentReport rep = solve_exponent(dist);
    if (rep.phase != Phase::stable)
        throw PhaseError(std::string("solve_fixed_point: distribution is in the ") +
                         phase_name(rep.phase) +
                         " phase (log gain mean = " + std::to_string(rep.log_gain_mean) +
                         "); no stationary density exists");
    if (!rep.exponent || !std::isfinite(*rep.exponent))
        throw PhaseError(
            "solve_fixed_point: no finite small-wealth exponent (pi has no mass on "
            "kappa < 0)");
    const double T = *rep.exponent;

    WealthGrid grid = make_grid(spec);
    const GammaApprox init = gamma_approx(T);
    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        grid.values[i] = init.density(grid.nodes[i]);
    if (!std::isfinite(grid.values[0])) grid.values[0] = grid.values[1];

    FixedPointResult result;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        const WealthGrid rhs = apply_stationary_rhs(grid, dist);

        double residual = 0.0;
        for (std::size_t i = 0; i < grid.values.size(); ++i)
            residual = std::max(residual, std::abs(rhs.values[i] - grid.values[i]));
        result.residuals.push_back(residual);
        result.iterations = iter + 1;
        if (residual < tol) {
            result.converged = true;
            break;
        }

        for (std::size_t i = 0; i < grid.values.size(); ++i)
            grid.values[i] = (1.0 - damping) * grid.values[i] + damping * rhs.values[i];

        // Renormalize both moments: P(w) <- (mu/m0) P(mu w) maps the iterate
        // back to the unit-mass, unit-mean representative of its scale family.
        const GridFunction gf(grid.nodes, grid.values);
        const double m0 = gf.mass();
        const double mu = gf.first_moment() / m0;
        if (!(m0 > 0) || !(mu > 0))
            throw ConvergenceError("solve_fixed_point: iterate lost positivity",
                                   result.residuals);
        std::vector<double> renorm(grid.values.size());
        for (std::size_t i = 0; i < grid.nodes.size(); ++i)
            renorm[i] = (mu / m0) * gf.value(mu * grid.nodes[i]);
        grid.values = std::move(renorm);
    }
    if (!result.converged)
        throw ConvergenceError(
            "solve_fixed_point: no convergence after " + std::to_string(max_iters) +
                " iterations (last residual " +
                std::to_string(result.residuals.back()) + ")",
            result.residuals);

    grid.tail_mass = GridFunction(grid.nodes, grid.values).tail_mass();
    result.grid = std::move(grid);
    return result;
}

double exponential_condition_residual(const ReturnDistribution& dist, double w) {
    if (!(w >= 0))
        throw std::domain_error("exponential_condition_residual: w must be >= 0");
    auto term = [w](double k) {
        const double gain = 1.0 + k;
        const double loss = 1.0 - k;
        return (std::exp(-w * loss / gain) - std::exp(-w * gain / loss) + 1.0) / gain;
    };
    if (dist.atomic()) {
        double acc = 0.0;
        for (const Atom& a : dist.atoms()) acc += a.weight * term(a.kappa);
        return acc - 1.0;
    }
    auto integrand = [&](double k) {
        const double pi = dist.density(k);
        return pi == 0.0 ? 0.0 : pi * term(k);
    };
    return integrate_or_throw(integrand, dist.support_lo(), dist.support_hi(),
                              dist.breakpoints(), 1e-13,
                              "exponential_condition_residual") -
           1.0;
}

std::pair<double, double> moment_drift(const WealthGrid& grid,
                                       const ReturnDistribution& dist) {
    const GridFunction p(grid.nodes, grid.values);
    const WealthGrid rhs = apply_stationary_rhs(grid, dist);
    const GridFunction r(rhs.nodes, rhs.values);
    // the loss term of the time-derivative operator is -P, so the drift
    // moments are the gain moments minus the moments of P itself
    return {r.mass() - p.mass(), r.first_moment() - p.first_moment()};
}

} // namespace aexch
