#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "aexch/errors.hpp"

namespace aexch {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t panels = 0;
    bool converged = false;
};

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1, 1].
inline constexpr std::array<double, 8> gk_nodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
};
inline constexpr std::array<double, 8> kronrod_weights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr std::array<double, 4> gauss_weights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

template <class F>
void gauss_kronrod_15(const F& f, double lo, double hi, double& value,
                      double& error) {
    const double center = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    const double fc = f(center);
    double kronrod = kronrod_weights[7] * fc;
    double gauss = gauss_weights[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * gk_nodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kronrod_weights[i] * pair;
        if (i % 2 == 1) gauss += gauss_weights[i / 2] * pair;
    }
    value = kronrod * half;
    error = std::abs((kronrod - gauss) * half);
}

} // namespace detail

/// Adaptive Gauss-Kronrod integration of f over [lo, hi]. Initial panels are
/// split at the supplied breakpoints (panels never straddle one); the worst
/// panel is then bisected until the summed error estimate drops below abs_tol
/// or the panel budget runs out.
template <class F>
QuadratureResult integrate_adaptive(const F& f, double lo, double hi,
                                    std::span<const double> breakpoints = {},
                                    double abs_tol = 1e-12,
                                    std::size_t max_panels = 2000) {
    QuadratureResult out;
    if (!(hi > lo)) {
        out.converged = true;
        return out;
    }

    struct Panel {
        double lo, hi, value, error;
        bool operator<(const Panel& other) const { return error < other.error; }
    };

    std::vector<double> edges;
    edges.reserve(breakpoints.size() + 2);
    edges.push_back(lo);
    for (double b : breakpoints)
        if (b > lo && b < hi) edges.push_back(b);
    edges.push_back(hi);
    std::sort(edges.begin(), edges.end());

    std::vector<Panel> heap;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (!(edges[i + 1] > edges[i])) continue;
        Panel p{edges[i], edges[i + 1], 0.0, 0.0};
        detail::gauss_kronrod_15(f, p.lo, p.hi, p.value, p.error);
        total_error += p.error;
        heap.push_back(p);
        std::push_heap(heap.begin(), heap.end());
    }

    while (total_error > abs_tol && heap.size() < max_panels) {
        std::pop_heap(heap.begin(), heap.end());
        Panel worst = heap.back();
        heap.pop_back();
        total_error -= worst.error;

        const double mid = 0.5 * (worst.lo + worst.hi);
        if (!(mid > worst.lo && mid < worst.hi)) {
            // Interval no longer splittable in double precision.
            total_error += worst.error;
            heap.push_back(worst);
            std::push_heap(heap.begin(), heap.end());
            break;
        }
        for (const auto& [a, b] : {std::pair{worst.lo, mid}, std::pair{mid, worst.hi}}) {
            Panel p{a, b, 0.0, 0.0};
            detail::gauss_kronrod_15(f, p.lo, p.hi, p.value, p.error);
            total_error += p.error;
            heap.push_back(p);
            std::push_heap(heap.begin(), heap.end());
        }
    }

    double value = 0.0;
    double error = 0.0;
    for (const Panel& p : heap) {
        value += p.value;
        error += p.error;
    }
    out.value = value;
    out.error_estimate = error;
    out.panels = heap.size();
    out.converged = error <= abs_tol;
    return out;
}

/// Like integrate_adaptive but throws QuadratureError (with the achieved
/// tolerance) when the requested tolerance is not reached.
template <class F>
double integrate_or_throw(const F& f, double lo, double hi,
                          std::span<const double> breakpoints, double abs_tol,
                          const char* context, std::size_t max_panels = 2000) {
    const QuadratureResult r =
        integrate_adaptive(f, lo, hi, breakpoints, abs_tol, max_panels);
    if (!r.converged) {
        throw QuadratureError(std::string(context) +
                                  ": quadrature did not converge, achieved " +
                                  std::to_string(r.error_estimate) +
                                  " (requested " + std::to_string(abs_tol) + ")",
                              r.error_estimate);
    }
    return r.value;
}

} // namespace aexch
