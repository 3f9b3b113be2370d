#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace aexch::detail {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
};

/// Weighted least squares y ~ intercept + slope * x. Weights are inverse
/// variances; the slope standard error assumes they are calibrated.
inline LinearFit weighted_linear_fit(std::span<const double> x,
                                     std::span<const double> y,
                                     std::span<const double> w) {
    double sw = 0, swx = 0, swy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sw += w[i];
        swx += w[i] * x[i];
        swy += w[i] * y[i];
    }
    const double xbar = swx / sw;
    const double ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - xbar;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (y[i] - ybar);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.slope_stderr = std::sqrt(1.0 / sxx);
    return fit;
}

inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    thread_local std::vector<double> ones;
    ones.assign(x.size(), 1.0);
    return weighted_linear_fit(x, y, ones);
}

} // namespace aexch::detail
