#include "aexch/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "aexch/detail/linear_fit.hpp"
#include "aexch/errors.hpp"
#include "aexch/exponent.hpp"

namespace aexch {

double WealthHistogram::center(std::size_t i) const {
    return std::sqrt(edges[i] * edges[i + 1]);
}

double WealthHistogram::width(std::size_t i) const {
    return edges[i + 1] - edges[i];
}

WealthHistogram histogram(std::span<const double> wealths, std::size_t bins,
                          std::optional<std::pair<double, double>> range) {
    if (wealths.empty()) throw std::invalid_argument("histogram: no samples");
    if (bins < 1) throw std::invalid_argument("histogram: need at least one bin");
    for (double w : wealths)
        if (!(w > 0)) throw std::invalid_argument("histogram: wealths must be positive");

    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
        if (!(lo > 0 && hi > lo))
            throw std::invalid_argument("histogram: need 0 < range.lo < range.hi");
    } else {
        const auto [mn, mx] = std::minmax_element(wealths.begin(), wealths.end());
        lo = *mn;
        hi = *mx;
        if (hi == lo) hi = lo * (1.0 + 1e-12);
    }
    // nudge the top edge so the maximum lands inside the last bin
    hi *= 1.0 + 1e-12;

    std::vector<double> edges(bins + 1);
    const double log_lo = std::log(lo);
    const double log_step = (std::log(hi) - log_lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i <= bins; ++i)
        edges[i] = std::exp(log_lo + log_step * static_cast<double>(i));
    edges.front() = lo;
    edges.back() = hi;

    std::vector<std::size_t> counts(bins, 0);
    std::size_t included = 0;
    for (double w : wealths) {
        if (w < lo || w >= hi) continue;
        auto it = std::upper_bound(edges.begin(), edges.end(), w);
        const std::size_t idx = static_cast<std::size_t>(it - edges.begin()) - 1;
        ++counts[std::min(idx, bins - 1)];
        ++included;
    }
    if (range && included == 0)
        throw Error("histogram: the requested range excludes all samples");

    std::size_t first = 0;
    while (first < bins && counts[first] == 0) ++first;
    std::size_t last = bins;
    while (last > first && counts[last - 1] == 0) --last;

    WealthHistogram hist;
    hist.total_count = wealths.size();
    hist.counts.assign(counts.begin() + first, counts.begin() + last);
    hist.edges.assign(edges.begin() + first, edges.begin() + last + 1);
    hist.density.resize(hist.counts.size());
    for (std::size_t i = 0; i < hist.counts.size(); ++i)
        hist.density[i] = static_cast<double>(hist.counts[i]) /
                          (static_cast<double>(hist.total_count) * hist.width(i));
    return hist;
}

std::vector<double> rescaled_to_unit_mean(std::span<const double> wealths) {
    const double mean =
        std::accumulate(wealths.begin(), wealths.end(), 0.0) /
        static_cast<double>(wealths.size());
    if (!(mean > 0)) throw std::invalid_argument("rescale: mean must be positive");
    std::vector<double> out(wealths.begin(), wealths.end());
    for (double& w : out) w /= mean;
    return out;
}

namespace {

constexpr std::size_t min_fit_bins = 5;
constexpr std::size_t min_bin_count = 10;

SlopeFit fit_bins(const WealthHistogram& hist, std::size_t first, std::size_t last) {
    std::vector<double> x, y, w;
    for (std::size_t i = first; i < last; ++i) {
        x.push_back(std::log(hist.center(i)));
        y.push_back(std::log(hist.density[i]));
        w.push_back(static_cast<double>(hist.counts[i])); // Poisson: var(ln) = 1/count
    }
    const auto lf = detail::weighted_linear_fit(x, y, w);
    SlopeFit fit;
    fit.slope = lf.slope;
    fit.intercept = lf.intercept;
    fit.std_error = lf.slope_stderr;
    fit.w_lo = hist.edges[first];
    fit.w_hi = hist.edges[last];
    fit.bins_used = last - first;
    return fit;
}

} // namespace

SlopeFit small_w_exponent(const WealthHistogram& hist) {
    constexpr double toe_cap = 0.3;
    const std::size_t n = hist.counts.size();
    auto admissible = [&](std::size_t i) {
        return hist.counts[i] >= min_bin_count && hist.center(i) <= toe_cap;
    };

    // Lowest contiguous admissible run spanning at most one decade; slide the
    // start up if a run comes up short.
    std::size_t best_first = 0, best_len = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!admissible(s)) continue;
        const double limit = std::min(10.0 * hist.center(s), toe_cap);
        std::size_t e = s;
        while (e < n && admissible(e) && hist.center(e) <= limit) ++e;
        const std::size_t len = e - s;
        if (len > best_len) {
            best_len = len;
            best_first = s;
        }
        if (len >= min_fit_bins) break; // take the lowest decade that qualifies
    }
    if (best_len < min_fit_bins)
        throw InsufficientDataError(
            "small_w_exponent: fewer than 5 admissible bins below w=0.3; "
            "increase the sample size");
    return fit_bins(hist, best_first, best_first + best_len);
}

SlopeFit central_decades_slope(const WealthHistogram& hist, double decades) {
    const std::size_t n = hist.counts.size();
    if (n == 0) throw InsufficientDataError("central_decades_slope: empty histogram");
    const double mid = std::sqrt(hist.center(0) * hist.center(n - 1));
    const double half = std::pow(10.0, 0.5 * decades);
    const double lo = mid / half;
    const double hi = mid * half;

    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = hist.center(i);
        if (c < lo || c > hi || hist.counts[i] < min_bin_count) continue;
        first = std::min(first, i);
        last = std::max(last, i + 1);
    }
    if (first >= last || last - first < min_fit_bins)
        throw InsufficientDataError(
            "central_decades_slope: fewer than 5 admissible bins in the central "
            "window");
    // contiguity: drop under-occupied bins inside the window from both ends only
    while (first < last && hist.counts[first] < min_bin_count) ++first;
    while (last > first && hist.counts[last - 1] < min_bin_count) --last;
    return fit_bins(hist, first, last);
}

CondensingReport condensing_checks(const RankProfile& profile, double phi, double t) {
    if (!(phi > 0))
        throw std::domain_error("condensing_checks: phi must be positive");

    CondensingReport report;
    report.slope_theory = -t * phi;

    std::vector<double> r, lnw;
    for (std::size_t i = 0; i < profile.rank.size(); ++i) {
        const double rr = profile.rank[i];
        if (rr < report.fit_r_lo || rr > report.fit_r_hi) continue;
        const double w = profile.wealth[i];
        if (!(w > 0) || !std::isfinite(w))
            throw InsufficientDataError(
                "condensing_checks: mid-rank wealths degenerate (condensation "
                "complete); measure at an earlier time");
        r.push_back(rr);
        lnw.push_back(std::log(w));
    }
    if (r.size() < 10)
        throw InsufficientDataError(
            "condensing_checks: too few mid-rank agents; measure at an earlier time");
    report.mid_rank_slope = detail::linear_fit(r, lnw).slope;

    const double span = std::log10(profile.wealth.front()) -
                        std::log10(profile.wealth.back());
    const std::size_t bins =
        std::max<std::size_t>(16, static_cast<std::size_t>(4.0 * span));
    const auto hist = histogram(profile.wealth, bins);
    const auto pw = central_decades_slope(hist, 2.0);
    report.pw_slope = pw.slope;
    report.pw_w_lo = pw.w_lo;
    report.pw_w_hi = pw.w_hi;
    return report;
}

GammaDistance gamma_comparison(const WealthHistogram& hist, double T) {
    const GammaApprox g = gamma_approx(T);
    GammaDistance d;
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        const double diff = std::abs(hist.density[i] - g.density(hist.center(i)));
        d.sup_distance = std::max(d.sup_distance, diff);
        d.l1_distance += diff * hist.width(i);
    }
    return d;
}

double gini(std::span<const double> wealths) {
    const std::size_t n = wealths.size();
    if (n == 0) throw std::invalid_argument("gini: no samples");
    std::vector<double> sorted(wealths.begin(), wealths.end());
    std::sort(sorted.begin(), sorted.end());
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weighted += static_cast<double>(i + 1) * sorted[i];
        total += sorted[i];
    }
    const double nn = static_cast<double>(n);
    return 2.0 * weighted / (nn * total) - (nn + 1.0) / nn;
}

double kolmogorov_distance_exp(std::span<const double> wealths) {
    const std::size_t n = wealths.size();
    if (n == 0) throw std::invalid_argument("kolmogorov_distance_exp: no samples");
    std::vector<double> sorted(wealths.begin(), wealths.end());
    std::sort(sorted.begin(), sorted.end());
    double dist = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = -std::expm1(-sorted[i]);
        const double below = static_cast<double>(i) / static_cast<double>(n);
        const double above = static_cast<double>(i + 1) / static_cast<double>(n);
        dist = std::max({dist, cdf - below, above - cdf});
    }
    return dist;
}

} // namespace aexch
