#include "aexch/returns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "aexch/errors.hpp"
#include "aexch/quadrature.hpp"

namespace aexch {

namespace {

constexpr double support_clamp = 1.0 - 1e-9;
constexpr double moment_tol = 1e-12;

double parse_real(std::string_view text, const std::string& what) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("invalid number '" + std::string(text) + "' for " + what, what);
    return value;
}

// Mass of a piecewise-linear density between consecutive knots (exact
// trapezoid) and the running cumulative.
std::vector<double> cumulative_mass(const std::vector<Knot>& knots) {
    std::vector<double> cum(knots.size(), 0.0);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double h = knots[i + 1].x - knots[i].x;
        cum[i + 1] = cum[i] + 0.5 * (knots[i].density + knots[i + 1].density) * h;
    }
    return cum;
}

void validate_knots(const std::vector<Knot>& knots, const char* what) {
    if (knots.size() < 2)
        throw std::invalid_argument(std::string(what) + ": need at least two knots");
    for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!std::isfinite(knots[i].x) || !std::isfinite(knots[i].density))
            throw std::invalid_argument(std::string(what) + ": non-finite knot");
        if (knots[i].density < 0)
            throw std::invalid_argument(std::string(what) + ": negative density");
        if (i > 0 && !(knots[i].x > knots[i - 1].x))
            throw std::invalid_argument(std::string(what) +
                                        ": knot positions must be strictly increasing");
    }
}

void normalize_knots(std::vector<Knot>& knots, const char* what) {
    auto cum = cumulative_mass(knots);
    const double total = cum.back();
    if (!(total > 0))
        throw std::invalid_argument(std::string(what) + ": zero total mass");
    for (auto& k : knots) k.density /= total;
}

// Positive-mass extent of a piecewise-linear density.
std::pair<double, double> positive_extent(const std::vector<Knot>& knots) {
    std::size_t lo = 0;
    while (lo + 1 < knots.size() && knots[lo].density == 0 && knots[lo + 1].density == 0)
        ++lo;
    std::size_t hi = knots.size() - 1;
    while (hi > 0 && knots[hi].density == 0 && knots[hi - 1].density == 0) --hi;
    return {knots[lo].x, knots[hi].x};
}

double pwl_density_at(const std::vector<Knot>& knots, double x) {
    if (knots.empty() || x < knots.front().x || x > knots.back().x) return 0.0;
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const Knot& k) { return v < k.x; });
    if (it == knots.begin()) return knots.front().density;
    if (it == knots.end()) return knots.back().density;
    const Knot& k1 = *it;
    const Knot& k0 = *(it - 1);
    const double t = (x - k0.x) / (k1.x - k0.x);
    return k0.density + t * (k1.density - k0.density);
}

// Inverse CDF of a piecewise-linear density: the segment CDF is quadratic and
// inverted in closed form (stable citardauq branch).
double pwl_inverse_cdf(const std::vector<Knot>& knots,
                       const std::vector<double>& cum, double u) {
    if (u <= 0) return knots.front().x;
    if (u >= cum.back()) return knots.back().x;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t i = static_cast<std::size_t>(it - cum.begin()) - 1;
    const double h = knots[i + 1].x - knots[i].x;
    const double d0 = knots[i].density;
    const double slope = (knots[i + 1].density - d0) / h;
    const double m = u - cum[i];
    const double disc = std::max(d0 * d0 + 2.0 * slope * m, 0.0);
    const double denom = d0 + std::sqrt(disc);
    const double xi = denom > 0 ? 2.0 * m / denom : 0.0;
    return knots[i].x + std::min(xi, h);
}

// Partial integrals of a piecewise-linear density up to x: mass and first
// moment, both in closed form.
double pwl_partial_mass(const std::vector<Knot>& knots,
                        const std::vector<double>& cum, double x) {
    if (x <= knots.front().x) return 0.0;
    if (x >= knots.back().x) return cum.back();
    auto it = std::upper_bound(knots.begin(), knots.end(), x,
                               [](double v, const Knot& k) { return v < k.x; });
    const std::size_t i = static_cast<std::size_t>(it - knots.begin()) - 1;
    const double h = knots[i + 1].x - knots[i].x;
    const double d0 = knots[i].density;
    const double slope = (knots[i + 1].density - d0) / h;
    const double xi = x - knots[i].x;
    return cum[i] + d0 * xi + 0.5 * slope * xi * xi;
}

double pwl_partial_first_moment(const std::vector<Knot>& knots, double x) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double x0 = knots[i].x;
        const double x1 = std::min(knots[i + 1].x, x);
        if (!(x1 > x0)) break;
        const double h = knots[i + 1].x - x0;
        const double d0 = knots[i].density;
        const double slope = (knots[i + 1].density - d0) / h;
        const double xi = x1 - x0;
        // integral of t*(d0 + slope*(t-x0)) over [x0, x1]
        acc += d0 * (x1 * x1 - x0 * x0) / 2.0 +
               slope * (xi * xi * (x0 / 2.0 + xi / 3.0));
        if (x1 < knots[i + 1].x) break;
    }
    return acc;
}

// Power-series coefficients of ln(1+x) and ln^2(1+x); used for flat moments
// when the support is narrow and the closed forms would cancel.
constexpr int series_terms = 14;

double flat_power_moment(double a, double b, int k) {
    // <kappa^k> = (b^{k+1}-a^{k+1})/((k+1)(b-a)), written as the finite sum
    // b^k + b^{k-1} a + ... + a^k to avoid the cancelling difference.
    double num = 0.0;
    for (int i = 0; i <= k; ++i)
        num += std::pow(b, k - i) * std::pow(a, i);
    return num / (k + 1);
}

} // namespace

ReturnDistribution ReturnDistribution::binary(double p, double f) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("binary: p must lie in [0, 1]");
    if (!(f >= 0.0) || f >= support_clamp)
        throw std::invalid_argument("binary: f must lie in [0, 1) clear of the endpoint");
    ReturnDistribution d;
    d.kind_ = DistKind::binary;
    d.p_ = p;
    d.f_ = f;
    if (f == 0.0) {
        d.atoms_ = {{0.0, 1.0}};
        d.support_lo_ = d.support_hi_ = 0.0;
    } else {
        d.atoms_ = {{f, p}, {-f, 1.0 - p}};
        d.support_lo_ = (p < 1.0) ? -f : f;
        d.support_hi_ = (p > 0.0) ? f : -f;
    }
    return d;
}

ReturnDistribution ReturnDistribution::flat(double a, double b) {
    if (!(a < b))
        throw std::invalid_argument("flat: need a < b");
    if (!(a > -support_clamp && b < support_clamp))
        throw std::invalid_argument("flat: support must stay strictly inside (-1, 1)");
    ReturnDistribution d;
    d.kind_ = DistKind::flat;
    d.a_ = a;
    d.b_ = b;
    d.support_lo_ = a;
    d.support_hi_ = b;
    d.breakpoints_ = {a, b};
    return d;
}

ReturnDistribution ReturnDistribution::kelly_mixture(std::vector<Knot> weight) {
    validate_knots(weight, "kelly_mixture");
    if (weight.front().x < 0.0 || weight.back().x > 1.0)
        throw std::invalid_argument("kelly_mixture: weight knots must lie in [0, 1]");
    normalize_knots(weight, "kelly_mixture");
    const auto [flo, fhi] = positive_extent(weight);
    if (fhi >= support_clamp)
        throw std::invalid_argument(
            "kelly_mixture: weight support must stay strictly below 1");
    ReturnDistribution d;
    d.kind_ = DistKind::kelly_mixture;
    d.knots_ = std::move(weight);
    d.cum_mass_ = cumulative_mass(d.knots_);
    d.cum_mass_.back() = 1.0;
    d.support_lo_ = -fhi;
    d.support_hi_ = fhi;
    (void)flo;
    for (auto it = d.knots_.rbegin(); it != d.knots_.rend(); ++it)
        d.breakpoints_.push_back(-it->x);
    for (const auto& k : d.knots_) d.breakpoints_.push_back(k.x);
    return d;
}

ReturnDistribution ReturnDistribution::tabulated(std::vector<Knot> knots) {
    validate_knots(knots, "tabulated");
    if (!(knots.front().x > -support_clamp && knots.back().x < support_clamp))
        throw std::invalid_argument(
            "tabulated: knots must stay strictly inside (-1, 1)");
    normalize_knots(knots, "tabulated");
    ReturnDistribution d;
    d.kind_ = DistKind::tabulated;
    d.knots_ = std::move(knots);
    d.cum_mass_ = cumulative_mass(d.knots_);
    d.cum_mass_.back() = 1.0;
    const auto [lo, hi] = positive_extent(d.knots_);
    d.support_lo_ = lo;
    d.support_hi_ = hi;
    for (const auto& k : d.knots_) d.breakpoints_.push_back(k.x);
    return d;
}

const std::vector<Atom>& ReturnDistribution::atoms() const {
    if (kind_ != DistKind::binary)
        throw Error("atoms(): distribution is not atomic");
    return atoms_;
}

double ReturnDistribution::density(double kappa) const {
    switch (kind_) {
    case DistKind::binary:
        throw Error("density(): atomic distribution has no density");
    case DistKind::flat:
        return (kappa >= a_ && kappa <= b_) ? 1.0 / (b_ - a_) : 0.0;
    case DistKind::kelly_mixture:
        if (std::abs(kappa) >= 1.0) return 0.0;
        return 0.5 * (1.0 + kappa) * pwl_density_at(knots_, std::abs(kappa));
    case DistKind::tabulated:
        return pwl_density_at(knots_, kappa);
    }
    return 0.0;
}

double ReturnDistribution::quantile(double q) const {
    if (!(q >= 0.0 && q <= 1.0))
        throw std::domain_error("quantile: q must lie in [0, 1]");
    switch (kind_) {
    case DistKind::binary:
        throw Error("quantile(): not defined for atomic distributions");
    case DistKind::flat:
        return a_ + q * (b_ - a_);
    case DistKind::tabulated:
        return pwl_inverse_cdf(knots_, cum_mass_, q);
    case DistKind::kelly_mixture: {
        // CDF(k) for k<0 is the mass of the negative branch above |k|;
        // monotone, so bisection suffices here.
        const double m1 = pwl_partial_first_moment(knots_, knots_.back().x);
        const double neg_total = 0.5 * (1.0 - m1);
        auto cdf = [&](double k) {
            if (k < 0) {
                const double f = -k;
                const double mass_above =
                    (cum_mass_.back() - pwl_partial_mass(knots_, cum_mass_, f)) -
                    (m1 - pwl_partial_first_moment(knots_, f));
                return 0.5 * mass_above;
            }
            return neg_total + 0.5 * (pwl_partial_mass(knots_, cum_mass_, k) +
                                      pwl_partial_first_moment(knots_, k));
        };
        double lo = support_lo_, hi = support_hi_;
        for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
            const double mid = 0.5 * (lo + hi);
            (cdf(mid) < q ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    }
    return 0.0;
}

double ReturnDistribution::sample(RngStream& rng) const {
    switch (kind_) {
    case DistKind::binary:
        return rng.next_unit() < p_ ? f_ : -f_;
    case DistKind::flat:
        return a_ + (b_ - a_) * rng.next_unit();
    case DistKind::tabulated:
        return pwl_inverse_cdf(knots_, cum_mass_, rng.next_unit());
    case DistKind::kelly_mixture: {
        const double f = pwl_inverse_cdf(knots_, cum_mass_, rng.next_unit());
        return rng.next_unit() < 0.5 * (1.0 + f) ? f : -f;
    }
    }
    return 0.0;
}

double ReturnDistribution::binary_p() const {
    if (kind_ != DistKind::binary) throw Error("binary_p(): wrong kind");
    return p_;
}

double ReturnDistribution::binary_f() const {
    if (kind_ != DistKind::binary) throw Error("binary_f(): wrong kind");
    return f_;
}

double ReturnDistribution::flat_a() const {
    if (kind_ != DistKind::flat) throw Error("flat_a(): wrong kind");
    return a_;
}

double ReturnDistribution::flat_b() const {
    if (kind_ != DistKind::flat) throw Error("flat_b(): wrong kind");
    return b_;
}

const std::vector<Knot>& ReturnDistribution::mixture_weight() const {
    if (kind_ != DistKind::kelly_mixture) throw Error("mixture_weight(): wrong kind");
    return knots_;
}

namespace {

// <h(kappa)> for a kelly mixture, integrated in f-space where the weight is
// piecewise linear: <h> = int w(f) [ (1+f)/2 h(f) + (1-f)/2 h(-f) ] df.
template <class H>
double kelly_average(const ReturnDistribution& d, const H& h, const char* context) {
    const auto& knots = d.mixture_weight();
    std::vector<double> breaks;
    for (const auto& k : knots) breaks.push_back(k.x);
    auto integrand = [&](double f) {
        const double w = pwl_density_at(knots, f);
        if (w == 0.0) return 0.0;
        return w * (0.5 * (1.0 + f) * h(f) + 0.5 * (1.0 - f) * h(-f));
    };
    return integrate_or_throw(integrand, knots.front().x, knots.back().x, breaks,
                              moment_tol, context);
}

template <class H>
double continuous_average(const ReturnDistribution& d, const H& h, const char* context) {
    if (d.kind() == DistKind::kelly_mixture) return kelly_average(d, h, context);
    auto integrand = [&](double k) { return d.density(k) * h(k); };
    return integrate_or_throw(integrand, d.support_lo(), d.support_hi(),
                              d.breakpoints(), moment_tol, context);
}

GainMoments flat_moments(double a, double b) {
    GainMoments m;
    m.mean_return = 0.5 * (a + b);
    const double scale = std::max(std::abs(a), std::abs(b));
    if (scale < 1e-2) {
        // Narrow support: the closed forms cancel, so sum the power series of
        // ln(1+x) and ln^2(1+x) against the exact flat power moments.
        double log_coeff[series_terms + 1] = {0.0};
        for (int k = 1; k <= series_terms; ++k)
            log_coeff[k] = (k % 2 == 1 ? 1.0 : -1.0) / k;
        double sq_coeff[series_terms + 1] = {0.0};
        for (int i = 1; i <= series_terms; ++i)
            for (int j = 1; j + i <= series_terms; ++j)
                sq_coeff[i + j] += log_coeff[i] * log_coeff[j];
        double lg = 0.0, lg2 = 0.0;
        for (int k = 1; k <= series_terms; ++k) {
            const double mk = flat_power_moment(a, b, k);
            lg += log_coeff[k] * mk;
            lg2 += sq_coeff[k] * mk;
        }
        m.log_gain_mean = lg;
        m.log_gain_sq_mean = lg2;
        return m;
    }
    const double la = std::log1p(a);
    const double lb = std::log1p(b);
    const double width = b - a;
    m.log_gain_mean = ((1.0 + b) * lb - (1.0 + a) * la) / width - 1.0;
    // antiderivative of ln^2(1+x): (1+x)(ln^2(1+x) - 2 ln(1+x) + 2)
    m.log_gain_sq_mean = ((1.0 + b) * (lb * lb - 2.0 * lb + 2.0) -
                          (1.0 + a) * (la * la - 2.0 * la + 2.0)) /
                         width;
    return m;
}

void check_power_overflow(double edge_lo, double edge_hi, double T) {
    const double llo = std::log1p(edge_lo);
    const double lhi = std::log1p(edge_hi);
    if (-T * llo > 700.0)
        throw OverflowError(
            "generalized_moment: (1+kappa)^(-T) overflows at the lower support edge "
            "kappa=" + std::to_string(edge_lo) + " for T=" + std::to_string(T));
    if (-T * lhi > 700.0)
        throw OverflowError(
            "generalized_moment: (1+kappa)^(-T) overflows at the upper support edge "
            "kappa=" + std::to_string(edge_hi) + " for T=" + std::to_string(T));
}

} // namespace

GainMoments moments(const ReturnDistribution& dist) {
    switch (dist.kind()) {
    case DistKind::binary: {
        GainMoments m;
        for (const Atom& a : dist.atoms()) {
            const double l = std::log1p(a.kappa);
            m.log_gain_mean += a.weight * l;
            m.log_gain_sq_mean += a.weight * l * l;
            m.mean_return += a.weight * a.kappa;
        }
        return m;
    }
    case DistKind::flat:
        return flat_moments(dist.flat_a(), dist.flat_b());
    default:
        return detail::moments_by_quadrature(dist);
    }
}

double generalized_moment(const ReturnDistribution& dist, double T) {
    if (!std::isfinite(T)) throw std::domain_error("generalized_moment: T must be finite");
    if (T == 0.0) return 1.0;
    check_power_overflow(dist.support_lo(), dist.support_hi(), T);
    switch (dist.kind()) {
    case DistKind::binary: {
        double g = 0.0;
        for (const Atom& a : dist.atoms())
            g += a.weight * std::exp(-T * std::log1p(a.kappa));
        return g;
    }
    case DistKind::flat: {
        // ((1+b)^(1-T) - (1+a)^(1-T)) / ((b-a)(1-T)), with the T=1 limit
        // ln((1+b)/(1+a))/(b-a) reached through expm1.
        const double a = dist.flat_a();
        const double b = dist.flat_b();
        const double s = 1.0 - T;
        const double d = std::log1p((b - a) / (1.0 + a));
        if (s == 0.0) return d / (b - a);
        return std::exp(s * std::log1p(a)) * std::expm1(s * d) / (s * (b - a));
    }
    default:
        return detail::generalized_moment_by_quadrature(dist, T);
    }
}

namespace detail {

GainMoments moments_by_quadrature(const ReturnDistribution& dist) {
    if (dist.atomic())
        throw Error("moments_by_quadrature: atomic distribution has no density");
    GainMoments m;
    m.log_gain_mean = continuous_average(
        dist, [](double k) { return std::log1p(k); }, "moments<ln(1+kappa)>");
    m.log_gain_sq_mean = continuous_average(
        dist,
        [](double k) {
            const double l = std::log1p(k);
            return l * l;
        },
        "moments<ln^2(1+kappa)>");
    m.mean_return =
        continuous_average(dist, [](double k) { return k; }, "moments<kappa>");
    return m;
}

double generalized_moment_by_quadrature(const ReturnDistribution& dist, double T) {
    if (dist.atomic())
        throw Error("generalized_moment_by_quadrature: atomic distribution");
    if (T == 0.0) return 1.0;
    check_power_overflow(dist.support_lo(), dist.support_hi(), T);
    return continuous_average(
        dist, [T](double k) { return std::exp(-T * std::log1p(k)); },
        "generalized_moment");
}

} // namespace detail

namespace {

std::vector<Knot> read_knot_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open distribution file '" + path.string() + "'",
                          "file");
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("empty distribution file '" + path.string() + "'", "file");
    // header required; not interpreted beyond requiring a non-numeric token
    std::vector<Knot> knots;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + " of '" +
                                  path.string() + "': expected two columns",
                              "file");
        Knot k;
        k.x = parse_real(std::string_view(line).substr(0, comma), "knot position");
        std::string_view rest = std::string_view(line).substr(comma + 1);
        while (!rest.empty() && (rest.back() == '\r' || rest.back() == ' '))
            rest.remove_suffix(1);
        k.density = parse_real(rest, "knot density");
        knots.push_back(k);
    }
    return knots;
}

} // namespace

ReturnDistribution parse_distribution_spec(std::string_view spec,
                                           const std::filesystem::path& base_dir) {
    std::istringstream in{std::string(spec)};
    std::string kind;
    in >> kind;
    if (kind.empty()) throw ConfigError("empty distribution spec", "dist");

    std::vector<std::pair<std::string, std::string>> kv;
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected key=value in distribution spec, got '" +
                                  token + "'",
                              "dist");
        kv.emplace_back(token.substr(0, eq), token.substr(eq + 1));
    }
    auto get = [&](const char* key) -> const std::string& {
        for (const auto& [k, v] : kv)
            if (k == key) return v;
        throw ConfigError("distribution spec '" + kind + "' is missing " + key, key);
    };

    if (kind == "binary")
        return ReturnDistribution::binary(parse_real(get("p"), "p"),
                                          parse_real(get("f"), "f"));
    if (kind == "flat")
        return ReturnDistribution::flat(parse_real(get("a"), "a"),
                                        parse_real(get("b"), "b"));
    if (kind == "kelly-mixture" || kind == "tabulated") {
        std::filesystem::path p = get("file");
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        auto knots = read_knot_csv(p);
        return kind == "tabulated" ? ReturnDistribution::tabulated(std::move(knots))
                                   : ReturnDistribution::kelly_mixture(std::move(knots));
    }
    throw ConfigError("unknown distribution kind '" + kind + "'", "dist");
}

} // namespace aexch
