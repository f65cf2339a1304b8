#include "prw/stable_proc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "prw/numerics.hpp"
#include "prw/scaling_laws.hpp"

namespace prw {

using num::pi;

StableParams StableParams::limit_law(double alpha, double beta)
{
    StableParams p{alpha, alpha == 1.0 || alpha == 2.0 ? 0.0 : beta, std::pow(stable_scale(alpha), 1.0 / alpha)};
    p.validate();
    return p;
}

void StableParams::validate() const
{
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw std::invalid_argument("stable: alpha must lie in (0,2]");
    if (!(beta >= -1.0 && beta <= 1.0))
        throw std::invalid_argument("stable: beta must lie in [-1,1]");
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("stable: scale must be > 0");
    if (alpha == 1.0 && beta != 0.0)
        throw std::invalid_argument("stable: alpha = 1 requires beta = 0 (strict stability)");
}

std::complex<double> stable_log_char(const StableParams& p, double u)
{
    if (u == 0.0)
        return 0.0;
    const double mag = std::pow(p.scale * std::abs(u), p.alpha);
    if (p.alpha == 2.0 || p.alpha == 1.0)
        return -mag;
    const double sgn = u > 0 ? 1.0 : -1.0;
    return {-mag, mag * p.beta * sgn * std::tan(0.5 * pi * p.alpha)};
}

double sample_stable(const StableParams& p, Rng& rng)
{
    if (p.alpha == 2.0)
        return p.scale * std::sqrt(2.0) * rng.normal();
    const double v = pi * (rng.uniform_open() - 0.5);
    if (p.alpha == 1.0)
        return p.scale * std::tan(v);
    const double w = rng.exponential();
    const double a = p.alpha;
    const double t = p.beta * std::tan(0.5 * pi * a);
    const double b = std::atan(t) / a;
    const double s = std::pow(1.0 + t * t, 0.5 / a);
    const double x = s * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a)
                   * std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
    return p.scale * x;
}

namespace {

// Standard (unit scale) S1 CDF by Zolotarev's integral, x > 0 branch plus reflection.
double zolotarev_cdf(double x, double a, double beta)
{
    const double theta0 = std::atan(beta * std::tan(0.5 * pi * a)) / a;
    if (x == 0.0)
        return (0.5 * pi - theta0) / pi;
    if (x < 0.0)
        return 1.0 - zolotarev_cdf(-x, a, -beta);
    const double e = a / (a - 1.0);
    const double log_head = std::log(std::cos(a * theta0)) / (a - 1.0);
    const double log_x = e * std::log(x);
    auto integrand = [&](double th) {
        const double sn = std::sin(a * (theta0 + th));
        const double cs = std::cos(th);
        const double c2 = std::cos(a * theta0 + (a - 1.0) * th);
        if (sn <= 0.0)
            return a > 1.0 ? 0.0 : 1.0;
        if (cs <= 0.0)
            return a > 1.0 ? 1.0 : 0.0;
        if (c2 <= 0.0)
            return 1.0;
        const double logv = log_head + e * (std::log(cs) - std::log(sn)) + std::log(c2) - std::log(cs);
        return std::exp(-std::exp(log_x + logv));
    };
    const double lo = -theta0;
    const double hi = 0.5 * pi;
    const double integral = hi > lo ? num::integrate(integrand, lo, hi, 1e-12) : 0.0;
    const double c1 = a < 1.0 ? (0.5 * pi - theta0) / pi : 1.0;
    return c1 + (a < 1.0 ? 1.0 : -1.0) * integral / pi;
}

} // namespace

double stable_cdf(const StableParams& p, double x)
{
    p.validate();
    const double z = x / p.scale;
    if (p.alpha == 2.0)
        return 0.5 * std::erfc(-z / 2.0);
    if (p.alpha == 1.0)
        return 0.5 + std::atan(z) / pi;
    return std::clamp(zolotarev_cdf(z, p.alpha, p.beta), 0.0, 1.0);
}

double sample_positive_stable(double alpha, Rng& rng)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("positive stable: alpha must lie in (0,1)");
    const double u = pi * rng.uniform_open();
    const double e = rng.exponential();
    return std::sin(alpha * u) / std::pow(std::sin(u), 1.0 / alpha)
         * std::pow(std::sin((1.0 - alpha) * u) / e, (1.0 - alpha) / alpha);
}

SubordinatorPath::SubordinatorPath(double alpha, double t_max, double epsilon, double levy_scale,
                                   std::vector<double> times, std::vector<double> sizes)
    : alpha_(alpha), t_max_(t_max), epsilon_(epsilon), drift_(subordinator_drift(alpha, epsilon, levy_scale)),
      times_(std::move(times)), sizes_(std::move(sizes))
{
    if (times_.size() != sizes_.size())
        throw std::invalid_argument("subordinator: jump times and sizes differ in length");
    after_.reserve(times_.size());
    double cum = 0.0;
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (i > 0 && times_[i] < times_[i - 1])
            throw std::invalid_argument("subordinator: jump times must be sorted");
        cum += sizes_[i];
        after_.push_back(drift_ * times_[i] + cum);
    }
}

double SubordinatorPath::value(double u) const
{
    if (!(u >= 0.0) || u > t_max_)
        throw std::out_of_range("subordinator: time outside [0, t_max]");
    const auto k = static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), u) - times_.begin());
    if (k == 0)
        return drift_ * u;
    return after_[k - 1] + drift_ * (u - times_[k - 1]);
}

double default_epsilon(double alpha, double t_max)
{
    return 1e-6 * std::pow(t_max, 1.0 / alpha);
}

double subordinator_drift(double alpha, double epsilon, double levy_scale)
{
    return levy_scale * alpha * std::pow(epsilon, 1.0 - alpha) / (1.0 - alpha);
}

namespace {

void check_subordinator_args(double alpha, double epsilon, const SubordinatorOptions& opts)
{
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("subordinator: alpha must lie in (0,1)");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("subordinator: epsilon must be > 0");
    if (!(opts.levy_scale > 0.0))
        throw std::invalid_argument("subordinator: levy_scale must be > 0");
}

} // namespace

SubordinatorPath subordinator_path(double alpha, double t_max, double epsilon, Rng& rng,
                                   const SubordinatorOptions& opts)
{
    check_subordinator_args(alpha, epsilon, opts);
    if (!(t_max >= 0.0))
        throw std::invalid_argument("subordinator: t_max must be >= 0");
    const double rate = opts.levy_scale * std::pow(epsilon, -alpha);
    if (rate * t_max > static_cast<double>(opts.max_jumps))
        throw std::length_error("subordinator: expected jump count exceeds the memory cap; increase epsilon");
    std::vector<double> times, sizes;
    double t = rng.exponential() / rate;
    while (t <= t_max) {
        times.push_back(t);
        sizes.push_back(epsilon * std::pow(rng.uniform_pos(), -1.0 / alpha));
        t += rng.exponential() / rate;
    }
    return SubordinatorPath(alpha, t_max, epsilon, opts.levy_scale, std::move(times), std::move(sizes));
}

SubordinatorPath subordinator_path_until(double alpha, double level, double epsilon, Rng& rng,
                                         const SubordinatorOptions& opts)
{
    check_subordinator_args(alpha, epsilon, opts);
    if (!(level > 0.0))
        throw std::invalid_argument("subordinator: level must be > 0");
    const double rate = opts.levy_scale * std::pow(epsilon, -alpha);
    const double drift = subordinator_drift(alpha, epsilon, opts.levy_scale);
    std::vector<double> times, sizes;
    double t = 0.0;
    double T = 0.0;
    double t_max = 0.0;
    for (;;) {
        const double dt = rng.exponential() / rate;
        const double before = T + drift * dt;
        if (before >= level) {
            t_max = t + (level - T) / drift;
            break;
        }
        t += dt;
        const double j = epsilon * std::pow(rng.uniform_pos(), -1.0 / alpha);
        times.push_back(t);
        sizes.push_back(j);
        T = before + j;
        if (T > level) {
            t_max = t;
            break;
        }
        if (times.size() > opts.max_jumps)
            throw std::length_error("subordinator: jump count exceeds the memory cap; increase epsilon");
    }
    return SubordinatorPath(alpha, t_max, epsilon, opts.levy_scale, std::move(times), std::move(sizes));
}

namespace {

void check_grid(const std::vector<double>& grid)
{
    for (std::size_t i = 0; i < grid.size(); ++i)
        if (!(grid[i] >= 0.0) || (i > 0 && grid[i] < grid[i - 1]))
            throw std::invalid_argument("path grid must be sorted and nonnegative");
}

} // namespace

std::vector<double> brownian_path(const std::vector<double>& grid, Rng& rng)
{
    check_grid(grid);
    std::vector<double> out;
    double prev = 0.0, v = 0.0;
    for (double t : grid) {
        v += std::sqrt(t - prev) * rng.normal();
        out.push_back(v);
        prev = t;
    }
    return out;
}

std::vector<double> cauchy_path(const std::vector<double>& grid, Rng& rng)
{
    check_grid(grid);
    std::vector<double> out;
    double prev = 0.0, v = 0.0;
    for (double t : grid) {
        v += 0.5 * pi * (t - prev) * std::tan(pi * (rng.uniform_open() - 0.5));
        out.push_back(v);
        prev = t;
    }
    return out;
}

} // namespace prw
