#include "prw/numerics.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

namespace prw::num {

double gamma(double x)
{
    return boost::math::tgamma(x);
}

namespace {

constexpr std::uint64_t head_terms = 1024;

// Euler-Maclaurin correction terms for f(x) = x^{-s}: sum_j B_{2j}/(2j)! f^{(2j-1)}(x).
double em_derivative_terms(double s, double x)
{
    const double inv = 1.0 / x;
    const double fx = std::pow(x, -s);
    // f'(x), f'''(x), f^(5)(x), f^(7)(x)
    double d1 = -s * fx * inv;
    double d3 = -s * (s + 1) * (s + 2) * fx * inv * inv * inv;
    double d5 = d3 * (s + 3) * (s + 4) * inv * inv;
    double d7 = d5 * (s + 5) * (s + 6) * inv * inv;
    return d1 / 12.0 - d3 / 720.0 + d5 / 30240.0 - d7 / 1209600.0;
}

// integral of x^{-s} over [k, h]
double power_integral(double s, double k, double h)
{
    const double e = 1.0 - s;
    const double lr = std::log(h / k);
    if (std::abs(e * lr) < 1e-300)
        return lr * std::pow(k, e);
    return std::pow(k, e) * std::expm1(e * lr) / e;
}

} // namespace

double power_sum(double s, std::uint64_t lo, std::uint64_t hi)
{
    if (lo == 0)
        throw std::invalid_argument("power_sum: lo must be >= 1");
    if (hi < lo)
        return 0.0;
    double sum = 0.0;
    std::uint64_t k = lo;
    const std::uint64_t head_end = std::max(lo, head_terms);
    for (; k <= hi && k < head_end; ++k)
        sum += std::pow(static_cast<double>(k), -s);
    if (k > hi)
        return sum;
    const double kd = static_cast<double>(k);
    const double hd = static_cast<double>(hi);
    if (hi - k < 16) {
        for (; k <= hi; ++k)
            sum += std::pow(static_cast<double>(k), -s);
        return sum;
    }
    sum += power_integral(s, kd, hd) + 0.5 * (std::pow(kd, -s) + std::pow(hd, -s))
         + em_derivative_terms(s, hd) - em_derivative_terms(s, kd);
    return sum;
}

double power_sum_tail(double s, std::uint64_t lo)
{
    if (!(s > 1.0))
        throw std::invalid_argument("power_sum_tail: requires s > 1");
    if (lo == 0)
        throw std::invalid_argument("power_sum_tail: lo must be >= 1");
    double sum = 0.0;
    std::uint64_t k = lo;
    for (; k < std::max(lo, head_terms); ++k)
        sum += std::pow(static_cast<double>(k), -s);
    const double kd = static_cast<double>(k);
    sum += std::pow(kd, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(kd, -s) - em_derivative_terms(s, kd);
    return sum;
}

} // namespace prw::num
