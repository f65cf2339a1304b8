#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace prw::num {

inline constexpr double pi = 3.14159265358979323846;

// Gamma function (Lanczos approximation).
double gamma(double x);

// Sum of n^{-s} for n in [lo, hi], lo >= 1. Direct summation on a short head,
// Euler-Maclaurin beyond it.
double power_sum(double s, std::uint64_t lo, std::uint64_t hi);

// Sum of n^{-s} for n >= lo; requires s > 1.
double power_sum_tail(double s, std::uint64_t lo);

// Adaptive Gauss-Kronrod (15/31) on [a, b].
template <class F>
double integrate(F&& f, double a, double b, double tol = 1e-12, unsigned max_depth = 15)
{
    if (a == b)
        return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        std::forward<F>(f), a, b, max_depth, tol);
}

// Smallest integer n >= lo with pred(n) true, for a predicate that is false
// then true. Brackets by doubling, then bisects.
template <class Pred>
std::uint64_t first_true(Pred&& pred, std::uint64_t lo = 1)
{
    if (pred(lo))
        return lo;
    std::uint64_t bad = lo;
    std::uint64_t step = 1;
    std::uint64_t good = lo + step;
    constexpr std::uint64_t limit = std::uint64_t{1} << 62;
    while (!pred(good)) {
        bad = good;
        if (step >= limit)
            throw std::runtime_error("first_true: no bracket below 2^62");
        step *= 2;
        good = lo + step;
    }
    while (good - bad > 1) {
        std::uint64_t mid = bad + (good - bad) / 2;
        if (pred(mid))
            good = mid;
        else
            bad = mid;
    }
    return good;
}

} // namespace prw::num
