#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "prw/rng.hpp"

namespace prw {

// Strictly stable law with log E[e^{iuX}] = -sigma^alpha |u|^alpha (1 - i beta sgn(u) tan(pi alpha/2)).
struct StableParams {
    double alpha;
    double beta = 0.0;
    double scale = 1.0;

    // sigma^alpha = stable_scale(alpha): the law of the limit process at time 1.
    static StableParams limit_law(double alpha, double beta);
    void validate() const;
};

std::complex<double> stable_log_char(const StableParams& p, double u);
double sample_stable(const StableParams& p, Rng& rng);
double stable_cdf(const StableParams& p, double x);

// Positive stable with E[e^{-lT}] = exp(-l^alpha), alpha in (0,1).
double sample_positive_stable(double alpha, Rng& rng);

struct SubordinatorOptions {
    double levy_scale = 1.0;           // intensity levy_scale * alpha x^{-alpha-1}
    std::size_t max_jumps = 50'000'000;
};

// Jumps above epsilon of an alpha-stable subordinator plus the compensating drift.
class SubordinatorPath {
public:
    SubordinatorPath(double alpha, double t_max, double epsilon, double levy_scale, std::vector<double> times,
                     std::vector<double> sizes);

    double alpha() const { return alpha_; }
    double t_max() const { return t_max_; }
    double epsilon() const { return epsilon_; }
    double drift_rate() const { return drift_; }
    const std::vector<double>& jump_times() const { return times_; }
    const std::vector<double>& jump_sizes() const { return sizes_; }
    std::size_t jump_count() const { return times_.size(); }

    // T(u) for 0 <= u <= t_max
    double value(double u) const;
    // value just after jump i / just before it
    double after_jump(std::size_t i) const { return after_[i]; }
    double before_jump(std::size_t i) const { return after_[i] - sizes_[i]; }
    const std::vector<double>& values_after_jumps() const { return after_; }
    // T(t_max)
    double terminal_value() const { return value(t_max_); }

private:
    double alpha_;
    double t_max_;
    double epsilon_;
    double drift_;
    std::vector<double> times_;
    std::vector<double> sizes_;
    std::vector<double> after_;
};

double default_epsilon(double alpha, double t_max);
double subordinator_drift(double alpha, double epsilon, double levy_scale = 1.0);

SubordinatorPath subordinator_path(double alpha, double t_max, double epsilon, Rng& rng,
                                   const SubordinatorOptions& opts = {});
// Path extended until T exceeds `level`; t_max is the local time at which it does.
SubordinatorPath subordinator_path_until(double alpha, double level, double epsilon, Rng& rng,
                                         const SubordinatorOptions& opts = {});

// Values at the sorted grid, starting from 0 at time 0.
std::vector<double> brownian_path(const std::vector<double>& grid, Rng& rng);
// Symmetric Cauchy process of scale (pi/2) t.
std::vector<double> cauchy_path(const std::vector<double>& grid, Rng& rng);

} // namespace prw
