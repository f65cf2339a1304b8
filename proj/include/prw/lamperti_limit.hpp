#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "prw/comb_model.hpp"
#include "prw/rng.hpp"
#include "prw/stable_proc.hpp"

namespace prw {

// Subordinator whose jumps carry i.i.d. labels in {-1,+1} with P(+1) = (1+b)/2.
class LabelledSubordinatorPath {
public:
    LabelledSubordinatorPath(SubordinatorPath base, std::vector<std::int8_t> labels, double b);

    const SubordinatorPath& base() const { return base_; }
    const std::vector<std::int8_t>& labels() const { return labels_; }
    double b() const { return b_; }
    // Slope of the truncated-range time: the label mean.
    double residual_slope() const { return b_; }

    // Thinned parts: T^u + T^d = T. The compensating drift is shared in proportions (1+b)/2, (1-b)/2.
    double up_value(double u) const;
    double down_value(double u) const;

    // Sum over jumps j <= i of label_j J_j.
    double signed_jumps_through(std::size_t i) const { return signed_[i]; }

private:
    SubordinatorPath base_;
    std::vector<std::int8_t> labels_;
    double b_;
    std::vector<double> signed_;
    std::vector<double> up_;
};

LabelledSubordinatorPath labelled_subordinator(double alpha, double b, double t_max, double epsilon, Rng& rng,
                                               const SubordinatorOptions& opts = {});
// Covers [0, level] in real time.
LabelledSubordinatorPath labelled_subordinator_until(double alpha, double b, double level, double epsilon, Rng& rng,
                                                     const SubordinatorOptions& opts = {});

struct RenewalState {
    double G = 0.0;  // last range point <= t
    double H = 0.0;  // first range point >= t
    double N = 0.0;  // local time
    double age = 0.0;        // t - G
    double remaining = 0.0;  // H - t
    std::ptrdiff_t jump = -1;  // excursion index when G < t < H
};

RenewalState renewal_state(const SubordinatorPath& path, double t);

struct AnomalousState {
    double S = 0.0;         // position
    double velocity = 0.0;  // label, or the residual slope off the excursions
    double age = 0.0;
    double remaining = 0.0;
    double lagging = 0.0;   // X
    double leading = 0.0;   // Y
    double G = 0.0;
    double H = 0.0;
    double N = 0.0;
};

class AnomalousPath {
public:
    explicit AnomalousPath(LabelledSubordinatorPath path);

    const LabelledSubordinatorPath& labelled() const { return path_; }
    // Largest real time covered, T(t_max).
    double horizon() const { return horizon_; }

    // Center-of-mass evaluation from prefix sums.
    AnomalousState at(double t) const;
    // Direct integral of the velocity over [0, t], one segment at a time.
    double integral_value(double t) const;

private:
    double coupled_before(std::size_t i) const;

    LabelledSubordinatorPath path_;
    double horizon_;
};

// Position at real time t of a freshly generated path.
double sample_anomalous(double alpha, double b, double t, double epsilon, Rng& rng,
                        const SubordinatorOptions& opts = {});

// Marginal law of the arcsine Lamperti diffusion.
class DensityEvaluator {
public:
    DensityEvaluator(double alpha, double m);

    double alpha() const { return alpha_; }
    double m() const { return m_; }
    double r() const { return r_; }

    double density(double t, double x) const;
    double cdf(double t, double x) const;
    double quantile(double t, double p) const;
    double sample(double t, Rng& rng) const;

    // Integral of g(x) f_1(x) over (-1, 1), with the endpoint singularities removed.
    double integrate_against(const std::function<double(double)>& g) const;

private:
    double f1(double x) const;
    double denominator(double a, double c) const;
    double left_weight(double v) const;
    double right_weight(double w) const;
    double left_integral(double x) const;
    double right_integral(double x) const;

    double alpha_;
    double m_;
    double r_;
    double K_;
};

double density_f(double alpha, double m, double t, double x);
double cdf_f(double alpha, double m, double t, double x);
double sample_marginal(double alpha, double m, double t, Rng& rng);

// (T^u - T^d)/(T^u + T^d) from two independent positive stable variates.
double sample_ratio(double alpha, double b, Rng& rng);

// int_0^inf e^{-st} E[e^{iy S(t)}] dt
std::complex<double> flt_f(double alpha, double m, double s, double y);

// p_{n,k} = P(k up-steps among the n+1 steps following an up-to-down turn).
class LampertiTable {
public:
    explicit LampertiTable(std::size_t n_max) : n_max_(n_max), rows_(n_max + 1) {}

    std::size_t n_max() const { return n_max_; }
    double p(std::size_t n, std::size_t k) const { return k <= n ? rows_[n][k] : 0.0; }
    const std::vector<double>& row(std::size_t n) const { return rows_[n]; }
    std::vector<double>& row(std::size_t n) { return rows_[n]; }

private:
    std::size_t n_max_;
    std::vector<std::vector<double>> rows_;
};

LampertiTable lamperti_recursion(const Comb& comb, std::size_t n_max);

struct GfLimit {
    double value = 0.0;
    double target = 0.0;
    std::uint64_t terms = 0;
};

GfLimit double_gf_limit(const Comb& comb, double x, double lambda, std::uint64_t max_terms = 50'000'000);

struct KernelDiagnostics {
    std::size_t samples = 0;
    double ks = 0.0;
};

// Conditional law of the remaining time given the age in [a_lo, a_hi] against
// 1 - (a/(a+h))^alpha averaged over the observed ages.
KernelDiagnostics markov_kernel_check(const std::vector<RenewalState>& states, double alpha, double a_lo,
                                      double a_hi);

// CSV: t,S,label,age
void write_anomalous_csv(std::ostream& out, const AnomalousPath& path, const std::vector<double>& grid);

} // namespace prw
