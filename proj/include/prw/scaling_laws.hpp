#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "prw/comb_model.hpp"
#include "prw/kv_config.hpp"

namespace prw {

// Extremal mean drift or a degenerate comb: no limit theorem is implemented.
class RegimeUnsupported : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct DriftParameters {
    double m = 0.0;
    std::optional<double> b;  // tail balance, when the tails are comparable
    std::optional<double> d;  // (E tau_u - E tau_d)/(E tau_u + E tau_d), when a mean exists
    bool integrable_up = true;
    bool integrable_down = true;
};

DriftParameters mean_drift(const Comb& comb);

double skewness_beta(double m, double b, double alpha);

// sigma^alpha of the limit symbol: (2-a) Gamma(2-a)/a * sin(pi (a-1)/2)/(a-1).
double stable_scale(double alpha);

enum class Regime { gaussian, generic_stable, cauchy, anomalous };

Regime classify_regime(double alpha);
std::string to_string(Regime r);
Regime parse_regime(const std::string& name);

// Stability index implied by the declared families (2 for light tails).
double comb_alpha(const Comb& comb);

struct RegimeReport {
    double alpha = 2.0;
    double m = 0.0;
    std::optional<double> b;
    std::optional<double> d;
    bool integrable_up = true;
    bool integrable_down = true;
    double beta = 0.0;
    Regime regime = Regime::gaussian;
    double r = 1.0;  // (1+m)/(1-m)
};

RegimeReport regime_report(const Comb& comb);
void write_regime_report(Report& out, const RegimeReport& rep, const std::string& prefix = "regime.");

// Normalizing functions Sigma^2, Theta, a, s, lambda = a o s.
class NormalizerSet {
public:
    NormalizerSet(const Comb& comb, double m);

    double m() const { return m_; }
    // Truncated second moment of (1-m) tau_u - (1+m) tau_d with each part cut at t.
    double sigma2(double t) const;
    double theta(double t) const;
    // Smallest integer t >= 1 with t^2 >= u Sigma^2(t) and Sigma^2(t) > 0.
    double a(double u) const;
    // Smallest integer t >= 1 with Theta(a(t)) t >= u.
    double s(double u) const;
    double lambda(double u) const;

private:
    const Comb& comb_;
    double m_;
};

// Centering factor of the Cauchy regime: D(u) / Xi_1(s(u)) with Xi_1(s) = a(s)/s.
double cauchy_prefactor(const Comb& comb, const NormalizerSet& norm, double u);

struct EquivalenceDiagnostics {
    std::vector<double> t;
    std::vector<double> tail_ratio;   // T_c(t) / (T_u(t) + T_d(t))
    double limit_constant = 0.0;
    double max_deviation = 0.0;       // over the grid, relative to limit_constant
    double last_deviation = 0.0;      // at the largest t
    std::vector<double> variance_ratio;  // V_c(t)/Sigma^2(t), light tails only
};

// Two-sided tail of tau_c = (1-m) tau_u - (1+m) tau_d.
double central_tail(const Comb& comb, double m, double t);
// E[tau_c^2 1{|tau_c| <= t}] for light-tailed combs.
double central_second_moment(const Comb& comb, double m, double t);

EquivalenceDiagnostics equivalence_checks(const Comb& comb, const std::vector<double>& grid);

} // namespace prw
