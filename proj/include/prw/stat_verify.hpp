#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "prw/comb_model.hpp"
#include "prw/kv_config.hpp"
#include "prw/scaling_laws.hpp"
#include "prw/walk_sim.hpp"

namespace prw {

// sup |ECDF - cdf|; sorts a copy of the samples.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);
// Discrete law with atoms (sorted) and probabilities against a continuous cdf.
double ks_lattice(const std::vector<double>& atoms, const std::vector<double>& probs,
                  const std::function<double(double)>& cdf);

struct HillEstimate {
    double alpha = 0.0;
    double ci_low = 0.0;   // 95% bootstrap percentile interval
    double ci_high = 0.0;
    std::size_t k = 0;
};

// Hill estimator on the top floor(k_frac n) order statistics.
HillEstimate hill_estimate(const std::vector<double>& samples, double k_frac, std::uint64_t seed = 1,
                           unsigned bootstrap = 200);

struct CharFnPoint {
    double u = 0.0;
    std::complex<double> value;
    double se_real = 0.0;
    double se_imag = 0.0;
};

std::vector<CharFnPoint> empirical_char_fn(const std::vector<double>& samples, const std::vector<double>& u_grid);

// Monte Carlo mean of |S_n/n - m_S|.
double drift_l1(const Comb& comb, std::uint64_t n, std::size_t replicas, std::uint64_t seed, unsigned threads = 1);

struct VerificationScenario {
    std::string name;
    CombSpec comb;
    Regime regime = Regime::gaussian;
    double u = 0.0;
    std::size_t replicas = 0;
    std::vector<double> times;
    double tolerance = 0.0;
    std::uint64_t seed = 0;
    std::optional<double> reference_alpha;  // overrides the stability index of the reference law

    void validate() const;
};

// Keys: name, regime, u, replicas, times, tolerance, seed, reference.alpha, comb.up.*, comb.down.*
VerificationScenario read_scenario(const KeyValueFile& kv);
VerificationScenario load_scenario(const std::string& path);

struct TimeCheck {
    double t = 0.0;
    double ks = 0.0;
    bool pass = false;
};

struct VerificationResult {
    VerificationScenario scenario;
    RegimeReport regime;
    double normalizer = 0.0;        // lambda(u), the Cauchy prefactor, or u
    std::string reference;          // normal | stable | cauchy | arcsine-lamperti
    double reference_alpha = 0.0;
    double reference_beta = 0.0;
    double reference_scale = 0.0;   // at t = 1
    std::vector<TimeCheck> marginals;
    std::optional<double> increment_ks;  // law of X(t_last) - X(t_first) vs the reference at the gap
    double lipschitz_ratio = 0.0;        // max |S(t)-S(s)| / (u |t-s|)
    bool pass = false;
};

// Throws ConfigError when the comb's regime differs from the declared one.
VerificationResult verify_regime(const VerificationScenario& scenario, unsigned threads = 1);

void write_verification_report(Report& out, const VerificationResult& res);

} // namespace prw
