#include "prw/stat_verify.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "prw/lamperti_limit.hpp"
#include "prw/numerics.hpp"
#include "prw/parallel.hpp"
#include "prw/rng.hpp"
#include "prw/stable_proc.hpp"

namespace prw {

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    if (samples.empty())
        throw std::invalid_argument("ks_distance: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double F = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
    }
    return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw std::invalid_argument("ks_two_sample: no samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x)
            ++i;
        while (j < b.size() && b[j] == x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_lattice(const std::vector<double>& atoms, const std::vector<double>& probs,
                  const std::function<double(double)>& cdf)
{
    if (atoms.size() != probs.size() || atoms.empty())
        throw std::invalid_argument("ks_lattice: atoms and probabilities must be nonempty and of equal length");
    double cum = 0.0, d = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        if (i > 0 && atoms[i] <= atoms[i - 1])
            throw std::invalid_argument("ks_lattice: atoms must be increasing");
        const double F = cdf(atoms[i]);
        d = std::max(d, std::abs(cum - F));
        cum += probs[i];
        d = std::max(d, std::abs(cum - F));
    }
    return d;
}

namespace {

double hill_core(std::vector<double>& x, std::size_t k)
{
    std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(k), x.end(), std::greater<>());
    const double threshold = std::log(x[k]);
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        acc += std::log(x[i]) - threshold;
    if (!(acc > 0.0))
        throw std::domain_error("hill_estimate: degenerate upper order statistics (no tail spread)");
    return static_cast<double>(k) / acc;
}

} // namespace

HillEstimate hill_estimate(const std::vector<double>& samples, double k_frac, std::uint64_t seed, unsigned bootstrap)
{
    if (!(k_frac > 0.0 && k_frac <= 0.2))
        throw std::invalid_argument("hill_estimate: k_frac must lie in (0, 0.2]");
    for (double v : samples)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("hill_estimate: samples must be positive and finite");
    const std::size_t n = samples.size();
    const auto k = static_cast<std::size_t>(k_frac * static_cast<double>(n));
    if (k < 10)
        throw std::domain_error("hill_estimate: too few exceedances (" + std::to_string(k) + " < 10)");
    HillEstimate out;
    out.k = k;
    std::vector<double> work(samples);
    out.alpha = hill_core(work, k);
    std::vector<double> boot;
    Rng rng(seed);
    for (unsigned b = 0; b < bootstrap; ++b) {
        for (std::size_t i = 0; i < n; ++i)
            work[i] = samples[static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))];
        try {
            boot.push_back(hill_core(work, k));
        } catch (const std::domain_error&) {
        }
    }
    if (boot.empty()) {
        out.ci_low = out.ci_high = out.alpha;
    } else {
        std::sort(boot.begin(), boot.end());
        auto pct = [&](double q) { return boot[static_cast<std::size_t>(q * static_cast<double>(boot.size() - 1))]; };
        out.ci_low = pct(0.025);
        out.ci_high = pct(0.975);
    }
    return out;
}

std::vector<CharFnPoint> empirical_char_fn(const std::vector<double>& samples, const std::vector<double>& u_grid)
{
    if (samples.empty())
        throw std::invalid_argument("empirical_char_fn: no samples");
    const double n = static_cast<double>(samples.size());
    std::vector<CharFnPoint> out;
    for (double u : u_grid) {
        double c = 0.0, s = 0.0, c2 = 0.0, s2 = 0.0;
        for (double x : samples) {
            const double cv = std::cos(u * x);
            const double sv = std::sin(u * x);
            c += cv;
            s += sv;
            c2 += cv * cv;
            s2 += sv * sv;
        }
        c /= n;
        s /= n;
        CharFnPoint p;
        p.u = u;
        p.value = {c, s};
        p.se_real = std::sqrt(std::max(0.0, c2 / n - c * c) / n);
        p.se_imag = std::sqrt(std::max(0.0, s2 / n - s * s) / n);
        out.push_back(p);
    }
    return out;
}

double drift_l1(const Comb& comb, std::uint64_t n, std::size_t replicas, std::uint64_t seed, unsigned threads)
{
    if (n < 1000)
        throw std::invalid_argument("drift_l1: n must be >= 1000");
    if (replicas == 0)
        throw std::invalid_argument("drift_l1: replicas must be >= 1");
    const double m = mean_drift(comb).m;
    const double t = static_cast<double>(n);
    const std::vector<double> times{t};
    auto dev = run_replicas(replicas, threads, [&](std::size_t i) {
        Rng rng = replica_rng(seed, i);
        return std::abs(sample_positions(comb, n, times, rng)[0] / t - m);
    });
    return std::accumulate(dev.begin(), dev.end(), 0.0) / static_cast<double>(replicas);
}

void VerificationScenario::validate() const
{
    if (!(u > 0.0) || !std::isfinite(u))
        throw ConfigError("u", "must be > 0");
    if (replicas < 1000)
        throw ConfigError("replicas", "must be >= 1000");
    if (times.empty())
        throw ConfigError("times", "at least one time point is required");
    for (std::size_t i = 0; i < times.size(); ++i)
        if (!(times[i] > 0.0) || (i > 0 && times[i] <= times[i - 1]))
            throw ConfigError("times", "must be positive and strictly increasing");
    if (!(tolerance > 0.0 && tolerance < 1.0))
        throw ConfigError("tolerance", "must lie in (0,1)");
    if (u * times.back() > 1e15)
        throw ConfigError("u", "u * max(times) exceeds the simulable horizon");
    if (reference_alpha && !(*reference_alpha > 0.0 && *reference_alpha <= 2.0))
        throw ConfigError("reference.alpha", "must lie in (0,2]");
}

VerificationScenario read_scenario(const KeyValueFile& kv)
{
    VerificationScenario sc;
    sc.name = kv.get_string("name");
    sc.regime = parse_regime(kv.get_string("regime"));
    sc.u = kv.get_double("u");
    sc.replicas = kv.get_uint("replicas");
    sc.times = kv.get_doubles("times");
    sc.tolerance = kv.get_double("tolerance");
    sc.seed = kv.get_uint("seed", 1);
    if (kv.has("reference.alpha"))
        sc.reference_alpha = kv.get_double("reference.alpha");
    sc.comb = read_comb(kv, "comb.");
    kv.reject_unused();
    sc.validate();
    return sc;
}

VerificationScenario load_scenario(const std::string& path)
{
    return read_scenario(KeyValueFile::load(path));
}

VerificationResult verify_regime(const VerificationScenario& sc, unsigned threads)
{
    sc.validate();
    const Comb comb(sc.comb);
    VerificationResult res;
    res.scenario = sc;
    res.regime = regime_report(comb);
    if (res.regime.regime != sc.regime)
        throw ConfigError("regime", "scenario declares " + to_string(sc.regime) + " but the comb is "
                                        + to_string(res.regime.regime));
    const double m = res.regime.m;
    const double u = sc.u;

    // rescaled X(t) from S_{ut}; `t` is a time span
    std::function<double(double, double)> rescale;
    switch (sc.regime) {
    case Regime::gaussian:
    case Regime::generic_stable: {
        const NormalizerSet norm(comb, m);
        res.normalizer = norm.lambda(u);
        rescale = [=, lam = res.normalizer](double s_ut, double t) { return (s_ut - m * u * t) / lam; };
        break;
    }
    case Regime::cauchy: {
        const NormalizerSet norm(comb, m);
        res.normalizer = cauchy_prefactor(comb, norm, u);
        rescale = [=, c = res.normalizer](double s_ut, double t) { return c * (s_ut / u - m * t); };
        break;
    }
    case Regime::anomalous:
        res.normalizer = u;
        rescale = [=](double s_ut, double) { return s_ut / u; };
        break;
    }

    // reference law at time t
    std::function<double(double, double)> ref_cdf;
    const double alpha = sc.reference_alpha.value_or(res.regime.alpha);
    if (sc.regime == Regime::anomalous) {
        if (!(alpha < 1.0))
            throw ConfigError("reference.alpha", "must lie in (0,1) for the anomalous regime");
        const auto dens = std::make_shared<DensityEvaluator>(alpha, m);
        res.reference = "arcsine-lamperti";
        res.reference_alpha = alpha;
        res.reference_beta = 0.0;
        res.reference_scale = 1.0;
        ref_cdf = [dens](double t, double x) { return dens->cdf(t, x); };
    } else if (sc.regime == Regime::gaussian && !sc.reference_alpha) {
        res.reference = "normal";
        res.reference_alpha = 2.0;
        res.reference_scale = 1.0;
        ref_cdf = [](double t, double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0 * t)); };
    } else {
        const double beta = res.regime.b ? skewness_beta(m, *res.regime.b, alpha) : 0.0;
        const StableParams base = StableParams::limit_law(alpha, beta);
        res.reference = alpha == 1.0 ? "cauchy" : "stable";
        res.reference_alpha = base.alpha;
        res.reference_beta = base.beta;
        res.reference_scale = base.scale;
        ref_cdf = [base](double t, double x) {
            StableParams p = base;
            p.scale *= std::pow(t, 1.0 / p.alpha);
            return stable_cdf(p, x);
        };
    }

    std::vector<double> walk_times;
    for (double t : sc.times)
        walk_times.push_back(u * t);
    const auto horizon = static_cast<std::uint64_t>(std::ceil(walk_times.back()));
    const auto paths = run_replicas(sc.replicas, threads, [&](std::size_t i) {
        Rng rng = replica_rng(sc.seed, i);
        return sample_positions(comb, horizon, walk_times, rng);
    });

    res.pass = true;
    for (std::size_t j = 0; j < sc.times.size(); ++j) {
        const double t = sc.times[j];
        std::vector<double> x(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i)
            x[i] = rescale(paths[i][j], t);
        TimeCheck tc;
        tc.t = t;
        tc.ks = ks_distance(std::move(x), [&](double v) { return ref_cdf(t, v); });
        tc.pass = tc.ks < sc.tolerance;
        res.pass = res.pass && tc.pass;
        res.marginals.push_back(tc);
    }

    if (sc.regime != Regime::anomalous && sc.times.size() >= 2) {
        const double t0 = sc.times.front();
        const double t1 = sc.times.back();
        std::vector<double> x(paths.size());
        for (std::size_t i = 0; i < paths.size(); ++i)
            x[i] = rescale(paths[i].back() - paths[i].front(), t1 - t0);
        const double ks = ks_distance(std::move(x), [&](double v) { return ref_cdf(t1 - t0, v); });
        res.increment_ks = ks;
        res.pass = res.pass && ks < sc.tolerance;
    }

    for (const auto& p : paths) {
        double prev_t = 0.0, prev_s = 0.0;
        for (std::size_t j = 0; j < p.size(); ++j) {
            res.lipschitz_ratio = std::max(res.lipschitz_ratio, std::abs(p[j] - prev_s) / (walk_times[j] - prev_t));
            prev_t = walk_times[j];
            prev_s = p[j];
        }
    }
    res.pass = res.pass && res.lipschitz_ratio <= 1.0 + 1e-12;
    return res;
}

namespace {

std::string join_reals(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0)
            s += ", ";
        s += format_real(v[i]);
    }
    return s;
}

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

} // namespace

void write_verification_report(Report& out, const VerificationResult& res)
{
    const auto& sc = res.scenario;
    out.add("scenario.name", sc.name);
    out.add("scenario.regime", to_string(sc.regime));
    out.add("scenario.u", sc.u);
    out.add("scenario.replicas", static_cast<std::uint64_t>(sc.replicas));
    out.add("scenario.times", join_reals(sc.times));
    out.add("scenario.tolerance", sc.tolerance);
    out.add("scenario.seed", sc.seed);
    if (sc.reference_alpha)
        out.add("scenario.reference.alpha", *sc.reference_alpha);
    write_comb(out, sc.comb, "comb.");
    write_regime_report(out, res.regime, "regime.");
    out.add("normalizer.kind", sc.regime == Regime::anomalous ? "u"
                               : sc.regime == Regime::cauchy  ? "cauchy-prefactor"
                                                              : "lambda");
    out.add("normalizer.value", res.normalizer);
    out.add("reference.law", res.reference);
    out.add("reference.alpha", res.reference_alpha);
    out.add("reference.beta", res.reference_beta);
    out.add("reference.scale", res.reference_scale);
    for (std::size_t i = 0; i < res.marginals.size(); ++i) {
        const std::string key = "marginal." + std::to_string(i) + ".";
        out.add(key + "t", res.marginals[i].t);
        out.add(key + "ks", res.marginals[i].ks);
        out.add(key + "result", verdict(res.marginals[i].pass));
    }
    if (res.increment_ks) {
        out.add("increment.ks", *res.increment_ks);
        out.add("increment.result", verdict(*res.increment_ks < sc.tolerance));
    }
    out.add("lipschitz.max_ratio", res.lipschitz_ratio);
    out.add("result", verdict(res.pass));
}

} // namespace prw
