#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "prw/stat_verify.hpp"

using namespace prw;
using Catch::Approx;

namespace {

std::vector<double> pareto(double alpha, std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> x(n);
    for (auto& v : x)
        v = std::pow(rng.uniform_pos(), -1.0 / alpha);
    return x;
}

const char* smoke_text = "name = smoke\n"
                         "regime = gaussian\n"
                         "u = 10000\n"
                         "replicas = 2000\n"
                         "times = 0.5, 1\n"
                         "tolerance = 0.05\n"
                         "seed = 20240611\n"
                         "comb.up.family = constant\n"
                         "comb.up.p = 0.3\n"
                         "comb.down.family = constant\n"
                         "comb.down.p = 0.5\n";

VerificationScenario parse(const std::string& text)
{
    std::istringstream in(text);
    return read_scenario(KeyValueFile::parse(in));
}

std::string error_key(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.key_path();
    }
    return "(accepted)";
}

std::string replace(std::string text, const std::string& from, const std::string& to)
{
    text.replace(text.find(from), from.size(), to);
    return text;
}

} // namespace

TEST_CASE("KS distance of a shifted grid equals the shift", "[ks]")
{
    const std::size_t n = 1000;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    for (double d : {0.0, 0.01, 0.2}) {
        auto cdf = [d](double v) { return std::clamp(v - d, 0.0, 1.0); };
        CHECK(ks_distance(x, cdf) == Approx(d + 0.5 / n).epsilon(1e-12));
    }
    std::vector<double> y(x);
    for (auto& v : y)
        v += 0.1;
    CHECK(ks_two_sample(x, y) == Approx(0.1).margin(1.0 / n));
    CHECK(ks_two_sample(x, x) == 0.0);
    CHECK_THROWS_AS(ks_distance({}, [](double) { return 0.0; }), std::invalid_argument);
}

TEST_CASE("KS distance of uniform samples is small", "[ks]")
{
    Rng rng(1);
    std::vector<double> x(100000);
    for (auto& v : x)
        v = rng.uniform();
    CHECK(ks_distance(x, [](double v) { return std::clamp(v, 0.0, 1.0); }) < 0.007);
}

TEST_CASE("lattice KS", "[ks]")
{
    auto logistic = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
    CHECK(ks_lattice({0.0}, {1.0}, logistic) == Approx(0.5));
    // two atoms at the quartiles of the uniform law on [0,1]
    auto unif = [](double v) { return std::clamp(v, 0.0, 1.0); };
    CHECK(ks_lattice({0.25, 0.75}, {0.5, 0.5}, unif) == Approx(0.25));
    CHECK_THROWS_AS(ks_lattice({1.0, 0.0}, {0.5, 0.5}, unif), std::invalid_argument);
    CHECK_THROWS_AS(ks_lattice({0.0}, {0.5, 0.5}, unif), std::invalid_argument);
}

TEST_CASE("Hill estimator on Pareto samples", "[hill]")
{
    const auto x = pareto(0.5, 200000, 7);
    const HillEstimate h = hill_estimate(x, 0.05, 3, 200);
    CHECK(h.k == 10000);
    CHECK(h.alpha == Approx(0.5).margin(0.02));
    CHECK(h.ci_low <= h.alpha);
    CHECK(h.ci_high >= h.alpha);
    CHECK(h.ci_low < 0.5);
    CHECK(h.ci_high > 0.5);

    std::vector<double> scaled(x);
    for (auto& v : scaled)
        v *= 37.5;
    CHECK(hill_estimate(scaled, 0.05, 3, 0).alpha == Approx(h.alpha).epsilon(1e-12));

    for (double kf : {0.01, 0.02, 0.1, 0.2})
        CHECK(hill_estimate(x, kf, 3, 0).alpha == Approx(h.alpha).margin(0.05));
}

TEST_CASE("Hill estimator rejects bad input", "[hill]")
{
    CHECK_THROWS_AS(hill_estimate(pareto(1.0, 50, 1), 0.1), std::domain_error);
    CHECK_THROWS_AS(hill_estimate(std::vector<double>(1000, 1.0), 0.1), std::domain_error);
    CHECK_THROWS_AS(hill_estimate(pareto(1.0, 1000, 1), 0.3), std::invalid_argument);
    CHECK_THROWS_AS(hill_estimate(pareto(1.0, 1000, 1), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(hill_estimate({1.0, -2.0, 3.0}, 0.1), std::invalid_argument);
}

TEST_CASE("empirical characteristic function", "[charfn]")
{
    const auto pts = empirical_char_fn(std::vector<double>(100, 0.0), {-1.0, 0.5, 3.0});
    REQUIRE(pts.size() == 3);
    for (const auto& p : pts) {
        CHECK(p.value == std::complex<double>(1.0, 0.0));
        CHECK(p.se_real == 0.0);
        CHECK(p.se_imag == 0.0);
    }
    // two-point law at +-1: cos(u)
    const auto two = empirical_char_fn({1.0, -1.0}, {0.7});
    CHECK(two[0].value.real() == Approx(std::cos(0.7)));
    CHECK(two[0].value.imag() == Approx(0.0).margin(1e-16));
}

TEST_CASE("law of large numbers diagnostic", "[lln]")
{
    const Comb zz(CombSpec{ConstantHazard{1.0}, ConstantHazard{1.0}});
    CHECK(drift_l1(zz, 1001, 10, 1) == Approx(1.0 / 1001.0));
    CHECK(drift_l1(zz, 1000, 10, 1) == 0.0);

    const Comb c(CombSpec{ConstantHazard{0.2}, ConstantHazard{0.4}});
    const double a = drift_l1(c, 1000, 400, 5, 1);
    const double b = drift_l1(c, 100000, 400, 5, 1);
    CHECK(b < a);
    // Gaussian fluctuations: E|S_n/n - m| ~ sqrt(2 Sigma^2/(pi n D)) with D = 7.5
    CHECK(b < 0.01);
    CHECK(drift_l1(c, 5000, 300, 9, 1) == drift_l1(c, 5000, 300, 9, 4));
    CHECK_THROWS_AS(drift_l1(c, 10, 10, 1), std::invalid_argument);
}

TEST_CASE("scenario parsing and validation", "[scenario]")
{
    const VerificationScenario sc = parse(smoke_text);
    CHECK(sc.name == "smoke");
    CHECK(sc.regime == Regime::gaussian);
    CHECK(sc.replicas == 2000);
    CHECK(sc.times == std::vector<double>{0.5, 1.0});
    CHECK(sc.seed == 20240611u);
    CHECK_FALSE(sc.reference_alpha);

    CHECK(error_key(replace(smoke_text, "name = smoke\n", "")) == "name");
    CHECK(error_key(std::string(smoke_text) + "colour = blue\n") == "colour");
    CHECK(error_key(replace(smoke_text, "replicas = 2000", "replicas = 10")) == "replicas");
    CHECK(error_key(replace(smoke_text, "times = 0.5, 1", "times = 1, 0.5")) == "times");
    CHECK(error_key(replace(smoke_text, "tolerance = 0.05", "tolerance = 2")) == "tolerance");
    CHECK(error_key(replace(smoke_text, "regime = gaussian", "regime = brownian")) == "regime");
    CHECK(error_key(replace(smoke_text, "comb.up.p = 0.3", "comb.up.p = 1.3")) == "comb.up.p");
    CHECK(error_key(std::string(smoke_text) + "reference.alpha = 3\n") == "reference.alpha");
    CHECK(error_key(replace(smoke_text, "u = 10000", "u = 1e300")) == "u");

    VerificationScenario wrong = sc;
    wrong.regime = Regime::cauchy;
    try {
        verify_regime(wrong);
        FAIL("regime mismatch accepted");
    } catch (const ConfigError& e) {
        CHECK(e.key_path() == "regime");
    }
}

TEST_CASE("gaussian verification passes and reports", "[scenario][sampling]")
{
    const VerificationResult res = verify_regime(parse(smoke_text));
    CHECK(res.reference == "normal");
    REQUIRE(res.marginals.size() == 2);
    CHECK(res.increment_ks.has_value());
    CHECK(res.lipschitz_ratio <= 1.0);
    CHECK(res.pass);

    Report rep;
    write_verification_report(rep, res);
    const std::string text = rep.str();
    for (const char* key : {"scenario.name", "regime.m_S", "normalizer.value", "reference.law", "marginal.1.ks",
                            "increment.ks", "lipschitz.max_ratio", "result"})
        CHECK(text.find(key) != std::string::npos);
    CHECK(text.find("result = PASS") != std::string::npos);
}

TEST_CASE("a wrong reference law fails", "[scenario][sampling]")
{
    VerificationScenario sc = parse(smoke_text);
    sc.reference_alpha = 1.2;
    const VerificationResult res = verify_regime(sc);
    CHECK(res.reference == "stable");
    CHECK_FALSE(res.pass);
    CHECK(res.marginals[0].ks > 0.2);
}

TEST_CASE("verification is independent of the thread count", "[scenario][parallel]")
{
    VerificationScenario sc = parse(smoke_text);
    sc.u = 2000;
    sc.replicas = 1500;
    const VerificationResult one = verify_regime(sc, 1);
    const VerificationResult three = verify_regime(sc, 3);
    Report a, b;
    write_verification_report(a, one);
    write_verification_report(b, three);
    CHECK(a.str() == b.str());
}
