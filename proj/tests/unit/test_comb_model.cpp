#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "prw/comb_model.hpp"
#include "prw/rng.hpp"
#include "prw/stat_verify.hpp"

using namespace prw;
using Catch::Approx;

namespace {

// Tail as an explicit product of (1 - alpha_k).
double product_tail(const PersistenceLaw& law, std::uint64_t n)
{
    double t = 1.0;
    for (std::uint64_t k = 1; k <= n; ++k)
        t *= 1.0 - law.hazard(k);
    return t;
}

} // namespace

TEST_CASE("tail of a constant hazard", "[comb]")
{
    const PersistenceLaw law(ConstantHazard{0.5});
    CHECK(law.tail(3.0) == 0.125);
    CHECK(law.tail(3.9) == 0.125);
    CHECK(law.tail(0.0) == 1.0);
    const PersistenceLaw one(TableHazard{{1.0}, ConstantExtension{0.5}});
    CHECK(one.tail(1.7) == 0.0);
}

TEST_CASE("tail equals the hazard product", "[comb]")
{
    const std::vector<HazardFamily> fams{ConstantHazard{0.3}, PowerHazard{0.7, 1.0}, PowerHazard{1.5, 3.0},
                                         TableHazard{{0.1, 0.5, 0.2}, ConstantExtension{0.4}},
                                         TableHazard{{0.2, 0.1}, PowerExtension{0.8}}};
    for (const auto& f : fams) {
        const PersistenceLaw law(f);
        for (std::uint64_t n : {0, 1, 2, 5, 50, 3000, 6000})
            CHECK(law.tail_at(n) == Approx(product_tail(law, n)).epsilon(1e-10).margin(1e-250));
    }
}

TEST_CASE("power family has the declared tail", "[comb]")
{
    const PersistenceLaw law(PowerHazard{0.5, 1.0});
    CHECK(law.tail_at(100) == Approx(0.1).epsilon(1e-14));
    CHECK(law.tail_at(1000000) == Approx(1e-3).epsilon(1e-14));
    CHECK(law.tail_index().value() == 0.5);
    CHECK_FALSE(law.integrable());
    const PersistenceLaw scaled(PowerHazard{1.5, 4.0});
    CHECK(scaled.tail_at(2) == 1.0);  // 4 * 2^-1.5 > 1
    CHECK(scaled.tail_at(100) == Approx(4e-3).epsilon(1e-13));
    CHECK(scaled.integrable());
    CHECK_FALSE(scaled.square_integrable());
}

TEST_CASE("truncated mean", "[comb]")
{
    const PersistenceLaw half(ConstantHazard{0.5});
    CHECK(half.truncated_mean(2.0) == Approx(1.5));
    for (const auto& f : {HazardFamily{ConstantHazard{0.2}}, HazardFamily{PowerHazard{0.5, 1.0}}})
        CHECK(PersistenceLaw(f).truncated_mean(1.0) == 1.0);

    const PersistenceLaw law(PowerHazard{0.5, 1.0});
    double direct = 0.0;
    for (std::uint64_t n = 0; n < 1000000; ++n) {
        direct += law.tail_at(n);
        if (n == 9999)
            CHECK(law.truncated_mean(1e4) == Approx(direct).epsilon(1e-12));
    }
    CHECK(law.truncated_mean(1e6) == Approx(direct).epsilon(1e-12));
    CHECK(law.truncated_mean(1e6 + 0.5) == law.truncated_mean(1e6));
}

TEST_CASE("truncated second moment", "[comb]")
{
    const PersistenceLaw half(ConstantHazard{0.5});
    CHECK(half.truncated_second_moment(2.0) == Approx(1.5));
    CHECK(half.truncated_second_moment(0.0) == 0.0);

    const std::vector<HazardFamily> fams{TableHazard{{0.1, 0.5, 0.2}, ConstantExtension{0.4}},
                                         TableHazard{{0.2, 0.1}, PowerExtension{0.8}}, PowerHazard{1.2, 2.0}};
    for (const auto& f : fams) {
        const PersistenceLaw law(f);
        double v = 0.0, m = 0.0;
        for (std::uint64_t n = 1; n <= 20000; ++n) {
            v += static_cast<double>(n * n) * law.pmf(n);
            m += static_cast<double>(n) * law.pmf(n);
        }
        CHECK(law.truncated_second_moment(20000) == Approx(v).epsilon(1e-9));
        CHECK(law.truncated_first_moment(20000) == Approx(m).epsilon(1e-10));
    }
}

TEST_CASE("pmf sums to one", "[comb]")
{
    const PersistenceLaw geo(ConstantHazard{0.3});
    double s = 0.0;
    std::uint64_t n = 1;
    for (; geo.tail_at(n - 1) >= 1e-12; ++n)
        s += geo.pmf(n);
    CHECK(s == Approx(1.0).margin(1e-9));

    const PersistenceLaw heavy(PowerHazard{0.5, 1.0});
    double partial = 0.0;
    for (n = 1; n <= 100000; ++n)
        partial += heavy.pmf(n);
    CHECK(partial + heavy.tail_at(100000) == Approx(1.0).margin(1e-9));
}

TEST_CASE("tail, truncated mean and second moment are monotone", "[comb]")
{
    const PersistenceLaw law(TableHazard{{0.0, 0.3, 0.0, 0.9}, PowerExtension{0.6}});
    double prev_t = 2.0, prev_m = -1.0, prev_v = -1.0;
    for (double t = 0.0; t < 1e7; t = t * 1.7 + 0.3) {
        CHECK(law.tail(t) <= prev_t);
        CHECK(law.truncated_mean(t) >= prev_m);
        CHECK(law.truncated_second_moment(t) >= prev_v);
        prev_t = law.tail(t);
        prev_m = law.truncated_mean(t);
        prev_v = law.truncated_second_moment(t);
    }
}

TEST_CASE("assumption 1 decisions", "[comb]")
{
    CHECK_FALSE(check_assumption1(ConstantHazard{0.0}));
    CHECK(check_assumption1(PowerHazard{0.5, 1.0}));
    CHECK_FALSE(check_assumption1(TableHazard{{0.1, 0.2}, ConstantExtension{0.0}}));
    CHECK(check_assumption1(TableHazard{{0.1, 1.0}, ConstantExtension{0.0}}));
    CHECK(check_assumption1(TableHazard{{0.1}, PowerExtension{0.3}}));
    CHECK_THROWS_AS(PersistenceLaw(ConstantHazard{0.0}), ConfigError);
    CHECK_THROWS_AS(Comb(CombSpec{ConstantHazard{0.5}, ConstantHazard{0.0}}), ConfigError);
}

TEST_CASE("invalid parameters name the offending key", "[comb]")
{
    auto key_of = [](const HazardFamily& f) {
        try {
            validate_family(f, "up");
        } catch (const ConfigError& e) {
            return e.key_path();
        }
        return std::string("(accepted)");
    };
    CHECK(key_of(ConstantHazard{1.5}) == "up.p");
    CHECK(key_of(PowerHazard{-1.0, 1.0}) == "up.a");
    CHECK(key_of(PowerHazard{1.0, 0.0}) == "up.c");
    CHECK(key_of(TableHazard{{0.2, -0.1}, ConstantExtension{0.5}}) == "up.values[1]");
    CHECK(key_of(TableHazard{{}, ConstantExtension{0.5}}) == "up.values");
    CHECK(key_of(TableHazard{{0.2}, ConstantExtension{2.0}}) == "up.tail.p");
}

TEST_CASE("sampling: a sure switch gives runs of length one", "[comb][sampling]")
{
    const PersistenceLaw law(ConstantHazard{1.0});
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(law.sample(rng) == 1u);
        REQUIRE(law.sample_sequential(rng) == 1u);
    }
}

TEST_CASE("sampling: constant hazard passes a chi-square test", "[comb][sampling]")
{
    const double p = 0.3;
    const PersistenceLaw law(ConstantHazard{p});
    Rng rng(2024);
    const int n = 1000000;
    const int bins = 20;  // 1..19 and >= 20
    std::vector<double> counts(bins, 0.0);
    for (int i = 0; i < n; ++i)
        counts[std::min<std::uint64_t>(law.sample(rng), bins) - 1] += 1.0;
    double chi2 = 0.0;
    for (int k = 1; k <= bins; ++k) {
        const double prob = k < bins ? p * std::pow(1.0 - p, k - 1) : std::pow(1.0 - p, bins - 1);
        const double e = prob * n;
        chi2 += (counts[k - 1] - e) * (counts[k - 1] - e) / e;
    }
    CHECK(chi2 < 43.82);  // 99.9% quantile, 19 degrees of freedom
}

TEST_CASE("sampling: power tail index recovered by Hill", "[comb][sampling]")
{
    const PersistenceLaw law(PowerHazard{0.7, 1.0});
    Rng rng(99);
    std::vector<double> x(1000000);
    for (auto& v : x)
        v = static_cast<double>(law.sample(rng));
    CHECK(hill_estimate(x, 0.01, 1, 0).alpha == Approx(0.7).margin(0.05));
}

TEST_CASE("sampling: empirical tail inside the DKW band", "[comb][sampling]")
{
    const PersistenceLaw law(TableHazard{{0.05, 0.3, 0.1}, PowerExtension{1.3}});
    Rng rng(5);
    const int n = 1000000;
    std::vector<std::uint64_t> x(n);
    for (auto& v : x)
        v = law.sample(rng);
    std::sort(x.begin(), x.end());
    const double band = std::sqrt(std::log(2.0 / 0.01) / (2.0 * n));
    for (std::uint64_t t : {1, 2, 3, 4, 8, 30, 100, 1000}) {
        const auto above = static_cast<double>(x.end() - std::upper_bound(x.begin(), x.end(), t));
        CHECK(std::abs(above / n - law.tail_at(t)) < band);
    }
}

TEST_CASE("sequential and inverse-tail samplers agree in law", "[comb][sampling]")
{
    const PersistenceLaw law(TableHazard{{0.2, 0.05, 0.5}, PowerExtension{0.9}});
    Rng a(1), b(2);
    std::vector<double> x(50000), y(50000);
    for (auto& v : x)
        v = static_cast<double>(law.sample(a));
    for (auto& v : y)
        v = static_cast<double>(law.sample_sequential(b));
    CHECK(ks_two_sample(x, y) < 0.0103);  // 99% critical value
}

TEST_CASE("envelope of a graft", "[comb][graft]")
{
    const CombSpec base{ConstantHazard{0.4}, ConstantHazard{0.3}};
    auto [lo0, hi0] = envelope_transitions(base, GraftSpec{});
    CHECK(lo0 == base);
    CHECK(hi0 == base);

    // two leaves refining the context "up-run of length 2"
    GraftSpec g;
    g.entries["uud"] = 0.2;
    g.entries["uudu"] = 0.6;
    auto [lo, hi] = envelope_transitions(base, g);
    const Comb lower(lo), upper(hi);
    CHECK(lower.up().hazard(2) == 0.6);
    CHECK(upper.up().hazard(2) == 0.2);
    CHECK(lower.up().hazard(1) == 0.4);
    CHECK(lower.up().hazard(3) == 0.4);
    CHECK(lower.down().hazard(2) == Approx(0.3));

    GraftSpec same;
    same.entries["ddu"] = 0.7;
    same.entries["dduu"] = 0.7;
    auto [lo2, hi2] = envelope_transitions(base, same);
    CHECK(Comb(lo2).down().hazard(2) == 0.7);
    CHECK(Comb(hi2).down().hazard(2) == 0.7);

    GraftSpec bad;
    bad.entries["uuu"] = 0.5;
    CHECK_THROWS_AS(envelope_transitions(base, bad), ConfigError);
}

TEST_CASE("comb files round-trip", "[comb][io]")
{
    const CombSpec spec{TableHazard{{0.1, 0.25}, PowerExtension{0.8}}, PowerHazard{1.5, 2.0}};
    Report rep;
    write_comb(rep, spec, "comb.");
    std::istringstream in(rep.str());
    const KeyValueFile kv = KeyValueFile::parse(in);
    CHECK(read_comb(kv, "comb.") == spec);
    kv.reject_unused();

    std::istringstream bad("up.family = power\nup.a = 0.5\ndown.family = cubic\n");
    try {
        read_comb(KeyValueFile::parse(bad));
        FAIL("unknown family accepted");
    } catch (const ConfigError& e) {
        CHECK(e.key_path() == "down.family");
    }

    std::istringstream graft("graft.uud = 0.25\ngraft.ddu = 0.5\n");
    const GraftSpec g = read_graft(KeyValueFile::parse(graft));
    CHECK(g.entries.size() == 2);
    CHECK(g.depth() == 3);
}
