#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "prw/kv_config.hpp"
#include "prw/numerics.hpp"
#include "prw/parallel.hpp"
#include "prw/rng.hpp"

using namespace prw;
using Catch::Approx;

TEST_CASE("gamma matches factorials and half-integers", "[numerics]")
{
    CHECK(num::gamma(5.0) == Approx(24.0).epsilon(1e-14));
    CHECK(num::gamma(0.5) == Approx(std::sqrt(num::pi)).epsilon(1e-14));
    CHECK(num::gamma(1.5) == Approx(0.5 * std::sqrt(num::pi)).epsilon(1e-14));
}

TEST_CASE("power_sum agrees with direct summation", "[numerics]")
{
    for (double s : {0.5, 1.0, 1.5, -0.5}) {
        double direct = 0.0;
        for (std::uint64_t n = 3; n <= 200000; ++n)
            direct += std::pow(static_cast<double>(n), -s);
        CHECK(num::power_sum(s, 3, 200000) == Approx(direct).epsilon(1e-11));
    }
    CHECK(num::power_sum(1.0, 5, 4) == 0.0);
}

TEST_CASE("power_sum_tail converges to the zeta function", "[numerics]")
{
    // zeta(2) - 1 - 1/4
    CHECK(num::power_sum_tail(2.0, 3) == Approx(num::pi * num::pi / 6.0 - 1.25).epsilon(1e-12));
    CHECK_THROWS(num::power_sum_tail(1.0, 1));
}

TEST_CASE("integrate handles smooth integrands", "[numerics]")
{
    CHECK(num::integrate([](double x) { return std::exp(x); }, 0.0, 1.0) == Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
    CHECK(num::integrate([](double x) { return std::sin(x); }, 0.0, num::pi) == Approx(2.0).epsilon(1e-13));
}

TEST_CASE("first_true finds the switch point", "[numerics]")
{
    for (std::uint64_t target : {1ull, 2ull, 17ull, 1000003ull, 1ull << 40})
        CHECK(num::first_true([&](std::uint64_t n) { return n >= target; }) == target);
    CHECK(num::first_true([](std::uint64_t n) { return n * n >= 50; }, 3) == 8);
}

TEST_CASE("rng streams are reproducible and distinct", "[rng]")
{
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i)
        REQUIRE(a() == b());
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i)
        seeds.insert(derive_seed(7, i));
    CHECK(seeds.size() == 1000);
    CHECK(derive_seed(7, 0) != derive_seed(8, 0));
}

TEST_CASE("rng transforms have the right moments", "[rng]")
{
    Rng rng(3);
    const int n = 400000;
    double su = 0, se = 0, sn = 0, sn2 = 0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        se += rng.exponential();
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    CHECK(su / n == Approx(0.5).margin(0.003));
    CHECK(se / n == Approx(1.0).margin(0.006));
    CHECK(sn / n == Approx(0.0).margin(0.006));
    CHECK(sn2 / n == Approx(1.0).margin(0.008));
}

TEST_CASE("run_replicas is independent of the thread count", "[parallel]")
{
    auto fn = [](std::size_t i) {
        Rng rng = replica_rng(11, i);
        return rng.normal();
    };
    const auto one = run_replicas(257, 1, fn);
    const auto four = run_replicas(257, 4, fn);
    CHECK(one == four);
    CHECK_THROWS_AS(run_replicas(10, 3, [](std::size_t i) -> int {
                        if (i == 7)
                            throw std::runtime_error("boom");
                        return 0;
                    }),
                    std::runtime_error);
}

TEST_CASE("key-value files parse, reject and round-trip", "[config]")
{
    std::istringstream in("# comment\nname = x  # trailing\nu = 1e5\nlist = 1, 2.5,3\n");
    KeyValueFile kv = KeyValueFile::parse(in);
    CHECK(kv.get_string("name") == "x");
    CHECK(kv.get_uint("u") == 100000u);
    CHECK(kv.get_doubles("list") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK(kv.get_double("missing", 4.0) == 4.0);
    kv.reject_unused();

    std::istringstream dup("a = 1\na = 2\n");
    CHECK_THROWS_AS(KeyValueFile::parse(dup), ConfigError);
    std::istringstream bad("just words\n");
    CHECK_THROWS_AS(KeyValueFile::parse(bad), ConfigError);
    std::istringstream extra("a = 1\nb = 2\n");
    KeyValueFile kv2 = KeyValueFile::parse(extra);
    kv2.get_double("a");
    try {
        kv2.reject_unused();
        FAIL("unused key accepted");
    } catch (const ConfigError& e) {
        CHECK(e.key_path() == "b");
    }
    try {
        kv2.get_double("nope");
        FAIL("missing key accepted");
    } catch (const ConfigError& e) {
        CHECK(e.key_path() == "nope");
    }
    CHECK_THROWS_AS(parse_uint("1.5", "k"), ConfigError);
    CHECK_THROWS_AS(parse_double("abc", "k"), ConfigError);
    CHECK(parse_double(format_real(0.1 + 0.2), "k") == 0.1 + 0.2);
}
