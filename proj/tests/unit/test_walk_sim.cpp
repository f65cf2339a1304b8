#include <catch_amalgamated.hpp>

#include <sstream>
#include <vector>

#include "prw/stat_verify.hpp"
#include "prw/walk_sim.hpp"

using namespace prw;
using Catch::Approx;

namespace {

Trajectory example_path()
{
    // d2 u3 d1 u4
    return Trajectory({{Direction::down, 2}, {Direction::up, 3}, {Direction::down, 1}, {Direction::up, 4}}, 10, true);
}

} // namespace

TEST_CASE("zig-zag comb alternates every step", "[walk]")
{
    const Comb zz(CombSpec{ConstantHazard{1.0}, ConstantHazard{1.0}});
    Rng rng(1);
    const Trajectory t = simulate_prw(zz, 101, rng);
    REQUIRE(t.runs().size() == 101);
    for (std::uint64_t n = 1; n <= 101; ++n) {
        CHECK(t.increment(n) == (n % 2 ? -1 : 1));
        CHECK(t.position(n) == (n % 2 ? -1 : 0));
        CHECK(t.age(n) == 1);
    }
}

TEST_CASE("positions, increments and ages of a fixed path", "[walk]")
{
    const Trajectory t = example_path();
    const std::vector<std::int64_t> S{0, -1, -2, -1, 0, 1, 0, 1, 2, 3, 4};
    const std::vector<std::uint64_t> A{0, 1, 2, 1, 2, 3, 1, 1, 2, 3, 4};
    for (std::uint64_t n = 0; n <= 10; ++n)
        CHECK(t.position(n) == S[n]);
    for (std::uint64_t n = 1; n <= 10; ++n) {
        CHECK(t.age(n) == A[n]);
        CHECK(age_process(t, n) == A[n]);
        CHECK(t.increment(n) == S[n] - S[n - 1]);
    }
    CHECK(t.position_at(2.5) == Approx(-1.5));
    CHECK_THROWS_AS(t.position_at(10.5), std::out_of_range);
    CHECK_THROWS_AS(t.age(0), std::out_of_range);
}

TEST_CASE("skeleton and counting process", "[walk]")
{
    const Trajectory t = example_path();
    const Skeleton sk = skeleton(t);
    CHECK(sk.T == std::vector<std::uint64_t>{0, 5, 10});
    CHECK(sk.M == std::vector<std::int64_t>{0, 1, 4});
    CHECK(counting(t, 7.0) == 1);
    CHECK(counting(t, 4.9) == 0);
    CHECK(counting(t, 5.0) == 1);
    CHECK(counting(t, 10.0) == 2);

    const Trajectory open({{Direction::down, 2}, {Direction::up, 3}, {Direction::down, 1}, {Direction::up, 4}}, 10,
                          false);
    CHECK(skeleton(open).T == std::vector<std::uint64_t>{0, 5});
}

TEST_CASE("malformed run lists are rejected", "[walk]")
{
    CHECK_THROWS_AS(Trajectory({{Direction::up, 2}}, 2, true), std::invalid_argument);
    CHECK_THROWS_AS(Trajectory({{Direction::down, 2}, {Direction::down, 1}}, 3, true), std::invalid_argument);
    CHECK_THROWS_AS(Trajectory({{Direction::down, 0}}, 0, true), std::invalid_argument);
    CHECK_THROWS_AS(Trajectory({{Direction::down, 2}}, 3, true), std::invalid_argument);
}

TEST_CASE("horizon zero gives an empty path", "[walk]")
{
    const Comb c(CombSpec{ConstantHazard{0.3}, ConstantHazard{0.6}});
    Rng a(1), b(1);
    CHECK(simulate_prw(c, 0, a).runs().empty());
    CHECK(simulate_prw_stepwise(c, 0, b).runs().empty());
}

TEST_CASE("rescale", "[walk]")
{
    const Trajectory t = example_path();
    const RescaledPath r = rescale(t, 5.0, 0.2, 2.0, {0.0, 1.0, 2.0});
    CHECK(r.values == std::vector<double>{0.0, 0.0, 1.0});
    CHECK_THROWS_AS(rescale(t, 5.0, 0.0, 0.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(rescale(t, 0.0, 0.0, 1.0, {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(rescale(t, 5.0, 0.0, 1.0, {2.5}), std::out_of_range);
}

TEST_CASE("sample_positions matches the stored path", "[walk]")
{
    const Comb c(CombSpec{PowerHazard{1.5, 1.0}, ConstantHazard{0.4}});
    const std::vector<double> times{0.0, 3.5, 17.0, 250.25, 999.0, 1000.0};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng a(seed), b(seed);
        const Trajectory t = simulate_prw(c, 1000, a);
        const std::vector<double> s = sample_positions(c, 1000, times, b);
        for (std::size_t i = 0; i < times.size(); ++i)
            CHECK(s[i] == Approx(t.position_at(times[i])));
    }
}

TEST_CASE("trajectory CSV round-trip", "[walk][io]")
{
    const Comb c(CombSpec{ConstantHazard{0.2}, PowerHazard{0.8, 1.0}});
    Rng rng(8);
    const Trajectory t = simulate_prw(c, 500, rng);
    std::ostringstream out;
    out << "# seed = 8\n";
    write_trajectory_csv(out, t);
    std::istringstream in(out.str());
    const Trajectory back = read_trajectory_csv(in);
    CHECK(back.runs() == t.runs());
    CHECK(back.horizon() == 500);

    auto error_at = [](const std::string& text) {
        std::istringstream s(text);
        try {
            read_trajectory_csv(s);
        } catch (const ConfigError& e) {
            return e.key_path();
        }
        return std::string("(accepted)");
    };
    CHECK(error_at("") == "trajectory");
    CHECK(error_at("n,S,X\n") == "trajectory:1");
    CHECK(error_at("n,S_n,X_n,A_n\n1,-1,-1,1\n2,0,1,2\n") == "trajectory:3");
    CHECK(error_at("n,S_n,X_n,A_n\n1,1,1,1\n") == "trajectory:2");
    CHECK(error_at("n,S_n,X_n,A_n\n1,-1,-1,1\n3,-2,-1,2\n") == "trajectory:3");
    CHECK(error_at("n,S_n,X_n,A_n\n1,-1,-1,x\n") == "trajectory:2");
}

TEST_CASE("stepwise and run-level simulation agree in law", "[walk][sampling]")
{
    const Comb c(CombSpec{TableHazard{{0.1, 0.6}, PowerExtension{1.2}}, ConstantHazard{0.35}});
    const int reps = 20000;
    std::vector<double> a(reps), b(reps), ra(reps), rb(reps);
    for (int i = 0; i < reps; ++i) {
        Rng r1(derive_seed(1, i)), r2(derive_seed(2, i));
        const Trajectory t1 = simulate_prw(c, 200, r1);
        const Trajectory t2 = simulate_prw_stepwise(c, 200, r2);
        a[i] = static_cast<double>(t1.position(200));
        b[i] = static_cast<double>(t2.position(200));
        ra[i] = static_cast<double>(t1.runs().size());
        rb[i] = static_cast<double>(t2.runs().size());
    }
    // 99.9% two-sample critical value; conservative for lattice data
    CHECK(ks_two_sample(a, b) < 0.0195);
    CHECK(ks_two_sample(ra, rb) < 0.0195);
}
