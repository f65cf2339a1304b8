#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prw/comb_model.hpp"
#include "prw/kv_config.hpp"
#include "prw/lamperti_limit.hpp"
#include "prw/parallel.hpp"
#include "prw/rng.hpp"
#include "prw/scaling_laws.hpp"
#include "prw/stable_proc.hpp"
#include "prw/stat_verify.hpp"
#include "prw/walk_sim.hpp"

using namespace prw;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_fail = 1;
constexpr int exit_usage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    bool timings = false;

    std::uint64_t default_seed() const
    {
        if (seed)
            return *seed;
        if (const char* env = std::getenv("PRW_SEED"))
            return parse_uint(env, "PRW_SEED");
        return 1;
    }
    unsigned worker_count() const { return threads == 0 ? default_threads() : threads; }
};

std::ofstream open_output(const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot open '" + path + "' for writing");
    return out;
}

// Writes to `path`, or stdout when empty or "-".
void emit(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out = open_output(path);
    out << text;
    if (!out)
        throw UsageError("write to '" + path + "' failed");
}

void check_writable(const std::string& path)
{
    if (!path.empty() && path != "-")
        open_output(path);
}

using Clock = std::chrono::steady_clock;

void finish_timing(Report& rep, const Globals& g, Clock::time_point start)
{
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (g.timings)
        rep.add("timing.seconds", secs);
    else
        std::fprintf(stderr, "elapsed %.3f s\n", secs);
}

struct SimulateArgs {
    std::string comb;
    std::uint64_t horizon = 0;
    std::string out;
    std::string runs;
    bool stepwise = false;
};

int cmd_simulate(const SimulateArgs& a, const Globals& g)
{
    KeyValueFile kv = KeyValueFile::load(a.comb);
    const Comb comb(read_comb(kv));
    kv.reject_unused();
    check_writable(a.out);
    check_writable(a.runs);
    const std::uint64_t seed = g.default_seed();
    Rng rng(seed);
    const Trajectory traj = a.stepwise ? simulate_prw_stepwise(comb, a.horizon, rng) : simulate_prw(comb, a.horizon, rng);
    if (!a.out.empty()) {
        std::ostringstream os;
        os << "# seed = " << seed << '\n';
        write_trajectory_csv(os, traj);
        emit(a.out, os.str());
    }
    if (!a.runs.empty()) {
        std::ostringstream os;
        os << "# seed = " << seed << '\n';
        write_runs_csv(os, traj);
        emit(a.runs, os.str());
    }
    Report rep;
    rep.add("simulate.seed", seed);
    rep.add("simulate.horizon", a.horizon);
    rep.add("simulate.runs", static_cast<std::uint64_t>(traj.runs().size()));
    rep.add("simulate.S_n", traj.position(a.horizon));
    if (a.horizon > 0)
        rep.add("simulate.drift", static_cast<double>(traj.position(a.horizon)) / static_cast<double>(a.horizon));
    if (a.out.empty() || a.out == "-") {
        std::cerr << rep.str();
    } else {
        std::cout << rep.str();
    }
    return exit_ok;
}

struct DensityArgs {
    double alpha = 0.5;
    double m = 0.0;
    double t = 1.0;
    unsigned points = 201;
    std::string out;
};

int cmd_density(const DensityArgs& a)
{
    if (!(a.alpha > 0.0 && a.alpha < 1.0))
        throw UsageError("--alpha must lie in (0,1)");
    if (!(a.m > -1.0 && a.m < 1.0))
        throw UsageError("--m must lie in (-1,1)");
    if (!(a.t > 0.0))
        throw UsageError("--t must be > 0");
    if (a.points == 0)
        throw UsageError("--points must be >= 1");
    check_writable(a.out);
    const DensityEvaluator dens(a.alpha, a.m);
    std::ostringstream os;
    os << "x,f,F\n";
    for (unsigned i = 1; i <= a.points; ++i) {
        const double x = a.t * (-1.0 + 2.0 * i / (a.points + 1.0));
        os << format_real(x) << ',' << format_real(dens.density(a.t, x)) << ',' << format_real(dens.cdf(a.t, x))
           << '\n';
    }
    emit(a.out, os.str());
    return exit_ok;
}

struct SampleArgs {
    double alpha = 0.5;
    double m = 0.0;
    double t = 1.0;
    std::uint64_t count = 1000;
    std::string method = "density";
    double epsilon = 0.0;
    std::string out;
    std::string path_out;
    unsigned path_points = 1000;
};

int cmd_sample_limit(const SampleArgs& a, const Globals& g)
{
    if (!(a.alpha > 0.0 && a.alpha < 1.0))
        throw UsageError("--alpha must lie in (0,1)");
    if (!(a.m > -1.0 && a.m < 1.0))
        throw UsageError("--m must lie in (-1,1)");
    if (!(a.t > 0.0))
        throw UsageError("--t must be > 0");
    check_writable(a.out);
    check_writable(a.path_out);
    const std::uint64_t seed = g.default_seed();
    const double eps = a.epsilon > 0.0 ? a.epsilon : 1e-6 * a.t;
    const DensityEvaluator dens(a.alpha, a.m);
    const auto values = run_replicas(a.count, g.worker_count(), [&](std::size_t i) {
        Rng rng = replica_rng(seed, i);
        if (a.method == "density")
            return dens.sample(a.t, rng);
        if (a.method == "ratio")
            return a.t * sample_ratio(a.alpha, a.m, rng);
        return sample_anomalous(a.alpha, a.m, a.t, eps, rng);
    });
    std::ostringstream os;
    os << "# seed = " << seed << "\nindex,value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        os << i << ',' << format_real(values[i]) << '\n';
    emit(a.out, os.str());
    if (!a.path_out.empty()) {
        Rng rng = replica_rng(seed, a.count);
        const AnomalousPath path(labelled_subordinator_until(a.alpha, a.m, a.t, eps, rng));
        std::vector<double> grid;
        for (unsigned i = 0; i <= a.path_points; ++i)
            grid.push_back(a.t * i / a.path_points);
        std::ostringstream ps;
        ps << "# seed = " << seed << '\n';
        write_anomalous_csv(ps, path, grid);
        emit(a.path_out, ps.str());
    }
    return exit_ok;
}

struct VerifyArgs {
    std::string scenario;
    std::string report;
};

int cmd_verify(const VerifyArgs& a, const Globals& g)
{
    KeyValueFile kv = KeyValueFile::load(a.scenario);
    if (!kv.has("seed"))
        kv.set("seed", std::to_string(g.default_seed()));
    VerificationScenario sc = read_scenario(kv);
    if (g.seed)
        sc.seed = *g.seed;
    check_writable(a.report);
    const auto start = Clock::now();
    const VerificationResult res = verify_regime(sc, g.worker_count());
    Report rep;
    write_verification_report(rep, res);
    finish_timing(rep, g, start);
    emit(a.report, rep.str());
    return res.pass ? exit_ok : exit_fail;
}

struct EstimateArgs {
    std::string trajectory;
    double k_frac = 0.05;
    std::string report;
};

Regime implied_regime(double alpha_hat)
{
    if (alpha_hat < 0.95)
        return Regime::anomalous;
    if (alpha_hat <= 1.05)
        return Regime::cauchy;
    if (alpha_hat < 1.95)
        return Regime::generic_stable;
    return Regime::gaussian;
}

int cmd_estimate(const EstimateArgs& a, const Globals& g)
{
    std::ifstream in(a.trajectory);
    if (!in)
        throw UsageError("cannot open '" + a.trajectory + "'");
    check_writable(a.report);
    const Trajectory traj = read_trajectory_csv(in);
    const auto& runs = traj.runs();
    // the final run is censored by the end of the file
    const std::size_t complete = runs.empty() ? 0 : runs.size() - 1;
    double sum_up = 0.0, sum_down = 0.0;
    std::size_t n_up = 0, n_down = 0;
    std::vector<double> lengths;
    for (std::size_t i = 0; i < complete; ++i) {
        const double len = static_cast<double>(runs[i].length);
        lengths.push_back(len);
        if (runs[i].direction == Direction::up) {
            sum_up += len;
            ++n_up;
        } else {
            sum_down += len;
            ++n_down;
        }
    }
    Report rep;
    rep.add("estimate.steps", traj.horizon());
    rep.add("estimate.runs.up", static_cast<std::uint64_t>(n_up));
    rep.add("estimate.runs.down", static_cast<std::uint64_t>(n_down));
    if (n_up > 0 && n_down > 0) {
        const double tu = sum_up / static_cast<double>(n_up);
        const double td = sum_down / static_cast<double>(n_down);
        rep.add("estimate.m_hat", (tu - td) / (tu + td));
    } else {
        rep.add("estimate.m_hat", "undefined");
    }
    rep.add("estimate.k_frac", a.k_frac);
    try {
        const HillEstimate h = hill_estimate(lengths, a.k_frac, g.default_seed());
        rep.add("estimate.alpha", h.alpha);
        rep.add("estimate.alpha.ci_low", h.ci_low);
        rep.add("estimate.alpha.ci_high", h.ci_high);
        rep.add("estimate.alpha.k", static_cast<std::uint64_t>(h.k));
        rep.add("estimate.regime", to_string(implied_regime(h.alpha)));
    } catch (const std::domain_error& e) {
        rep.add("estimate.alpha", "declined");
        rep.add("estimate.notice", std::string("heavy-tail estimation declined: ") + e.what());
        rep.add("estimate.regime", to_string(Regime::gaussian));
    }
    emit(a.report, rep.str());
    return exit_ok;
}

struct SelftestArgs {
    std::uint64_t draws = 100000;
    std::string report;
};

int cmd_selftest(const SelftestArgs& a, const Globals& g)
{
    if (a.draws < 1000)
        throw UsageError("--draws must be >= 1000");
    check_writable(a.report);
    const std::uint64_t seed = g.default_seed();
    const std::vector<double> grid{-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};
    Report rep;
    rep.add("selftest.seed", seed);
    rep.add("selftest.draws", a.draws);
    bool pass = true;
    const std::vector<std::pair<double, double>> laws{{0.5, 0.5}, {1.0, 0.0}, {1.5, 0.5}, {2.0, 0.0}};
    for (std::size_t l = 0; l < laws.size(); ++l) {
        const StableParams p = StableParams::limit_law(laws[l].first, laws[l].second);
        Rng rng = replica_rng(seed, l);
        std::vector<double> x(a.draws);
        for (auto& v : x)
            v = sample_stable(p, rng);
        double worst = 0.0;
        const auto cf = empirical_char_fn(x, grid);
        for (const auto& pt : cf) {
            const std::complex<double> exact = std::exp(stable_log_char(p, pt.u));
            const double zr = std::abs(pt.value.real() - exact.real()) / std::max(pt.se_real, 1e-300);
            const double zi = std::abs(pt.value.imag() - exact.imag()) / std::max(pt.se_imag, 1e-300);
            worst = std::max({worst, zr, pt.se_imag > 0.0 ? zi : 0.0});
        }
        const std::string key = "selftest.stable." + std::to_string(l) + ".";
        rep.add(key + "alpha", p.alpha);
        rep.add(key + "beta", p.beta);
        rep.add(key + "max_z", worst);
        rep.add(key + "result", worst <= 3.0 ? "PASS" : "FAIL");
        pass = pass && worst <= 3.0;
    }
    Rng rng = replica_rng(seed, laws.size());
    const double alpha = 0.5;
    std::vector<double> t(a.draws);
    for (auto& v : t)
        v = sample_positive_stable(alpha, rng);
    for (double lam : {1.0, 2.0}) {
        double acc = 0.0;
        for (double v : t)
            acc += std::exp(-lam * v);
        const double err = std::abs(acc / static_cast<double>(t.size()) - std::exp(-std::pow(lam, alpha)));
        const std::string key = "selftest.laplace.lambda_" + format_real(lam) + ".";
        rep.add(key + "error", err);
        rep.add(key + "result", err < 0.005 ? "PASS" : "FAIL");
        pass = pass && err < 0.005;
    }
    rep.add("result", pass ? "PASS" : "FAIL");
    emit(a.report, rep.str());
    return pass ? exit_ok : exit_fail;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Persistent random walks on double-infinite combs: simulation, scaling limits and verification"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "Master seed (default: $PRW_SEED, else 1)");
    app.add_option("--threads", g.threads, "Worker threads (default: hardware concurrency)");
    app.add_flag("--timings", g.timings, "Include wall-clock runtimes in reports");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Simulate one walk and write trajectory/run CSVs");
    c_sim->add_option("--comb", sim.comb, "Comb file (up.*/down.* keys)")->required();
    c_sim->add_option("--horizon", sim.horizon, "Number of steps")->required();
    c_sim->add_option("--out", sim.out, "Trajectory CSV (n,S_n,X_n,A_n)");
    c_sim->add_option("--runs", sim.runs, "Run CSV (index,direction,length)");
    c_sim->add_flag("--stepwise", sim.stepwise, "Per-step Bernoulli simulation");

    DensityArgs den;
    auto* c_den = app.add_subcommand("density", "Tabulate the arcsine Lamperti density and CDF");
    c_den->add_option("--alpha", den.alpha, "Index in (0,1)")->required();
    c_den->add_option("--m", den.m, "Mean drift in (-1,1)");
    c_den->add_option("--t", den.t, "Time > 0");
    c_den->add_option("--points", den.points, "Interior grid points on (-t,t)");
    c_den->add_option("--out", den.out, "Output CSV (x,f,F); default stdout");

    SampleArgs smp;
    auto* c_smp = app.add_subcommand("sample-limit", "Draw the anomalous-diffusion marginal");
    c_smp->add_option("--alpha", smp.alpha, "Index in (0,1)")->required();
    c_smp->add_option("--m", smp.m, "Mean drift in (-1,1)");
    c_smp->add_option("--t", smp.t, "Time > 0");
    c_smp->add_option("--count", smp.count, "Number of draws");
    c_smp->add_option("--method", smp.method, "density | ratio | path")
        ->check(CLI::IsMember({"density", "ratio", "path"}));
    c_smp->add_option("--epsilon", smp.epsilon, "Jump truncation for --method path (default 1e-6 t)");
    c_smp->add_option("--out", smp.out, "Output CSV (index,value); default stdout");
    c_smp->add_option("--path-out", smp.path_out, "Also export one path as CSV (t,S,label,age)");
    c_smp->add_option("--path-points", smp.path_points, "Grid intervals of the exported path");

    VerifyArgs ver;
    auto* c_ver = app.add_subcommand("verify", "Run a verification scenario; exit 0 pass, 1 fail, 2 usage");
    c_ver->add_option("scenario", ver.scenario, "Scenario file")->required();
    c_ver->add_option("--report", ver.report, "Report file; default stdout");

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "Estimate mean drift and tail index from a trajectory CSV");
    c_est->add_option("trajectory", est.trajectory, "Trajectory CSV")->required();
    c_est->add_option("--k-frac", est.k_frac, "Hill fraction in (0,0.2]");
    c_est->add_option("--report", est.report, "Report file; default stdout");

    SelftestArgs st;
    auto* c_st = app.add_subcommand("selftest", "Sampler self-test: characteristic and Laplace functions");
    c_st->add_option("--draws", st.draws, "Draws per law");
    c_st->add_option("--report", st.report, "Report file; default stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }
    if (*seed_opt)
        g.seed = seed_flag;

    try {
        if (*c_sim)
            return cmd_simulate(sim, g);
        if (*c_den)
            return cmd_density(den);
        if (*c_smp)
            return cmd_sample_limit(smp, g);
        if (*c_ver)
            return cmd_verify(ver, g);
        if (*c_est)
            return cmd_estimate(est, g);
        if (*c_st)
            return cmd_selftest(st, g);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}
