#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "prw/comb_model.hpp"
#include "prw/rng.hpp"

namespace prw {

struct Run {
    Direction direction;
    std::uint64_t length;
    bool operator==(const Run&) const = default;
};

// Alternating runs starting with a down-run (the walk starts right after an
// up-to-down turn), clipped at the horizon.
class Trajectory {
public:
    Trajectory() = default;
    // `last_complete`: the final run ends at the horizon with a U-turn right after.
    Trajectory(std::vector<Run> runs, std::uint64_t horizon, bool last_complete);

    std::uint64_t horizon() const { return horizon_; }
    const std::vector<Run>& runs() const { return runs_; }
    bool last_run_complete() const { return last_complete_; }

    // S_n, n <= horizon
    std::int64_t position(std::uint64_t n) const;
    // S_t with linear interpolation, 0 <= t <= horizon
    double position_at(double t) const;
    // X_n in {-1, +1}, 1 <= n <= horizon
    int increment(std::uint64_t n) const;
    // A_n, 1 <= n <= horizon
    std::uint64_t age(std::uint64_t n) const;

private:
    std::size_t run_containing(std::uint64_t n) const;

    std::vector<Run> runs_;
    std::uint64_t horizon_ = 0;
    bool last_complete_ = true;
    std::vector<std::uint64_t> start_;   // time before the first step of run i
    std::vector<std::int64_t> start_pos_;
};

struct Skeleton {
    std::vector<std::int64_t> M;   // M_0 = 0, M_n = S_{T_n}
    std::vector<std::uint64_t> T;  // T_0 = 0, T_n = T_{n-1} + tau_n^d + tau_n^u
};

Trajectory simulate_prw(const Comb& comb, std::uint64_t horizon, Rng& rng);
// Per-step Bernoulli simulation; same law as simulate_prw.
Trajectory simulate_prw_stepwise(const Comb& comb, std::uint64_t horizon, Rng& rng);

// S at the given sorted times in [0, horizon], without storing the runs.
// Consumes the RNG exactly as simulate_prw(comb, horizon, rng).
std::vector<double> sample_positions(const Comb& comb, std::uint64_t horizon, std::span<const double> times,
                                     Rng& rng);

Skeleton skeleton(const Trajectory& traj);
// N(t) = max{n : T_n <= t}
std::uint64_t counting(const Trajectory& traj, double t);
std::uint64_t age_process(const Trajectory& traj, std::uint64_t n);

struct RescaledPath {
    double u = 0.0;
    std::vector<double> time_grid;
    std::vector<double> values;
};

RescaledPath rescale(const Trajectory& traj, double u, double m, double lambda, std::vector<double> time_grid);

// CSV: n,S_n,X_n,A_n for n = 1..horizon
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
// CSV: index,direction,length
void write_runs_csv(std::ostream& out, const Trajectory& traj);
// Inverse of write_trajectory_csv; lines starting with '#' are comments.
// Throws ConfigError on malformed input.
Trajectory read_trajectory_csv(std::istream& in);

} // namespace prw
