#include "prw/walk_sim.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace prw {

Trajectory::Trajectory(std::vector<Run> runs, std::uint64_t horizon, bool last_complete)
    : runs_(std::move(runs)), horizon_(horizon), last_complete_(last_complete)
{
    std::uint64_t t = 0;
    std::int64_t s = 0;
    start_.reserve(runs_.size());
    start_pos_.reserve(runs_.size());
    for (std::size_t i = 0; i < runs_.size(); ++i) {
        const Run& r = runs_[i];
        if (r.length == 0)
            throw std::invalid_argument("run lengths must be >= 1");
        if (r.direction != (i % 2 == 0 ? Direction::down : Direction::up))
            throw std::invalid_argument("runs must alternate starting with a down-run");
        start_.push_back(t);
        start_pos_.push_back(s);
        t += r.length;
        s += sign(r.direction) * static_cast<std::int64_t>(r.length);
    }
    if (t != horizon_)
        throw std::invalid_argument("run lengths must add up to the horizon");
}

std::size_t Trajectory::run_containing(std::uint64_t n) const
{
    if (n == 0 || n > horizon_)
        throw std::out_of_range("step index outside [1, horizon]");
    auto it = std::upper_bound(start_.begin(), start_.end(), n - 1);
    return static_cast<std::size_t>(it - start_.begin()) - 1;
}

std::int64_t Trajectory::position(std::uint64_t n) const
{
    if (n == 0)
        return 0;
    const std::size_t i = run_containing(n);
    return start_pos_[i] + sign(runs_[i].direction) * static_cast<std::int64_t>(n - start_[i]);
}

double Trajectory::position_at(double t) const
{
    if (!(t >= 0.0) || t > static_cast<double>(horizon_))
        throw std::out_of_range("time outside [0, horizon]");
    const auto n = static_cast<std::uint64_t>(std::floor(t));
    const double frac = t - static_cast<double>(n);
    const double s = static_cast<double>(position(n));
    if (frac == 0.0)
        return s;
    return s + frac * increment(n + 1);
}

int Trajectory::increment(std::uint64_t n) const
{
    return sign(runs_[run_containing(n)].direction);
}

std::uint64_t Trajectory::age(std::uint64_t n) const
{
    return n - start_[run_containing(n)];
}

Trajectory simulate_prw(const Comb& comb, std::uint64_t horizon, Rng& rng)
{
    std::vector<Run> runs;
    std::uint64_t t = 0;
    Direction dir = Direction::down;
    bool complete = true;
    while (t < horizon) {
        std::uint64_t len = comb.law(dir).sample(rng);
        const std::uint64_t room = horizon - t;
        complete = len <= room;
        len = std::min(len, room);
        runs.push_back({dir, len});
        t += len;
        dir = opposite(dir);
    }
    return Trajectory(std::move(runs), horizon, complete);
}

Trajectory simulate_prw_stepwise(const Comb& comb, std::uint64_t horizon, Rng& rng)
{
    std::vector<Run> runs;
    if (horizon == 0)
        return Trajectory(std::move(runs), 0, true);
    Direction dir = Direction::down;
    std::uint64_t age = 1;
    for (std::uint64_t n = 1; n < horizon; ++n) {
        if (rng.uniform() < comb.law(dir).hazard(age)) {
            runs.push_back({dir, age});
            dir = opposite(dir);
            age = 1;
        } else {
            ++age;
        }
    }
    runs.push_back({dir, age});
    const bool complete = rng.uniform() < comb.law(dir).hazard(age);
    return Trajectory(std::move(runs), horizon, complete);
}

std::vector<double> sample_positions(const Comb& comb, std::uint64_t horizon, std::span<const double> times,
                                     Rng& rng)
{
    std::vector<double> out(times.size());
    std::size_t idx = 0;
    std::uint64_t t0 = 0;
    std::int64_t pos = 0;
    Direction dir = Direction::down;
    while (t0 < horizon) {
        const std::uint64_t len = std::min(comb.law(dir).sample(rng), horizon - t0);
        const std::uint64_t end = t0 + len;
        const double s = sign(dir);
        while (idx < times.size() && times[idx] <= static_cast<double>(end)) {
            out[idx] = static_cast<double>(pos) + s * (times[idx] - static_cast<double>(t0));
            ++idx;
        }
        pos += sign(dir) * static_cast<std::int64_t>(len);
        t0 = end;
        dir = opposite(dir);
    }
    if (idx < times.size() && times[idx] > static_cast<double>(horizon))
        throw std::out_of_range("sample_positions: time beyond horizon");
    for (; idx < times.size(); ++idx)
        out[idx] = static_cast<double>(pos);
    return out;
}

Skeleton skeleton(const Trajectory& traj)
{
    Skeleton sk;
    sk.M.push_back(0);
    sk.T.push_back(0);
    const auto& runs = traj.runs();
    std::uint64_t t = 0;
    std::int64_t s = 0;
    for (std::size_t i = 0; i + 1 < runs.size(); i += 2) {
        const Run& d = runs[i];
        const Run& u = runs[i + 1];
        const bool last = i + 2 == runs.size();
        if (last && !traj.last_run_complete())
            break;
        t += d.length + u.length;
        s += static_cast<std::int64_t>(u.length) - static_cast<std::int64_t>(d.length);
        sk.T.push_back(t);
        sk.M.push_back(s);
    }
    return sk;
}

std::uint64_t counting(const Trajectory& traj, double t)
{
    if (!(t >= 0.0) || t > static_cast<double>(traj.horizon()))
        throw std::out_of_range("counting: t outside [0, horizon]");
    const Skeleton sk = skeleton(traj);
    auto it = std::upper_bound(sk.T.begin(), sk.T.end(), t,
                               [](double v, std::uint64_t T) { return v < static_cast<double>(T); });
    return static_cast<std::uint64_t>(it - sk.T.begin()) - 1;
}

std::uint64_t age_process(const Trajectory& traj, std::uint64_t n)
{
    return traj.age(n);
}

RescaledPath rescale(const Trajectory& traj, double u, double m, double lambda, std::vector<double> time_grid)
{
    if (!(lambda > 0.0))
        throw std::invalid_argument("rescale: lambda must be > 0");
    if (!(u > 0.0))
        throw std::invalid_argument("rescale: u must be > 0");
    RescaledPath out;
    out.u = u;
    out.values.reserve(time_grid.size());
    for (double t : time_grid) {
        if (!(t >= 0.0) || u * t > static_cast<double>(traj.horizon()))
            throw std::out_of_range("rescale: time grid exceeds the simulated horizon");
        out.values.push_back((traj.position_at(u * t) - m * u * t) / lambda);
    }
    out.time_grid = std::move(time_grid);
    return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    out << "n,S_n,X_n,A_n\n";
    std::string buf;
    std::uint64_t n = 0;
    std::int64_t s = 0;
    for (const Run& r : traj.runs()) {
        const int x = sign(r.direction);
        for (std::uint64_t a = 1; a <= r.length; ++a) {
            ++n;
            s += x;
            buf += std::to_string(n);
            buf += ',';
            buf += std::to_string(s);
            buf += ',';
            buf += x > 0 ? "1" : "-1";
            buf += ',';
            buf += std::to_string(a);
            buf += '\n';
            if (buf.size() > (1u << 20)) {
                out << buf;
                buf.clear();
            }
        }
    }
    out << buf;
}

void write_runs_csv(std::ostream& out, const Trajectory& traj)
{
    out << "index,direction,length\n";
    const auto& runs = traj.runs();
    for (std::size_t i = 0; i < runs.size(); ++i)
        out << i << ',' << to_char(runs[i].direction) << ',' << runs[i].length << '\n';
}

Trajectory read_trajectory_csv(std::istream& in)
{
    std::string line;
    std::uint64_t lineno = 0;
    do {
        if (!std::getline(in, line))
            throw ConfigError("trajectory", "missing header");
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
    } while (!line.empty() && line[0] == '#');
    if (line != "n,S_n,X_n,A_n")
        throw ConfigError("trajectory:" + std::to_string(lineno), "expected header 'n,S_n,X_n,A_n'");
    std::vector<Run> runs;
    std::uint64_t n = 0;
    std::int64_t s = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        const std::string where = "trajectory:" + std::to_string(lineno);
        std::stringstream ss(line);
        std::string f[4];
        for (auto& field : f)
            if (!std::getline(ss, field, ','))
                throw ConfigError(where, "expected 4 comma-separated fields");
        std::string extra;
        if (std::getline(ss, extra, ','))
            throw ConfigError(where, "expected 4 comma-separated fields");
        long long vn, vs, vx, va;
        try {
            std::size_t p;
            vn = std::stoll(f[0], &p);
            if (p != f[0].size()) throw std::invalid_argument("n");
            vs = std::stoll(f[1], &p);
            if (p != f[1].size()) throw std::invalid_argument("S");
            vx = std::stoll(f[2], &p);
            if (p != f[2].size()) throw std::invalid_argument("X");
            va = std::stoll(f[3], &p);
            if (p != f[3].size()) throw std::invalid_argument("A");
        } catch (const std::exception&) {
            throw ConfigError(where, "non-integer field");
        }
        if (vn != static_cast<long long>(n + 1))
            throw ConfigError(where, "step indices must be consecutive from 1");
        if (vx != 1 && vx != -1)
            throw ConfigError(where, "X_n must be +1 or -1");
        if (vs != s + vx)
            throw ConfigError(where, "S_n inconsistent with X_n");
        const Direction d = vx > 0 ? Direction::up : Direction::down;
        if (runs.empty() || runs.back().direction != d) {
            if (runs.empty() && d != Direction::down)
                throw ConfigError(where, "trajectory must start with a down-step");
            runs.push_back({d, 0});
        }
        ++runs.back().length;
        if (va != static_cast<long long>(runs.back().length))
            throw ConfigError(where, "A_n inconsistent with the run structure");
        n = static_cast<std::uint64_t>(vn);
        s = vs;
    }
    return Trajectory(std::move(runs), n, false);
}

} // namespace prw
