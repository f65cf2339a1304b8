#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "prw/kv_config.hpp"
#include "prw/rng.hpp"

namespace prw {

enum class Direction : std::uint8_t { up, down };

inline Direction opposite(Direction d) { return d == Direction::up ? Direction::down : Direction::up; }
inline int sign(Direction d) { return d == Direction::up ? 1 : -1; }
inline char to_char(Direction d) { return d == Direction::up ? 'u' : 'd'; }

// alpha_k = p for every k.
struct ConstantHazard {
    double p;
    bool operator==(const ConstantHazard&) const = default;
};

// Tail T(n) = min(1, c n^{-a}), so alpha_k ~ a/k and the tail index is a.
struct PowerHazard {
    double a;
    double c = 1.0;
    bool operator==(const PowerHazard&) const = default;
};

// Hazards beyond a table: alpha_k = p.
struct ConstantExtension {
    double p;
    bool operator==(const ConstantExtension&) const = default;
};

// Hazards beyond a table of length L: T(n) = T(L) (L/n)^a.
struct PowerExtension {
    double a;
    bool operator==(const PowerExtension&) const = default;
};

using TailRule = std::variant<ConstantExtension, PowerExtension>;

// Explicit alpha_1..alpha_L followed by a tail rule.
struct TableHazard {
    std::vector<double> values;
    TailRule tail;
    bool operator==(const TableHazard&) const = default;
};

using HazardFamily = std::variant<ConstantHazard, PowerHazard, TableHazard>;

// Throws ConfigError (key path `path`) when parameters are out of range.
void validate_family(const HazardFamily& family, const std::string& path = "");

// Runs are a.s. finite: some alpha_k = 1 or sum alpha_k = infinity.
bool check_assumption1(const HazardFamily& family);

std::string describe(const HazardFamily& family);

enum class TailKind { vanishing, geometric, power };

// Law of a run length tau, from its hazard sequence.
class PersistenceLaw {
public:
    static constexpr std::uint64_t max_run = std::uint64_t{1} << 62;

    explicit PersistenceLaw(HazardFamily family);

    const HazardFamily& family() const { return family_; }

    // alpha_k, k >= 1
    double hazard(std::uint64_t k) const;
    // P(tau > t) = T(floor t)
    double tail(double t) const;
    double tail_at(std::uint64_t n) const;
    double pmf(std::uint64_t n) const;
    // Theta(t) = E[tau ^ t]
    double truncated_mean(double t) const;
    // V(t) = E[tau^2 1{tau <= t}]
    double truncated_second_moment(double t) const;
    // M(t) = E[tau 1{tau <= t}]
    double truncated_first_moment(double t) const;

    bool integrable() const;
    bool square_integrable() const;
    std::optional<double> mean() const;
    // Regular-variation index of a power tail; empty for light tails.
    std::optional<double> tail_index() const;

    TailKind tail_kind() const { return kind_; }
    // Geometric ratio q, or power exponent a.
    double tail_parameter() const { return kind_ == TailKind::power ? power_a_ : q_; }
    // log K with T(n) ~ K q^n (geometric) or K n^{-a} (power).
    double log_tail_constant() const;

    // tau is a.s. constant.
    bool degenerate() const;

    // Inverse-tail sampler.
    std::uint64_t sample(Rng& rng) const;
    // Sequential Bernoulli(alpha_k) stopping; identical in law to sample().
    std::uint64_t sample_sequential(Rng& rng) const;

private:
    std::uint64_t floor_index(double t) const;
    double sum0_beyond(std::uint64_t lo, std::uint64_t hi) const;
    double sum1_beyond(std::uint64_t lo, std::uint64_t hi) const;
    double s0(std::uint64_t n) const;
    double s1(std::uint64_t n) const;

    HazardFamily family_;
    std::uint64_t L_ = 0;  // end of the explicit region
    std::uint64_t P_ = 0;  // end of the tabulated region, P_ >= L_
    TailKind kind_ = TailKind::geometric;
    double q_ = 0.0;
    double power_a_ = 0.0;
    double power_c_ = 0.0;
    std::vector<double> tail_;   // T(0..P)
    std::vector<double> sum0_;   // sum_{k<n} T(k), n = 0..P+1
    std::vector<double> sum1_;   // sum_{k<n} k T(k)
};

struct CombSpec {
    HazardFamily up;
    HazardFamily down;
    bool operator==(const CombSpec&) const = default;
};

// Validated comb with its two persistence laws.
class Comb {
public:
    explicit Comb(const CombSpec& spec);

    const CombSpec& spec() const { return spec_; }
    const PersistenceLaw& law(Direction d) const { return d == Direction::up ? up_ : down_; }
    const PersistenceLaw& up() const { return up_; }
    const PersistenceLaw& down() const { return down_; }

private:
    CombSpec spec_;
    PersistenceLaw up_;
    PersistenceLaw down_;
};

// Finite graft: context words read from the most recent letter backwards,
// e.g. "uud" is two ups preceded by a down; longer words refine it.
struct GraftSpec {
    std::map<std::string, double> entries;
    std::size_t depth() const;
};

void validate_graft(const GraftSpec& graft);

// Lower and upper comb envelopes of a grafted comb.
std::pair<CombSpec, CombSpec> envelope_transitions(const CombSpec& comb, const GraftSpec& graft);

// Configuration I/O. Keys: <prefix>up.family, <prefix>up.p, ... (see README).
HazardFamily read_hazard_family(const KeyValueFile& kv, const std::string& prefix);
CombSpec read_comb(const KeyValueFile& kv, const std::string& prefix = "");
GraftSpec read_graft(const KeyValueFile& kv, const std::string& prefix = "graft.");
void write_hazard_family(Report& out, const std::string& prefix, const HazardFamily& family);
void write_comb(Report& out, const CombSpec& comb, const std::string& prefix = "");

} // namespace prw
