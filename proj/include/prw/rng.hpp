#pragma once

#include <cstdint>
#include <random>

namespace prw {

// 64-bit Mersenne Twister with hand-rolled transforms so that every variate is
// reproducible across standard library implementations.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() { return std::mt19937_64::min(); }
    static constexpr result_type max() { return std::mt19937_64::max(); }
    result_type operator()() { return engine_(); }

    // [0, 1)
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // (0, 1]
    double uniform_pos() { return 1.0 - uniform(); }
    // (0, 1)
    double uniform_open() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential();
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed for the stream of replica `index` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

inline Rng replica_rng(std::uint64_t master, std::uint64_t index)
{
    return Rng(derive_seed(master, index));
}

} // namespace prw
