#pragma once

#include <cstdint>
#include <random>

namespace ddsim {

// splitmix64, used to derive independent stream seeds from (seed, purpose, replica).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Purpose tags keep the uniform streams for different event types disjoint,
// so variants driven by the same seed are common-random-number comparable.
enum class StreamPurpose : std::uint64_t {
    CatastropheClock = 1,
    BirthClock = 2,
    Thinning = 3,
    JumpChain = 4,
    GraphSteps = 5,
    Coupling = 6,
    Generic = 7,
};

inline std::mt19937_64 make_stream(std::uint64_t seed, StreamPurpose purpose,
                                   std::uint64_t replica = 0) {
    std::uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ static_cast<std::uint64_t>(purpose) * 0x9e3779b97f4a7c15ULL);
    s = splitmix64(s ^ replica);
    return std::mt19937_64(s);
}

inline double uniform01(std::mt19937_64& g) {
    // strictly inside (0,1) so logs are finite
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

inline double exponential(std::mt19937_64& g, double rate) {
    return -std::log(uniform01(g)) / rate;
}

// Poisson sampler valid for arbitrarily large means; exact below the switchover,
// normal approximation above (relative quantile error < 1e-6 there).
double sample_poisson(std::mt19937_64& g, double mean);

// Binomial sampler for counts beyond the range of the library distribution.
double sample_binomial(std::mt19937_64& g, double n, double p);

// Yule (pure birth, per-capita rate alpha) transition: state after elapsed dt
// starting from x >= 1.  Negative binomial with success parameter exp(-alpha dt),
// sampled through its gamma-Poisson mixture.
double sample_yule_transition(std::mt19937_64& g, double x, double alpha, double dt);

}  // namespace ddsim
