#pragma once

#include <cstdint>
#include <random>

namespace mola {

// splitmix64; used to derive well-separated per-replicate streams from
// (master seed, replicate seed) pairs.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d4a9ae33a4e9bdULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix_seeds(std::uint64_t master, std::uint64_t replicate) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= replicate + 0x9e3779b97f4a7c15ULL;
    return a ^ splitmix64(s);
}

// Per-replicate random stream. Each replicate owns one; there is no
// global RNG anywhere in the library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng for_replicate(std::uint64_t master, std::uint64_t replicate) {
        return Rng(mix_seeds(master, replicate));
    }

    double uniform() { return unit_(engine_); }

    // Uniform integer in [0, n).
    int below(int n) {
        return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(engine_));
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace mola
