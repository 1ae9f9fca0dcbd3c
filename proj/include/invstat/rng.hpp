#pragma once

// Seedable, splittable random streams.
//
// Every Monte Carlo trial runs on its own substream derived from
// (master_seed, stream_index), so results do not depend on execution
// order or thread count.  The derivation is injective in stream_index
// for a fixed master seed: the splitmix64 increment is odd, hence
// index -> initial state is a bijection on 64-bit integers.

#include <array>
#include <cmath>
#include <cstdint>

namespace invstat {

// Weyl increment used by splitmix64 (golden ratio conjugate).
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t splitmix64_mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Minimal splitmix64 engine; used for seeding the main generator.
class SplitMix64 {
  public:
    explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}
    constexpr std::uint64_t next() {
        state_ += kGoldenGamma;
        return splitmix64_mix(state_);
    }

  private:
    std::uint64_t state_;
};

struct RandomStreamSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

// xoshiro256++ (Blackman/Vigna), seeded via splitmix64 as recommended.
class Rng {
  public:
    using result_type = std::uint64_t;

    Rng() : Rng(RandomStreamSpec{0, 0}) {}

    explicit Rng(RandomStreamSpec spec) {
        SplitMix64 sm(spec.master_seed + (spec.stream_index + 1) * kGoldenGamma);
        for (auto& s : state_) s = sm.next();
        // All-zero state is invalid for xoshiro; unreachable in practice
        // but cheap to rule out.
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGoldenGamma;
    }

    Rng(std::uint64_t master_seed, std::uint64_t stream_index)
        : Rng(RandomStreamSpec{master_seed, stream_index}) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type(0); }

    result_type operator()() { return next_u64(); }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1); zero is redrawn (probability 2^-53 per draw).
    double uniform_pos() {
        double u;
        do {
            u = uniform01();
        } while (u == 0.0);
        return u;
    }

    // Standard exponential via inverse CDF; strictly positive and finite.
    double exponential() { return -std::log(uniform_pos()); }

    // Integer uniform on [0, n) by rejection (unbiased).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_index) {
    return Rng(RandomStreamSpec{master_seed, stream_index});
}

}  // namespace invstat
