#pragma once

#include <cstdint>

namespace sdewalk {

// Deterministic random source used everywhere in the library.
//
// Generator: xoshiro256++ (Blackman & Vigna), state seeded through splitmix64.
// The algorithm is fixed by this file, not by the standard library, so a
// (seed, stream) pair produces bit-identical output on every platform and
// toolchain.  Do not swap in std::mt19937 or std:: distributions: golden
// outputs and regression CSVs depend on this exact stream.
//
// Substreams: derive(seed, a, b) hashes the triple into a fresh 64-bit seed.
// Convention used by the library:
//   walk level m of a hierarchy   -> Rng(seed, /*a=*/m,    /*b=*/0)
//   ensemble path i               -> Rng(seed, /*a=*/i,    /*b=*/1)
//   ad-hoc independent streams    -> any other fixed b tag
//
// Coins are consumed most-significant-bit first from 64-bit words; uniforms
// take the top 53 bits.  Both orders are part of the reproducibility contract.

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Rng {
  public:
    explicit Rng(std::uint64_t seed) { reseed(seed); }

    Rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        reseed(derive(seed, a, b));
    }

    // Hash (seed, a, b) into one 64-bit substream seed.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
        std::uint64_t s = seed;
        std::uint64_t h = detail::splitmix64(s);
        s = h ^ (a + 0x9e3779b97f4a7c15ULL);
        h = detail::splitmix64(s);
        s = h ^ (b + 0xbf58476d1ce4e5b9ULL);
        return detail::splitmix64(s);
    }

    void reseed(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = detail::splitmix64(sm);
        bit_count_ = 0;
        bits_ = 0;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Fair coin as +1 / -1, one bit per call, MSB-first within each word.
    int coin() {
        if (bit_count_ == 0) {
            bits_ = next_u64();
            bit_count_ = 64;
        }
        const int out = (bits_ & 0x8000000000000000ULL) ? 1 : -1;
        bits_ <<= 1;
        --bit_count_;
        return out;
    }

  private:
    std::uint64_t s_[4] = {};
    std::uint64_t bits_ = 0;
    int bit_count_ = 0;
};

}  // namespace sdewalk
