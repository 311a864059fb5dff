#pragma once

#include <bit>
#include <cstdint>

namespace quadent {

// Seed-stable stream, identical on every platform (unlike the std
// distributions, whose output is implementation-defined).
class SplitMix64 {
   public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

   private:
    std::uint64_t state_;
};

/// Uniform in [0, modulus) by masked rejection.
inline std::uint64_t uniform_elem(SplitMix64& rng, std::uint64_t modulus) {
    const std::uint64_t mask = std::bit_ceil(modulus) - 1;
    for (;;) {
        const std::uint64_t v = rng.next() & mask;
        if (v < modulus) return v;
    }
}

/// Derives an independent seed for a sub-stream (trial, retry, purpose).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
    SplitMix64 s(base);
    std::uint64_t h = s.next();
    for (std::uint64_t v : {a, b, c}) {
        SplitMix64 t(h ^ (v * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
        h = t.next();
    }
    return h;
}

}  // namespace quadent
