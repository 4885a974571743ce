#pragma once

#include <cstdint>
#include <vector>

namespace qcnn {

// Deterministic RNG shared by every seeded operation in the suite
// (subsampling, shuffles, parameter initialization). The generator is
// xoshiro256** seeded through splitmix64, with the derived-value rules
// below, so that an implementation in any language reproduces identical
// subsamples, shuffles and initial weights from the same 64-bit seed:
//
//   state[0..3] = four consecutive splitmix64 outputs of the seed
//   uniform01   = (next() >> 11) * 2^-53            (double in [0, 1))
//   uniform(a,b)= a + (b - a) * uniform01()
//   bounded(n)  = high 64 bits of next() * n        (integer in [0, n))
//   shuffle     = Fisher-Yates from the top: for i = n-1 .. 1 swap(i, bounded(i+1))

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Lemire multiply-shift; deterministic, no rejection loop.
    std::uint64_t bounded(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t s_[4];
};

} // namespace qcnn
