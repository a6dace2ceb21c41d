#pragma once

#include <cstdint>

namespace bbr {

// splitmix64; output sequence is fixed by the seed and identical across
// platforms, which is what the determinism contract needs.  Every consumer
// takes an explicit Rng (or seed) rather than touching global state.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed), seed_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound), rejection sampled so the distribution does not
    // depend on the platform's division quirks.
    uint64_t below(uint64_t bound) {
        if (bound <= 1) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % bound;
    }

    bool coin() { return next_u64() & 1; }

    double unit_real() { return double(next_u64() >> 11) * 0x1.0p-53; }

    // Independent stream derived from the original seed and a tag; children
    // with distinct tags never share state with the parent or each other.
    Rng child(uint64_t tag) const {
        uint64_t z = seed_ + 0x9e3779b97f4a7c15ull * (tag + 0x632be59bd9b4e019ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return Rng(z ^ (z >> 31));
    }

    uint64_t seed() const { return seed_; }

  private:
    uint64_t state_;
    uint64_t seed_;
};

}  // namespace bbr
