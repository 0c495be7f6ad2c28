#pragma once

#include <cstdint>
#include <initializer_list>

namespace ec3r {

// Counter-based deterministic generator (splitmix64 output function over an
// incrementing counter). Streams are derived by hashing (master seed, stream
// ids...), so the draw for round k / trial j never depends on how many draws
// any other part of the run consumed.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(mix(key ^ 0x9e3779b97f4a7c15ull)) {}

    static CounterRng derive(std::uint64_t master, std::initializer_list<std::uint64_t> stream) {
        std::uint64_t k = mix(master + 0x2545f4914f6cdd1dull);
        for (std::uint64_t s : stream) k = mix(k ^ mix(s + 0x9e3779b97f4a7c15ull));
        return CounterRng(k);
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ull * ++counter_); }

    // uniform in [0, 1) with 53 significant bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // unbiased uniform in [0, bound)
    std::uint64_t next_below(std::uint64_t bound) {
        std::uint64_t threshold = -bound % bound;
        for (;;) {
            std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

} // namespace ec3r
