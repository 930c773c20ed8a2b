#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace glt {

// Counter-mixing step of splitmix64. Used both to derive independent seed
// streams from one run seed and as a stateless per-index random scorer.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seed streams for the per-run random sources. Derived, not sequential, so
// adding a stream never perturbs the existing ones.
inline std::uint64_t seed_stream(std::uint64_t run_seed, std::uint64_t stream) {
    return splitmix64(run_seed * 0x100000001b3ULL + stream);
}

constexpr std::uint64_t kStreamTeacher = 0;
constexpr std::uint64_t kStreamStudent = 1;
constexpr std::uint64_t kStreamScorer = 2;

// mt19937_64 with hand-rolled double conversion and shuffle. The standard
// distributions are not bit-stable across library implementations; these are.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = gen_();
            if (r >= threshold) return r % n;
        }
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace glt
