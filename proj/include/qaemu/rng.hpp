#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace qaemu {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and a path of indices
// (gauge index, read index, ...). Every randomized component keys its stream
// this way, so results are reproducible and independent of execution order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t s = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
    for (std::uint64_t p : path) s = splitmix64(s ^ p);
    return s;
}

// mt19937_64 with hand-rolled distributions. The standard pins down the
// engine's output but not the library distributions, so uniform/normal are
// implemented here to keep streams bit-stable across toolchains.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n), n >= 1. Modulo bias is below 2^-50 for the
    // range sizes used here.
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

    // Uniform spin in {-1, +1}.
    int spin() { return (gen_() >> 63) ? 1 : -1; }

    // Standard normal via Box-Muller; generates pairs and caches the spare.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace qaemu
