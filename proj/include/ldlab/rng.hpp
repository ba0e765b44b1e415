#pragma once

#include <cmath>
#include <cstdint>

namespace ldlab {

/// Deterministic 64-bit random stream (splitmix64).
///
/// Streams are cheap value types. Monte Carlo code never shares one stream
/// across trials; it derives an independent stream per trial index with
/// derive(), so results do not depend on scheduling or thread count.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    /// Standard normal via Box-Muller (uses the log branch only; no cached spare,
    /// so interleaving draws of different kinds stays reproducible).
    double normal() {
        double u1 = uniform01();
        // keep log() finite
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    /// true with probability q.
    bool bernoulli(double q) { return uniform01() < q; }

    /// Independent stream derived from (master seed, index); stable under reordering.
    static Rng derive(std::uint64_t master_seed, std::uint64_t index) {
        // run the index through one splitmix step so that neighboring indices decorrelate
        Rng mix(master_seed ^ (0x632be59bd9b4e019ull * (index + 1)));
        return Rng(mix.next_u64());
    }

  private:
    std::uint64_t state_;
};

}  // namespace ldlab
