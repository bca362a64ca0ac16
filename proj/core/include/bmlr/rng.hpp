#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace bmlr {

std::uint64_t splitmix64(std::uint64_t& state);

/// Seeded random stream. Distributions are implemented by hand on top of
/// mt19937_64 so that generated values are bit-identical across standard
/// library implementations (std::*_distribution is not portable).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal via Box-Muller; the second value of each pair is
    /// cached, so draws come in deterministic order.
    double gaussian();

    /// Uniform index in [0, n) by rejection sampling (no modulo bias).
    std::size_t index(std::size_t n);

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    /// Independent child stream for subsystem `salt` (init, shuffle, ...).
    Rng child(std::uint64_t salt) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_ = 0;
    std::mt19937_64 gen_;
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

}  // namespace bmlr
