#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace abdesign {

namespace detail {

// splitmix64, used to derive substream seeds. Mixing the parent seed with a
// salt gives streams that are independent for all practical purposes while
// staying reproducible from (seed, salt) alone.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Deterministic random stream. All sampling in the engine goes through an
/// explicit Rng argument so that (config, seed) fully determines every output.
/// Uniform and normal variates are generated from raw 64-bit draws rather
/// than std:: distributions, which keeps the byte stream independent of the
/// standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed), gen_(detail::splitmix64(seed)) {}

    std::uint64_t next_u64() { return gen_(); }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in (0, 1], used where log(u) must stay finite.
    double uniform_pos() { return 1.0 - uniform(); }

    /// Standard normal via Box-Muller. One variate per call; the sibling
    /// variate is discarded so the draw count stays predictable.
    double normal() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Eigen::Vector3d normal3() {
        double a = normal(), b = normal(), c = normal();
        return {a, b, c};
    }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::size_t below(std::size_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t r;
        do {
            r = next_u64();
        } while (r >= limit);
        return static_cast<std::size_t>(r % n);
    }

    /// Derive an independent substream. Forking depends only on the seed this
    /// stream was constructed with, never on how much has been drawn from it.
    Rng fork(std::uint64_t salt) const {
        return Rng(detail::splitmix64(seed_ ^ detail::splitmix64(salt + 0x5851f42d4c957f2dULL)));
    }

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::mt19937_64 gen_;
};

/// Sample an index from an unnormalized nonnegative weight vector.
inline std::size_t sample_categorical(std::span<const double> weights, Rng& rng) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

/// Uniform point on the unit sphere.
inline Eigen::Vector3d sample_unit_sphere(Rng& rng) {
    while (true) {
        Eigen::Vector3d v = rng.normal3();
        double n = v.norm();
        if (n > 1e-12) return v / n;
    }
}

}  // namespace abdesign
