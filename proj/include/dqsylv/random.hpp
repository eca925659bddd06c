#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "dual_quat_matrix.hpp"

namespace dqsylv {

/// Seeded generator that can derive independent child streams by name or index.
/// Every random draw in the library goes through one of these; there is no ambient entropy.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(mix(seed)) {}

    std::uint64_t seed() const { return seed_; }

    Rng split(std::string_view name) const {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (unsigned char ch : name) {
            h ^= ch;
            h *= 1099511628211ull;
        }
        return Rng(mix(seed_ ^ mix(h)));
    }
    Rng split(std::uint64_t index) const { return Rng(mix(seed_ + 0x9e3779b97f4a7c15ull * (index + 1))); }

    double uniform(double lo = 0.0, double hi = 1.0) {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    /// Uniform integer in [lo, hi].
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
    }
    bool coin() { return index(0, 1) == 1; }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

inline Quaternion random_quaternion(Rng& rng) { return {rng.normal(), rng.normal(), rng.normal(), rng.normal()}; }

inline Quaternion random_unit_quaternion(Rng& rng) {
    Quaternion q;
    do {
        q = random_quaternion(rng);
    } while (q.norm2() < 1e-12);
    return q * (1.0 / q.norm());
}

/// Gaussian entries, every real component N(0, 1).
inline QuatMatrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    QuatMatrix m(rows, cols);
    for (auto& q : m.entries()) q = random_quaternion(rng);
    return m;
}

/// Every real component uniform in [lo, hi].
inline QuatMatrix random_uniform_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    QuatMatrix m(rows, cols);
    for (auto& q : m.entries()) q = {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
    return m;
}

/// Random matrix of exactly the requested rank whose nonzero singular values stay
/// within a factor `min_gap` of the largest one, so integer rank decisions are stable.
inline QuatMatrix random_rank_matrix(Rng& rng, std::size_t rows, std::size_t cols, std::size_t rank,
                                     double min_gap = 1e-3) {
    rank = std::min({rank, rows, cols});
    if (rank == 0) return QuatMatrix::zeros(rows, cols);
    for (;;) {
        QuatMatrix m = random_matrix(rng, rows, rank) * random_matrix(rng, rank, cols);
        const Eigen::VectorXd s = adjoint_singular_values(m);
        if (s(static_cast<Eigen::Index>(2 * rank - 1)) >= min_gap * s(0)) return m;
    }
}

inline DualQuatMatrix random_dq_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
    QuatMatrix s = random_matrix(rng, rows, cols);
    return {std::move(s), random_matrix(rng, rows, cols)};
}

}  // namespace dqsylv
