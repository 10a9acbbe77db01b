#ifndef SMALLFIBER_RNG_HPP
#define SMALLFIBER_RNG_HPP

#include "smallfiber/common.hpp"

#include <cstdint>
#include <random>

namespace smallfiber {

// Deterministic random streams. mt19937_64 output is pinned by the standard, and uniforms /
// gaussians are derived with explicit arithmetic (no distribution objects), so a given
// (seed, stream) pair produces identical values on every platform and run.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; caches the second variate.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * kPi * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

    Vector gaussian_vector(int dim) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) v[i] = gaussian();
        return v;
    }

    // Uniform point on S^n (unit vector in R^{n+1}).
    Vector sphere_point(int n) {
        Vector v = gaussian_vector(n + 1);
        double norm = v.norm();
        while (norm < 1e-12) {
            v = gaussian_vector(n + 1);
            norm = v.norm();
        }
        return v / norm;
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Worker-count-independent stream derivation: sample index space is split into fixed-size
// chunks and each chunk gets its own generator seeded from (master, chunk). Accumulating
// per-chunk results in chunk order makes every estimate independent of how chunks would be
// scheduled across workers.
inline constexpr std::int64_t kChunkSamples = 4096;

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    // splitmix64 finalizer over the pair; cheap and well mixed.
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Runs fn(rng, chunk_begin, chunk_end) over [0, total) in deterministic chunk order.
template <class F>
void for_each_chunk(std::uint64_t master_seed, std::int64_t total, F&& fn) {
    const std::int64_t chunks = (total + kChunkSamples - 1) / kChunkSamples;
    for (std::int64_t c = 0; c < chunks; ++c) {
        const std::int64_t begin = c * kChunkSamples;
        const std::int64_t end = std::min(total, begin + kChunkSamples);
        Rng rng(derive_seed(master_seed, static_cast<std::uint64_t>(c)));
        fn(rng, begin, end);
    }
}

}  // namespace smallfiber

#endif
