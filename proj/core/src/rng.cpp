#include "vagus/rng.hpp"

#include <array>
#include <cmath>

#include "vagus/errors.hpp"

namespace vagus {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed,
                          std::uint64_t median_index,
                          std::uint64_t trial_index,
                          StreamTag tag) {
    // Fold each coordinate through the mixer in sequence, feeding the mixed
    // output forward. The chain behaves like a random mapping, so collisions
    // over any practical grid are birthday-bounded; a test asserts
    // distinctness over the grids we actually use.
    const auto mix = [](std::uint64_t x) {
        std::uint64_t s = x;
        return splitmix64(s);
    };
    std::uint64_t h = mix(master_seed);
    h = mix(h ^ (median_index + 0x9e3779b97f4a7c15ULL));
    h = mix(h ^ (trial_index + 0x9e3779b97f4a7c15ULL));
    h = mix(h ^ (static_cast<std::uint64_t>(tag) + 0x9e3779b97f4a7c15ULL));
    return h;
}

Rng::Rng(std::uint64_t seed) {
    // Expand the 64-bit seed through splitmix64 into entropy for seed_seq.
    // Both mt19937_64 and seed_seq::generate are fully specified by the
    // standard, so the resulting stream is identical on every platform.
    std::uint64_t s = seed;
    std::array<std::uint32_t, 16> words;
    for (std::size_t i = 0; i < words.size(); i += 2) {
        const std::uint64_t w = splitmix64(s);
        words[i] = static_cast<std::uint32_t>(w);
        words[i + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
}

double Rng::uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();  // log(0) guard; hit with p ~ 2^-53
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

int Rng::binomial(int n, double p) {
    if (n < 0 || p < 0.0 || p > 1.0)
        throw InvalidStateError("binomial: need n >= 0 and p in [0,1]");
    int k = 0;
    for (int i = 0; i < n; ++i)
        if (uniform01() < p) ++k;
    return k;
}

double Rng::lognormal(double mu, double sigma) {
    if (sigma == 0.0) return std::exp(mu);
    return std::exp(mu + sigma * normal());
}

}  // namespace vagus
