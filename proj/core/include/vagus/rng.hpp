#pragma once

#include <cstdint>
#include <random>

namespace vagus {

// One step of the splitmix64 sequence: advances the state and returns the
// next output. Used both as a seed expander and as the mixing primitive for
// deriving per-trial seeds from (master_seed, median_index, trial_index).
std::uint64_t splitmix64(std::uint64_t& state);

// Stream tags keep the k1 draw and the synaptic release draw statistically
// independent even though they share (master, median, trial) coordinates.
enum class StreamTag : std::uint64_t {
    k1_draw = 0,
    synapse = 1,
};

// Deterministic, collision-resistant seed for one stream of one trial.
std::uint64_t derive_seed(std::uint64_t master_seed,
                          std::uint64_t median_index,
                          std::uint64_t trial_index,
                          StreamTag tag);

// Random source with samplers implemented in-library so that sequences are
// bit-identical across standard library implementations (std::mt19937_64 is
// pinned by the standard; std::*_distribution is not).
class Rng {
  public:
    explicit Rng(std::uint64_t seed);

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01();

    // Standard normal via Box-Muller; generates pairs, caches the second.
    double normal();

    // Sum of n Bernoulli(p) draws. Exact binomial, O(n) per sample.
    int binomial(int n, double p);

    // exp(mu + sigma * Z). sigma == 0 degenerates to the point mass exp(mu).
    double lognormal(double mu, double sigma);

    std::uint64_t next_u64() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace vagus
