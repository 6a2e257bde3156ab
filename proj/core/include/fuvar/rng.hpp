#pragma once

#include <cstdint>
#include <random>

namespace fuvar {

// Deterministic random source. The engine (mt19937_64) is bit-pinned by the
// C++ standard and the uniform/normal mappings are fixed here, so a given
// seed produces the same stream on every platform. std::*_distribution is
// deliberately avoided: its output is implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal via Box-Muller; the spare value is cached.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

// Derives an independent stream seed from a base seed and a small tag,
// so that the consumers of a scene seed do not share draws.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

} // namespace fuvar
