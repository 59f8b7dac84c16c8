#pragma once

#include <cstdint>
#include <vector>

namespace topicaudit {

// Counter-based 64-bit generator (splitmix64): the i-th output is
// mix(seed + (i+1) * 0x9E3779B97F4A7C15). State is a single counter, so
// streams can be split by deriving child seeds, and a sequence can be
// reproduced from (seed, counter) alone.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1) with 53 random bits.
    double next_double();

    // Uniform integer in [0, n), n > 0, unbiased via rejection.
    std::uint64_t below(std::uint64_t n);

    // Standard normal via Box-Muller (consumes two uniforms per pair).
    double next_normal();

    // Gamma(shape, scale) via Marsaglia-Tsang; shape >= 1 required here
    // (the only shapes this project draws are >= 100).
    double next_gamma(double shape, double scale);

    // Derive an independent child seed for a labeled stream.
    std::uint64_t fork(std::uint64_t stream_id) const;

private:
    std::uint64_t state_;
    bool have_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

// Partial Fisher-Yates: draw k distinct indices uniformly from [0, n).
// Returned indices are in draw order, not sorted.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace topicaudit
