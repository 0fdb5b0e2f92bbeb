#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace tsb {

// splitmix64 generator. Shuffling and normal sampling are hand-rolled because
// std::shuffle and std::normal_distribution are implementation-defined, and
// experiment outputs must be byte-identical across platforms.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, bound). Fixed-point multiply keeps it branch-free and
    // platform-stable; the 2^-64 bias is irrelevant at these sizes.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    // Uniform in (0, 1].
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller.
    double next_gaussian() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

    // Decorrelated stream seed for (seed, stream) pairs.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
        SplitMix64 mix(seed ^ (0x9E3779B97F4A7C15ull * (stream + 1)));
        return mix.next_u64();
    }

private:
    std::uint64_t state_;
};

inline std::vector<std::size_t> shuffled_indices(std::size_t n, SplitMix64& rng) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace tsb
