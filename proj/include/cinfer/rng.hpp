#pragma once

#include <Eigen/Dense>

#include <cstdint>

namespace cinfer::rng {

/**
 * Counter-based random stream built on the SplitMix64 finalizer:
 *
 *   draw(i) = mix64(key + golden * (i + 1)),  golden = 0x9E3779B97F4A7C15
 *
 * where mix64 is the standard SplitMix64 output mixer. Streams are pure
 * functions of (key, counter), so substreams never overlap and any port that
 * reproduces mix64 reproduces the statistics exactly. Uniform doubles take
 * the top 53 bits: u = (bits >> 11) * 2^-53.
 */
inline constexpr std::uint64_t golden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

constexpr double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class CounterStream {
public:
    explicit CounterStream(std::uint64_t key) : key_(key) {}

    std::uint64_t next_bits() { return mix64(key_ + golden * ++counter_); }
    double next_uniform() { return uniform01(next_bits()); }

    /// Uniform integer in [0, n).
    int next_below(int n) { return static_cast<int>(next_uniform() * n); }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

/// Substream key for one sampling attempt: key = mix64(mix64(seed) + golden * (attempt + 1)).
inline CounterStream substream(std::uint64_t seed, std::uint64_t attempt) {
    return CounterStream(mix64(mix64(seed) + golden * (attempt + 1)));
}

/// Inverse-CDF draw from a probability row. Rows summing to slightly less
/// than 1 fall through to the last positive entry. Returns -1 only for an
/// all-zero row.
inline int sample_categorical(const Eigen::Ref<const Eigen::VectorXd>& probs, double u) {
    double cum = 0.0;
    int last_positive = -1;
    for (Eigen::Index i = 0; i < probs.size(); ++i) {
        if (probs(i) <= 0.0) continue;
        last_positive = static_cast<int>(i);
        cum += probs(i);
        if (u < cum) return last_positive;
    }
    return last_positive;
}

} // namespace cinfer::rng
