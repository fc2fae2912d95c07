#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace atp {

namespace detail {

/// SplitMix64 finalizer; used for seeding and stream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t rotl64(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
}

}  // namespace detail

/// Deterministic seeded random stream (xoshiro256++ core).
///
/// All distributions are implemented explicitly on top of the raw 64-bit
/// output so that sequences are reproducible across platforms and standard
/// library versions. Child streams derived with `child(i)` are statistically
/// independent and depend only on (seed, i), never on how much of the parent
/// has been consumed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : origin_seed_(seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) word = detail::mix64(x++);
    }

    /// Independent stream addressed by (this stream's seed, stream_id).
    RngStream child(std::uint64_t stream_id) const {
        return RngStream(detail::mix64(origin_seed_ ^ (0xA3EC647659359ACDULL * (stream_id + 1))));
    }

    std::uint64_t next_u64() {
        ++draws_;
        const std::uint64_t result = detail::rotl64(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    /// Uniform integer in [0, n). n must be positive.
    int uniform_int(int n) {
        return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                                 static_cast<unsigned __int128>(n)) >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal draw via Box-Muller (two uniforms per call, no cache,
    /// so the draw count per call is fixed).
    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Number of raw 64-bit words drawn so far; recorded per trial for replay
    /// debugging.
    std::uint64_t cursor() const { return draws_; }

    std::uint64_t seed() const { return origin_seed_; }

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t origin_seed_;
    std::uint64_t draws_ = 0;
};

}  // namespace atp
