#pragma once

#include <cmath>
#include <cstdint>

namespace ladderlab {

// splitmix64: used to derive independent stream seeds from (seed, keys...).
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_keys(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Rest>
std::uint64_t mix_keys(std::uint64_t seed, std::uint64_t k, Rest... rest) {
    return mix_keys(splitmix64(seed ^ splitmix64(k)), rest...);
}

// Counter-based deterministic stream (xoshiro256**). Each stream is owned by
// exactly one worker; draws are identical regardless of scheduling. The
// normal sampler is hand-rolled so output does not depend on the standard
// library implementation.
class RngStream {
  public:
    RngStream() : RngStream(0) {}

    explicit RngStream(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : s_) {
            x = splitmix64(x);
            si = x;
        }
        antithetic_ = false;
    }

    template <typename... Keys>
    static RngStream keyed(std::uint64_t seed, Keys... keys) {
        return RngStream(mix_keys(seed, static_cast<std::uint64_t>(keys)...));
    }

    void set_antithetic(bool on) { antithetic_ = on; }
    bool antithetic() const { return antithetic_; }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on (0,1); never returns 0 or 1
    double uniform() {
        const std::uint64_t u = next_u64() >> 11;  // 53 bits
        return (static_cast<double>(u) + 0.5) * 0x1.0p-53;
    }

    // standard normal via Box-Muller (no caching: keeps antithetic pairing
    // and stream splitting trivially correct)
    double gaussian() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double g = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(6.283185307179586476925287 * u2);
        return antithetic_ ? -g : g;
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
    bool antithetic_;
};

}  // namespace ladderlab
