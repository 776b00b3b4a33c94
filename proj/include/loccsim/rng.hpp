#ifndef LOCCSIM_RNG_HPP
#define LOCCSIM_RNG_HPP

#include <cmath>
#include <cstdint>

// Self-contained random streams. std::normal_distribution is
// implementation-defined, so trajectory reproducibility would otherwise
// depend on the standard library build; these generators pin the byte
// stream. Streams are derived from a base seed and a stream index, so
// trajectories are independently re-seedable and safe to run in parallel.

namespace loccsim {

struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
};

// Stream seed for trajectory k under base seed seed0.
inline std::uint64_t derive_stream_seed(std::uint64_t seed0, std::uint64_t index) {
    SplitMix64 mix(seed0 ^ (0x517cc1b727220a95ull * (index + 1)));
    return mix.next();
}

class Xoshiro256pp {
public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 mix(seed);
        for (auto& word : s_) word = mix.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on (0, 1]; never returns 0 so log() below is safe.
    double uniform() {
        return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Standard normal variates via Box-Muller, two per draw.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = rng_.uniform();
        const double u2 = rng_.uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

    double uniform() { return rng_.uniform(); }

private:
    Xoshiro256pp rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace loccsim

#endif
