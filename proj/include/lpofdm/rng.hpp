#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <random>

namespace lpofdm {

/// SplitMix64 step; used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random stream for one frame, keyed by (master seed,
/// stream key, frame index). Frames can be simulated in any order on any
/// number of workers and still see identical draws. Gaussian generation is
/// a self-contained Box-Muller so results do not depend on library
/// internals, and the pair cache lives inside the stream.
class FrameRng {
  public:
    FrameRng(std::uint64_t master_seed, std::uint64_t stream_key, std::uint64_t frame_index) {
        std::uint64_t s = master_seed;
        std::uint64_t a = splitmix64(s);
        s ^= stream_key * 0x9e3779b97f4a7c15ULL;
        std::uint64_t b = splitmix64(s);
        s ^= frame_index + 0xd1b54a32d192ed03ULL;
        std::uint64_t c = splitmix64(s);
        std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                          static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        engine_.seed(seq);
    }

    /// Uniform in (0,1].
    double uniform01() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1p-53;
    }

    int bit() { return static_cast<int>(engine_() >> 63); }

    /// Standard normal via Box-Muller.
    double normal() {
        if (has_cache_) {
            has_cache_ = false;
            return cache_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double ang = 2.0 * std::numbers::pi * u2;
        cache_ = r * std::sin(ang);
        has_cache_ = true;
        return r * std::cos(ang);
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
    bool has_cache_ = false;
    double cache_ = 0.0;
};

/// Stream key for an SNR point, derived from the dB value's bit pattern.
inline std::uint64_t snr_stream_key(double snr_db) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(snr_db));
    std::memcpy(&bits, &snr_db, sizeof(bits));
    return bits;
}

}  // namespace lpofdm
