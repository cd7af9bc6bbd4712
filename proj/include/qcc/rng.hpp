#pragma once

#include <cmath>
#include <cstdint>

// Counter-based random streams. Every draw is a pure function of
// (seed, stream, counter), so simulation output is independent of thread
// scheduling and any slot can be replayed in isolation.

namespace qcc::rng {

// Named substreams. Adding entries is fine; reordering breaks replay
// compatibility of stored seeds.
enum class Stream : std::uint64_t {
    intensity = 1,
    phase = 2,
    detector = 3,
    drift_init = 4,
    drift_step = 5,
    synth = 6,
};

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Two mixing rounds over (seed, stream|lane, counter).
inline std::uint64_t hash(std::uint64_t seed, Stream s, std::uint64_t lane,
                          std::uint64_t counter) {
    std::uint64_t k = splitmix64(seed ^ (static_cast<std::uint64_t>(s) << 56) ^
                                 (lane * 0xd6e8feb86659fd93ull));
    return splitmix64(k ^ (counter * 0xa0761d6478bd642full));
}

inline double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t seed, Stream s, std::uint64_t lane,
                      std::uint64_t counter) {
    return to_unit(hash(seed, s, lane, counter));
}

// Standard normal via Box-Muller on two derived counters.
inline double normal(std::uint64_t seed, Stream s, std::uint64_t lane,
                     std::uint64_t counter) {
    const double u1 = uniform(seed, s, lane, 2 * counter);
    const double u2 = uniform(seed, s, lane, 2 * counter + 1);
    const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
    return r * std::cos(2.0 * M_PI * u2);
}

// Sequential convenience stream for test helpers and synthetic inputs.
class SequentialStream {
  public:
    explicit SequentialStream(std::uint64_t seed, std::uint64_t lane = 0)
        : seed_(seed), lane_(lane) {}

    std::uint64_t next_u64() { return hash(seed_, Stream::synth, lane_, n_++); }
    double next_unit() { return to_unit(next_u64()); }

  private:
    std::uint64_t seed_;
    std::uint64_t lane_;
    std::uint64_t n_ = 0;
};

}  // namespace qcc::rng
