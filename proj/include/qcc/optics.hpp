#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "qcc/emitter.hpp"
#include "qcc/rng.hpp"
#include "qcc/types.hpp"

// Physical model of the measurement node: two-user interference of
// attenuated coherent pulses at each port, threshold detectors with dark
// counts, and a Gaussian random walk for the per-user fiber phase.

namespace qcc {

struct DriftState {
    std::array<double, 3> theta{0.0, 0.0, 0.0};  // per-user fiber phase, [0, 2pi)
    std::uint64_t slot_of_last_update = 0;
};

enum class PortOutcomeKind : std::uint8_t { None = 0, OnlyL = 1, OnlyR = 2, Both = 3 };

struct PortOutcome {
    PortId port = PortId::P1_AB;
    PortOutcomeKind outcome = PortOutcomeKind::None;
};

inline double wrap_2pi(double x) {
    x = std::fmod(x, 2.0 * M_PI);
    return x < 0 ? x + 2.0 * M_PI : x;
}

// Random initial fiber phases (unknown path lengths).
inline DriftState init_drift(std::uint64_t seed) {
    DriftState d;
    for (int u = 0; u < 3; ++u)
        d.theta[u] = 2.0 * M_PI * rng::uniform(seed, rng::Stream::drift_init, u, 0);
    return d;
}

// Advances each fiber phase by an independent Gaussian increment with
// variance drift_rate * elapsed_time. The increment is keyed by the target
// slot so replay does not depend on call granularity pattern (each frame
// boundary is advanced to exactly once per run).
inline DriftState advance_drift(const DriftState& state, std::uint64_t to_slot,
                                const SystemConfig& cfg, std::uint64_t seed) {
    DriftState next = state;
    if (to_slot <= state.slot_of_last_update || cfg.drift_rate == 0.0) {
        next.slot_of_last_update = std::max(to_slot, state.slot_of_last_update);
        return next;
    }
    const double dt = static_cast<double>(to_slot - state.slot_of_last_update) * cfg.slot_seconds();
    const double sigma = std::sqrt(cfg.drift_rate * dt);
    for (int u = 0; u < 3; ++u) {
        next.theta[u] = wrap_2pi(state.theta[u] +
                                 sigma * rng::normal(seed, rng::Stream::drift_step, u, to_slot));
    }
    next.slot_of_last_update = to_slot;
    return next;
}

// Mean photon numbers (I_R, I_L) behind the port beamsplitter for the two
// pulses of the port's designated pair, evaluated in (first, second) order.
// Amplitudes are a_w = sqrt(k_w * eta / 2): per-arm transmittance and the
// 50:50 split of each user's pulse toward its two ports. Convention:
// (a+b)/sqrt2 -> R, (a-b)/sqrt2 -> L.
struct PortIntensity {
    double right = 0.0;
    double left = 0.0;
};

// Phase difference enters as grid index delta plus the continuous fiber
// drift difference; the grid part is canonicalized mod 16 so table-driven
// and per-slot evaluation agree bit-for-bit.
inline PortIntensity port_mean_photons_raw(double k_u, double k_v, int dphase_idx,
                                           double theta_diff, const SystemConfig& cfg) {
    const double iu = 0.5 * k_u * cfg.per_arm_transmittance;
    const double iv = 0.5 * k_v * cfg.per_arm_transmittance;
    const double base = 0.5 * (iu + iv);
    const double grid = 2.0 * M_PI * ((dphase_idx & (kPhaseLevels - 1))) / kPhaseLevels;
    const double cross = cfg.visibility * std::sqrt(iu * iv) * std::cos(grid + theta_diff);
    return {base + cross, base - cross};
}

inline PortIntensity port_mean_photons(const PulseDescriptor& first,
                                       const PulseDescriptor& second, const DriftState& drift,
                                       const SystemConfig& cfg) {
    const int du = static_cast<int>(first.phase.n) - static_cast<int>(second.phase.n);
    const double theta_diff = drift.theta[static_cast<int>(first.user)] -
                              drift.theta[static_cast<int>(second.user)];
    return port_mean_photons_raw(first.intensity_value, second.intensity_value,
                                 (du % kPhaseLevels + kPhaseLevels) % kPhaseLevels, theta_diff,
                                 cfg);
}

// Probability that a threshold detector fires on mean photon number I:
// 1 - (1 - dark) * exp(-efficiency * I).
inline double detect_probability(double intensity, const SystemConfig& cfg) {
    return 1.0 - (1.0 - cfg.dark_count_prob) *
                     std::exp(-cfg.detector_efficiency * intensity);
}

inline bool detect(double intensity, const SystemConfig& cfg, double unit_draw) {
    return unit_draw < detect_probability(intensity, cfg);
}

// One u64 per port and slot feeds both detectors (upper half -> R, lower
// half -> L) at 32-bit resolution.
inline double unit_from_high(std::uint64_t h) {
    return static_cast<double>(h >> 32) * 0x1.0p-32;
}
inline double unit_from_low(std::uint64_t h) {
    return static_cast<double>(h & 0xffffffffull) * 0x1.0p-32;
}

inline PortOutcomeKind classify_port(bool fired_r, bool fired_l) {
    if (fired_r && fired_l) return PortOutcomeKind::Both;
    if (fired_r) return PortOutcomeKind::OnlyR;
    if (fired_l) return PortOutcomeKind::OnlyL;
    return PortOutcomeKind::None;
}

// Evaluates all three ports for one slot given the three users' pulses.
inline std::array<PortOutcome, 3> simulate_slot(const std::array<PulseDescriptor, 3>& pulses,
                                                const DriftState& drift, const SystemConfig& cfg,
                                                std::uint64_t seed) {
    std::array<PortOutcome, 3> out;
    for (PortId port : kPorts) {
        const auto [u, v] = port_users(port);
        const PortIntensity in =
            port_mean_photons(pulses[static_cast<int>(u)], pulses[static_cast<int>(v)], drift, cfg);
        const std::uint64_t h = rng::hash(seed, rng::Stream::detector, port_index(port),
                                          pulses[0].slot);
        const bool r = detect(in.right, cfg, unit_from_high(h));
        const bool l = detect(in.left, cfg, unit_from_low(h));
        out[port_index(port)] = {port, classify_port(r, l)};
    }
    return out;
}

}  // namespace qcc
