#pragma once

#include <cstdint>
#include <vector>

#include "qcc/rng.hpp"
#include "qcc/types.hpp"

// Pulse-train generation: frame layout with time-division reference light,
// decoy intensity sampling and 16-level phase randomization. All sampling is
// counter-based on (seed, user, slot), so any pulse can be regenerated on
// demand without storing the train.

namespace qcc {

struct FrameSchedule {
    std::uint64_t frame_len = 0;
    std::vector<SlotRole> roles;  // length frame_len

    std::uint64_t quantum_per_frame = 0;
    std::uint64_t plain_ref_per_frame = 0;
    std::uint64_t half_pi_per_frame = 0;
    std::uint64_t three_half_pi_per_frame = 0;

    SlotRole role_of(std::uint64_t global_slot) const {
        return roles[global_slot % frame_len];
    }
    std::uint64_t frame_of(std::uint64_t global_slot) const {
        return global_slot / frame_len;
    }
};

// Deterministic layout: quantum block first, then plain reference, then the
// pi/2 and 3pi/2 marker blocks (markers take the last 10% of reference
// slots). Throws std::invalid_argument when the frame cannot host all four
// roles.
FrameSchedule build_frame_schedule(const SystemConfig& cfg, std::uint64_t frame_len);

// At marker slots a single designated user applies the phase offset while
// the other two send plain reference light; the designee rotates with the
// slot index. A marker slot therefore probes the two ports fed by the
// designee and contributes plain reference counts at the third.
inline User marker_designee(std::uint64_t slot) {
    return static_cast<User>(slot % 3);
}

// Role of `user`'s pulse in `slot` given the scheduled slot role.
inline SlotRole effective_role(SlotRole scheduled, User user, std::uint64_t slot) {
    if ((scheduled == SlotRole::MarkerHalfPi || scheduled == SlotRole::MarkerThreeHalfPi) &&
        user != marker_designee(slot))
        return SlotRole::Reference;
    return scheduled;
}

// Samples one pulse. Quantum slots draw the intensity class with
// probabilities (p_mu, p_nu, 1-p_mu-p_nu) and a uniform phase index;
// reference slots are fixed at phase 0 and markers at pi/2 or 3pi/2.
inline PulseDescriptor sample_pulse(User user, std::uint64_t slot, SlotRole role,
                                    const SystemConfig& cfg, std::uint64_t seed) {
    PulseDescriptor p;
    p.user = user;
    p.slot = slot;
    p.role = role;
    const auto lane = static_cast<std::uint64_t>(user);
    switch (role) {
        case SlotRole::Quantum: {
            const double u = rng::uniform(seed, rng::Stream::intensity, lane, slot);
            if (u < cfg.p_mu) {
                p.intensity = IntensityTag::Signal;
            } else if (u < cfg.p_mu + cfg.p_nu) {
                p.intensity = IntensityTag::Decoy;
            } else {
                p.intensity = IntensityTag::Vacuum;
            }
            p.phase.n = static_cast<std::uint8_t>(
                rng::hash(seed, rng::Stream::phase, lane, slot) & (kPhaseLevels - 1));
            break;
        }
        case SlotRole::Reference:
            p.intensity = IntensityTag::Reference;
            p.phase.n = 0;
            break;
        case SlotRole::MarkerHalfPi:
            p.intensity = IntensityTag::Reference;
            p.phase.n = kHalfPiIndex;
            break;
        case SlotRole::MarkerThreeHalfPi:
            p.intensity = IntensityTag::Reference;
            p.phase.n = kThreeHalfPiIndex;
            break;
    }
    p.intensity_value = cfg.intensity_of(p.intensity);
    return p;
}

// Pulse as the receiver-side physics sees it: marker roles collapse to
// Reference for non-designated users.
inline PulseDescriptor pulse_at(User user, std::uint64_t slot, const FrameSchedule& sched,
                                const SystemConfig& cfg, std::uint64_t seed) {
    return sample_pulse(user, slot, effective_role(sched.role_of(slot), user, slot), cfg, seed);
}

}  // namespace qcc
