#include "qcc/emitter.hpp"

#include <cmath>
#include <stdexcept>

namespace qcc {

FrameSchedule build_frame_schedule(const SystemConfig& cfg, std::uint64_t frame_len) {
    if (frame_len < 100) throw std::invalid_argument("frame_len must be >= 100");

    const auto n_quantum =
        static_cast<std::uint64_t>(std::ceil(cfg.quantum_duty * static_cast<double>(frame_len)));
    if (n_quantum > frame_len) throw std::invalid_argument("quantum_duty > 1");
    const std::uint64_t n_ref_total = frame_len - n_quantum;
    const std::uint64_t n_marker = n_ref_total / 10;
    const std::uint64_t n_half = (n_marker + 1) / 2;
    const std::uint64_t n_three = n_marker - n_half;
    const std::uint64_t n_plain = n_ref_total - n_marker;
    if (n_half == 0 || n_three == 0 || n_plain == 0)
        throw std::invalid_argument(
            "frame_len too small to host quantum, reference and both marker roles "
            "at this quantum_duty");

    FrameSchedule s;
    s.frame_len = frame_len;
    s.quantum_per_frame = n_quantum;
    s.plain_ref_per_frame = n_plain;
    s.half_pi_per_frame = n_half;
    s.three_half_pi_per_frame = n_three;
    s.roles.reserve(frame_len);
    s.roles.insert(s.roles.end(), n_quantum, SlotRole::Quantum);
    s.roles.insert(s.roles.end(), n_plain, SlotRole::Reference);
    s.roles.insert(s.roles.end(), n_half, SlotRole::MarkerHalfPi);
    s.roles.insert(s.roles.end(), n_three, SlotRole::MarkerThreeHalfPi);
    return s;
}

}  // namespace qcc
