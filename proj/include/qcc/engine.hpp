#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "qcc/emitter.hpp"
#include "qcc/optics.hpp"
#include "qcc/pairing.hpp"
#include "qcc/phase_comp.hpp"
#include "qcc/security.hpp"
#include "qcc/types.hpp"

// End-to-end Monte Carlo pipeline: pulse trains -> port interference ->
// click streams -> sliding-window pairing -> sifting, phase compensation
// and security tallies.
//
// Frames are simulated by a data-parallel kernel (drift is materialized per
// frame up front, then frames are independent); a straightforward serial
// kernel is kept as the reference implementation. Both consume identical
// counter-based random draws, so their outputs are bit-identical, which the
// tests assert and the benchmark relies on.

namespace qcc {

enum class KernelKind {
    Parallel,         // table-driven frame kernel, OpenMP across frames
    SerialReference,  // per-slot evaluation through the model operations
};

struct FrameResult {
    std::vector<ClickRecord> clicks;          // retained quantum-slot clicks
    std::array<ReferenceCounts, 3> ref{};     // per-port reference tallies
};

struct FrameContext {
    const SystemConfig* cfg = nullptr;
    const FrameSchedule* sched = nullptr;
    std::uint64_t seed = 0;
    std::uint64_t frame = 0;
    std::array<double, 3> theta{};  // fiber phases for this frame
};

FrameResult simulate_frame_fast(const FrameContext& ctx);
FrameResult simulate_frame_reference(const FrameContext& ctx);

struct EngineSinks {
    // Every classified triple, with the compensated total phase when the
    // event is X-eligible and estimates were available.
    std::function<void(const SiftedEvent&, std::optional<double> theta, bool kept,
                       bool expected_even)>
        on_event;
    // Raw per-frame phase estimate and the counts it used.
    std::function<void(std::uint64_t frame, int port, const PhaseEstimate&,
                       const ReferenceCounts&)>
        on_phase;
    std::function<void(const ClickRecord&)> on_click;
    // Per-pulse dump; forces a slot-ordered regeneration pass.
    std::function<void(const PulseDescriptor&)> on_pulse;
};

struct RunStats {
    std::array<std::uint64_t, 3> clicks{0, 0, 0};
    std::array<std::uint64_t, 3> paired{0, 0, 0};
    std::uint64_t triples = 0;
    std::uint64_t n_frames = 0;
    std::uint64_t n_slots = 0;
};

struct RunOutput {
    SecurityAccounting accounting;
    RunStats stats;
};

struct EngineOptions {
    KernelKind kernel = KernelKind::Parallel;
    SignConvention convention{};
    // When false the drift estimates are ignored (treated as zero) in the
    // total-phase computation, for with/without-compensation comparisons.
    bool apply_compensation = true;
};

// Runs cfg.total_slots (rounded up to whole frames). calib_out, when given,
// collects strict X-basis events for sign calibration.
RunOutput run_simulation(const SystemConfig& cfg, std::uint64_t seed,
                         const EngineOptions& options = {}, const EngineSinks& sinks = {},
                         std::vector<CalibrationEvent>* calib_out = nullptr);

}  // namespace qcc
