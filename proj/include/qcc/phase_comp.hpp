#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

// Pairwise fiber-phase estimation from reference-light counts and the
// calibration of the three phase-difference signs.
//
// Each port accumulates, per compensation interval (one frame):
//   - plain counts: both users at reference phase 0, probing cos(theta)
//   - quadrature counts from marker slots, probing cos(theta +- pi/2)
// Marker slots where the designated offset user belongs to the port shift
// the port's relative phase by +pi/2 or -pi/2 depending on whether the
// designee is the port's first or second user; the pi/2 and 3pi/2 marker
// roles swap that sign. `half` below collects the +pi/2 quadrature and
// `three` the -pi/2 quadrature.

namespace qcc {

struct ReferenceCounts {
    double n_r = 0, n_l = 0;              // plain reference slots
    double n_r_half = 0, n_l_half = 0;    // effective +pi/2 offset
    double n_r_three = 0, n_l_three = 0;  // effective -pi/2 offset
};

struct PhaseEstimate {
    double theta_hat = 0.0;   // [0, 2pi)
    std::uint64_t interval = 0;
    bool valid = false;       // false: no counts, carry previous estimate
    bool sign_flagged = false;  // the two quadratures disagreed on sign(sin)
};

// One boolean per pairwise difference (P1: theta_A-theta_B, P2: theta_B-theta_C,
// P3: theta_C-theta_A); true flips the sign of that port's estimate.
struct SignConvention {
    std::array<bool, 3> flips{false, false, false};

    bool operator==(const SignConvention&) const = default;
    double sign(int port) const { return flips[port] ? -1.0 : 1.0; }
    static SignConvention from_index(int i) {
        return {{(i & 4) != 0, (i & 2) != 0, (i & 1) != 0}};
    }
    int index() const { return (flips[0] ? 4 : 0) | (flips[1] ? 2 : 0) | (flips[2] ? 1 : 0); }
};

// theta0 = arccos of the clamped plain ratio resolves theta up to sign;
// the +pi/2 quadrature supplies sign(sin theta). The -pi/2 quadrature is a
// redundant check that only raises sign_flagged on disagreement.
PhaseEstimate estimate_pair_phase(const ReferenceCounts& counts, std::uint64_t interval);

// Total compensated phase of an X-basis event: the users' encoded relative
// phases combined around the ring, plus the per-port drift estimates under
// the given sign convention. delta terms follow the canonical first/second
// port order of each user, which fixes the ring combination to
// delta_A - delta_B - delta_C.
double compensate(const std::array<double, 3>& delta,
                  const std::array<double, 3>& theta_hat, const SignConvention& convention);

// Raw material for sign calibration: one X-basis event with its encoded
// deltas, the three active drift estimates and the measured parity.
struct CalibrationEvent {
    std::array<double, 3> delta{};
    std::array<double, 3> theta_hat{};
    bool parity_even = false;
};

struct CalibrationResult {
    SignConvention convention;
    // X error rate per convention index (0..7); entries with no kept events
    // are set to 1.0.
    std::array<double, 8> error_by_vertex{};
    std::array<std::uint64_t, 8> kept_by_vertex{};
};

// Evaluates the X error under all 8 sign conventions and returns the
// argmin (lexicographic tie-break on the flip triple). Requires at least
// min_events calibration events; throws std::invalid_argument otherwise.
CalibrationResult calibrate_sign_convention(const std::vector<CalibrationEvent>& events,
                                            std::size_t min_events = 1000);

// Phase-slice retention: an X event is kept iff the compensated total phase
// is within pi/16 of 0 or pi. Returns the expected even-parity flag
// (total near 0 -> even / Phi+) or nullopt when outside the slice.
std::optional<bool> slice_expected_even(double theta_total);

constexpr double kSliceTolerance = M_PI / 16.0;

}  // namespace qcc
