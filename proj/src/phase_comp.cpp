#include "qcc/phase_comp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qcc/optics.hpp"

namespace qcc {

namespace {

// (n_R - n_L)/(n_R + n_L), clamped into [-1, 1] to absorb statistical
// overshoot before arccos.
std::optional<double> count_ratio(double n_r, double n_l) {
    const double total = n_r + n_l;
    if (total <= 0) return std::nullopt;
    return std::clamp((n_r - n_l) / total, -1.0, 1.0);
}

}  // namespace

PhaseEstimate estimate_pair_phase(const ReferenceCounts& counts, std::uint64_t interval) {
    PhaseEstimate est;
    est.interval = interval;

    const auto cos_ratio = count_ratio(counts.n_r, counts.n_l);
    // +pi/2 quadrature: counts follow cos(theta + pi/2) = -sin(theta).
    const auto quad_plus = count_ratio(counts.n_r_half, counts.n_l_half);
    if (!cos_ratio || !quad_plus) return est;  // estimate unavailable this interval

    const double theta0 = std::acos(*cos_ratio);  // [0, pi]
    const double sin_est = -*quad_plus;
    est.theta_hat = wrap_2pi(sin_est >= 0.0 ? theta0 : 2.0 * M_PI - theta0);
    est.valid = true;

    // -pi/2 quadrature follows cos(theta - pi/2) = +sin(theta); flag (do not
    // reject) intervals where the redundant sign estimate disagrees.
    if (const auto quad_minus = count_ratio(counts.n_r_three, counts.n_l_three)) {
        est.sign_flagged = (sin_est >= 0.0) != (*quad_minus >= 0.0);
    }
    return est;
}

double compensate(const std::array<double, 3>& delta, const std::array<double, 3>& theta_hat,
                  const SignConvention& convention) {
    double total = delta[0] - delta[1] - delta[2];
    for (int p = 0; p < 3; ++p) total += convention.sign(p) * theta_hat[p];
    return wrap_2pi(total);
}

std::optional<bool> slice_expected_even(double theta_total) {
    const double t = wrap_2pi(theta_total);
    if (t <= kSliceTolerance || t >= 2.0 * M_PI - kSliceTolerance) return true;
    if (std::abs(t - M_PI) <= kSliceTolerance) return false;
    return std::nullopt;
}

CalibrationResult calibrate_sign_convention(const std::vector<CalibrationEvent>& events,
                                            std::size_t min_events) {
    if (events.size() < min_events)
        throw std::invalid_argument("calibration sample too small: " +
                                    std::to_string(events.size()) + " < " +
                                    std::to_string(min_events));

    CalibrationResult result{};
    double best = 2.0;
    int best_idx = 0;
    for (int i = 0; i < 8; ++i) {
        const SignConvention conv = SignConvention::from_index(i);
        std::uint64_t kept = 0, errors = 0;
        for (const auto& ev : events) {
            const double total = compensate(ev.delta, ev.theta_hat, conv);
            const auto expected_even = slice_expected_even(total);
            if (!expected_even) continue;
            ++kept;
            if (*expected_even != ev.parity_even) ++errors;
        }
        const double rate = kept ? static_cast<double>(errors) / static_cast<double>(kept) : 1.0;
        result.error_by_vertex[i] = rate;
        result.kept_by_vertex[i] = kept;
        if (rate < best) {
            best = rate;
            best_idx = i;
        }
    }
    result.convention = SignConvention::from_index(best_idx);
    return result;
}

}  // namespace qcc
