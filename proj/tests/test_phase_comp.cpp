#include <doctest.h>

#include <cmath>
#include <random>

#include "qcc/optics.hpp"
#include "qcc/phase_comp.hpp"

using namespace qcc;

namespace {

// Expected (noise-free) counts for a true pairwise phase.
ReferenceCounts expected_counts(double theta, double n_plain, double n_marker) {
    ReferenceCounts rc;
    rc.n_r = n_plain * 0.5 * (1.0 + std::cos(theta));
    rc.n_l = n_plain * 0.5 * (1.0 - std::cos(theta));
    rc.n_r_half = n_marker * 0.5 * (1.0 + std::cos(theta + M_PI / 2));
    rc.n_l_half = n_marker * 0.5 * (1.0 - std::cos(theta + M_PI / 2));
    rc.n_r_three = n_marker * 0.5 * (1.0 + std::cos(theta - M_PI / 2));
    rc.n_l_three = n_marker * 0.5 * (1.0 - std::cos(theta - M_PI / 2));
    return rc;
}

double angular_error(double a, double b) {
    double d = std::fmod(std::abs(a - b), 2 * M_PI);
    return std::min(d, 2 * M_PI - d);
}

}  // namespace

TEST_CASE("fully constructive counts give theta = 0") {
    ReferenceCounts rc;
    rc.n_r = 1000;
    rc.n_l = 0;
    rc.n_r_half = 500;
    rc.n_l_half = 500;
    const PhaseEstimate est = estimate_pair_phase(rc, 0);
    CHECK(est.valid);
    CHECK(est.theta_hat == doctest::Approx(0.0));
}

TEST_CASE("balanced counts with negative sine resolve to 3pi/2") {
    ReferenceCounts rc;
    rc.n_r = 500;
    rc.n_l = 500;
    // cos(theta + pi/2) = -sin(theta) = +1 when sin(theta) = -1.
    rc.n_r_half = 1000;
    rc.n_l_half = 0;
    const PhaseEstimate est = estimate_pair_phase(rc, 0);
    CHECK(est.valid);
    CHECK(est.theta_hat == doctest::Approx(3 * M_PI / 2));
}

TEST_CASE("zero denominators mark the estimate unavailable") {
    ReferenceCounts rc;
    CHECK_FALSE(estimate_pair_phase(rc, 0).valid);
    rc.n_r = 10;  // plain present, markers missing
    CHECK_FALSE(estimate_pair_phase(rc, 0).valid);
}

TEST_CASE("estimator is exact on expected counts over the full circle") {
    for (int i = 0; i < 720; ++i) {
        const double theta = 2 * M_PI * i / 720.0;
        const PhaseEstimate est = estimate_pair_phase(expected_counts(theta, 1e6, 1e5), 0);
        REQUIRE(est.valid);
        CHECK(angular_error(est.theta_hat, theta) < 1e-9);
        CHECK_FALSE(est.sign_flagged);
        // Sign-resolution contract: cos matches and sin keeps its sign.
        CHECK(std::cos(est.theta_hat) == doctest::Approx(std::cos(theta)).epsilon(1e-9));
        CHECK((std::sin(est.theta_hat) >= 0) == (std::sin(theta) >= 0));
    }
}

TEST_CASE("disagreeing quadratures raise the flag") {
    ReferenceCounts rc = expected_counts(1.0, 1000, 100);
    std::swap(rc.n_r_three, rc.n_l_three);  // corrupt the redundant check
    const PhaseEstimate est = estimate_pair_phase(rc, 0);
    CHECK(est.valid);
    CHECK(est.sign_flagged);
}

TEST_CASE("poissonian counts keep the RMS angular error small") {
    std::mt19937_64 gen(1234);
    const double n_plain = 1e4, n_marker = 2.5e3;
    double sumsq = 0.0;
    constexpr int kTrials = 1000;
    for (int t = 0; t < kTrials; ++t) {
        const double theta = 2 * M_PI * (t + 0.5) / kTrials;
        const ReferenceCounts mean = expected_counts(theta, n_plain, n_marker);
        ReferenceCounts rc;
        auto draw = [&](double m) {
            return m > 0 ? static_cast<double>(std::poisson_distribution<long>(m)(gen)) : 0.0;
        };
        rc.n_r = draw(mean.n_r);
        rc.n_l = draw(mean.n_l);
        rc.n_r_half = draw(mean.n_r_half);
        rc.n_l_half = draw(mean.n_l_half);
        rc.n_r_three = draw(mean.n_r_three);
        rc.n_l_three = draw(mean.n_l_three);
        const PhaseEstimate est = estimate_pair_phase(rc, 0);
        REQUIRE(est.valid);
        const double err = angular_error(est.theta_hat, theta);
        sumsq += err * err;
    }
    CHECK(std::sqrt(sumsq / kTrials) <= 0.05);
}

TEST_CASE("compensation with zero drift estimates reduces to the encoded deltas") {
    const std::array<double, 3> delta{0.0, M_PI / 2, M_PI};
    const double total = compensate(delta, {0, 0, 0}, SignConvention{});
    CHECK(total == doctest::Approx(wrap_2pi(0.0 - M_PI / 2 - M_PI)));
}

TEST_CASE("phase slice keeps only totals near 0 or pi") {
    CHECK(slice_expected_even(0.0) == true);
    CHECK(slice_expected_even(2 * M_PI - 0.01) == true);
    CHECK(slice_expected_even(M_PI) == false);
    CHECK(slice_expected_even(M_PI + kSliceTolerance) == false);
    CHECK_FALSE(slice_expected_even(M_PI / 4).has_value());
    CHECK_FALSE(slice_expected_even(M_PI / 8).has_value());
}

namespace {

// Synthetic calibration sample. Port phases hold a ring-closed static part
// (pairwise differences of user phases) plus independent per-event drift;
// parity follows the weak-pulse law P(even) = (1 + cos(total)/4)/2. Without
// drift the all-flip vertex would tie with the truth, exactly as in the
// physical system.
std::vector<CalibrationEvent> toy_events(const SignConvention& injected, double global_offset,
                                         std::uint64_t seed) {
    std::vector<CalibrationEvent> events;
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> grid(0, 15);
    std::normal_distribution<double> drift(0.0, 0.8);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::array<double, 3> user_theta{1.3 + global_offset, 0.2 + global_offset,
                                           5.1 + global_offset};
    const std::array<double, 3> base{
        user_theta[0] - user_theta[1],
        user_theta[1] - user_theta[2],
        user_theta[2] - user_theta[0],
    };
    for (int i = 0; i < 20000; ++i) {
        CalibrationEvent ev;
        double total = 0.0;
        for (int u = 0; u < 3; ++u) {
            ev.delta[u] = 2 * M_PI * grid(gen) / 16.0;
            total += (u == 0 ? 1.0 : -1.0) * ev.delta[u];
        }
        for (int p = 0; p < 3; ++p) {
            const double port_theta = base[p] + drift(gen);
            total += port_theta;
            ev.theta_hat[p] =
                injected.flips[p] ? wrap_2pi(-port_theta) : wrap_2pi(port_theta);
        }
        ev.parity_even = unit(gen) < 0.5 * (1.0 + std::cos(total) / 4.0);
        events.push_back(ev);
    }
    return events;
}

}  // namespace

TEST_CASE("calibration recovers every injected sign convention") {
    for (int inj = 0; inj < 8; ++inj) {
        const SignConvention injected = SignConvention::from_index(inj);
        const auto events = toy_events(injected, 0.0, 77 + inj);
        const CalibrationResult res = calibrate_sign_convention(events);
        CHECK(res.convention == injected);
        for (int v = 0; v < 8; ++v)
            if (v != injected.index())
                CHECK(res.error_by_vertex[injected.index()] < res.error_by_vertex[v]);
    }
}

TEST_CASE("no-flip data calibrates to no flips") {
    const auto events = toy_events(SignConvention{}, 0.0, 5);
    CHECK(calibrate_sign_convention(events).convention == SignConvention{});
}

TEST_CASE("calibration is invariant under a global phase offset") {
    for (int inj : {0, 3, 5}) {
        const SignConvention injected = SignConvention::from_index(inj);
        const auto base = toy_events(injected, 0.0, 99);
        const auto shifted = toy_events(injected, 1.234, 99);
        CHECK(calibrate_sign_convention(base).convention ==
              calibrate_sign_convention(shifted).convention);
    }
}

TEST_CASE("calibration refuses an undersized sample") {
    std::vector<CalibrationEvent> few(10);
    CHECK_THROWS_AS(calibrate_sign_convention(few), std::invalid_argument);
}
