#include <doctest.h>

#include <sstream>

#include "qcc/types.hpp"

using namespace qcc;

namespace {

bool has_violation(const std::vector<ConfigViolation>& v, const std::string& msg) {
    for (const auto& x : v)
        if (x.message == msg) return true;
    return false;
}

}  // namespace

TEST_CASE("table settings for the 66.3 dB point validate cleanly") {
    SystemConfig cfg;
    cfg.mu = 0.3535;
    cfg.nu = 0.0413;
    cfg.p_mu = 0.15;
    cfg.p_nu = 0.35;
    cfg.f_ec = 1.06;
    cfg.detector_efficiency = 0.81;
    cfg.per_arm_transmittance = 6.18e-3;
    CHECK(validate_config(cfg).empty());
}

TEST_CASE("intensity ordering violation is reported") {
    SystemConfig cfg;
    cfg.mu = 0.2;
    cfg.nu = 0.3;
    const auto v = validate_config(cfg);
    CHECK(has_violation(v, "nu < mu violated"));
}

TEST_CASE("probability mass violation is reported with the offending value") {
    SystemConfig cfg;
    cfg.p_mu = 0.7;
    cfg.p_nu = 0.5;
    const auto v = validate_config(cfg);
    REQUIRE(has_violation(v, "p_mu+p_nu <= 1 violated"));
    for (const auto& x : v)
        if (x.message == "p_mu+p_nu <= 1 violated") CHECK(x.observed == doctest::Approx(1.2));
}

TEST_CASE("all violations are listed at once") {
    SystemConfig cfg;
    cfg.mu = 0.2;
    cfg.nu = 0.3;
    cfg.detector_efficiency = 1.5;
    cfg.epsilon = 2.0;
    CHECK(validate_config(cfg).size() >= 3);
}

TEST_CASE("config serialize/parse round trip is identity") {
    SystemConfig cfg;
    cfg.mu = 0.2572;
    cfg.nu = 0.0209;
    cfg.per_arm_transmittance = 1.88e-2;
    cfg.dark_count_prob = 3.7e-8;
    cfg.window_slots = 123456;
    cfg.drift_rate = 17.25;
    cfg.total_slots = 999999937;
    cfg.lp_cutoff = 7;

    const SystemConfig back = parse_config_string(serialize_config(cfg));
    CHECK(serialize_config(back) == serialize_config(cfg));
    CHECK(back.mu == cfg.mu);
    CHECK(back.window_slots == cfg.window_slots);
    CHECK(back.total_slots == cfg.total_slots);
    CHECK(back.lp_cutoff == cfg.lp_cutoff);
}

TEST_CASE("config parser handles comments and rejects junk") {
    const SystemConfig cfg = parse_config_string("# comment\nmu = 0.5\n\nnu=0.1 # inline\n");
    CHECK(cfg.mu == 0.5);
    CHECK(cfg.nu == 0.1);
    CHECK_THROWS(parse_config_string("not_a_key = 1\n"));
    CHECK_THROWS(parse_config_string("mu 0.5\n"));
    CHECK_THROWS(parse_config_string("mu = abc\n"));
}

TEST_CASE("phase index maps to radians on the 16-level grid") {
    CHECK(PhaseIndex{0}.radians() == 0.0);
    CHECK(PhaseIndex{4}.radians() == doctest::Approx(M_PI / 2));
    CHECK(PhaseIndex{12}.radians() == doctest::Approx(3 * M_PI / 2));
}

TEST_CASE("port topology: each user feeds exactly two ports") {
    int count[3] = {0, 0, 0};
    for (PortId p : kPorts)
        for (User u : port_users(p)) count[static_cast<int>(u)]++;
    CHECK(count[0] == 2);
    CHECK(count[1] == 2);
    CHECK(count[2] == 2);
}
