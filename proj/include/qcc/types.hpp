#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Shared data model for the three-user conferencing simulator: pulse and
// click records, port topology, and the system configuration.

namespace qcc {

enum class User : std::uint8_t { A = 0, B = 1, C = 2 };
constexpr std::array<User, 3> kUsers{User::A, User::B, User::C};

inline const char* to_string(User u) {
    switch (u) {
        case User::A: return "A";
        case User::B: return "B";
        default: return "C";
    }
}

// Intensity classes. Signal/Decoy/Vacuum are chosen per quantum slot;
// Reference covers reference and marker slots.
enum class IntensityTag : std::uint8_t {
    Signal = 0,
    Decoy = 1,
    Vacuum = 2,
    Reference = 3,
};

inline const char* to_string(IntensityTag t) {
    switch (t) {
        case IntensityTag::Signal: return "mu";
        case IntensityTag::Decoy: return "nu";
        case IntensityTag::Vacuum: return "0";
        default: return "ref";
    }
}

enum class SlotRole : std::uint8_t {
    Quantum = 0,
    Reference = 1,
    MarkerHalfPi = 2,
    MarkerThreeHalfPi = 3,
};

// Discrete 16-level phase grid; the encoded phase is 2*pi*n/16.
struct PhaseIndex {
    std::uint8_t n = 0;  // in [0, 15]

    double radians() const;
};

constexpr int kPhaseLevels = 16;
// Marker offsets live on the same grid: pi/2 = slot 4, 3*pi/2 = slot 12.
constexpr std::uint8_t kHalfPiIndex = 4;
constexpr std::uint8_t kThreeHalfPiIndex = 12;

struct PulseDescriptor {
    User user = User::A;
    std::uint64_t slot = 0;
    SlotRole role = SlotRole::Quantum;
    IntensityTag intensity = IntensityTag::Vacuum;
    double intensity_value = 0.0;  // mean photon number
    PhaseIndex phase;              // grid index; fixed 0 / 4 / 12 outside quantum slots
};

// Interference ports of the ring topology. Each user feeds exactly two
// ports: P1=(A,B), P2=(B,C), P3=(C,A).
enum class PortId : std::uint8_t { P1_AB = 0, P2_BC = 1, P3_CA = 2 };
constexpr std::array<PortId, 3> kPorts{PortId::P1_AB, PortId::P2_BC, PortId::P3_CA};

inline int port_index(PortId p) { return static_cast<int>(p); }

// (first, second) users interfering at a port; the sign convention of the
// port's phase difference is first minus second.
inline std::array<User, 2> port_users(PortId p) {
    switch (p) {
        case PortId::P1_AB: return {User::A, User::B};
        case PortId::P2_BC: return {User::B, User::C};
        default: return {User::C, User::A};
    }
}

enum class DetectorSide : std::uint8_t { L = 0, R = 1 };

// A retained detection: exactly one of the port's two detectors fired in
// this slot. Both-fired and none-fired slots never become ClickRecords.
struct ClickRecord {
    PortId port = PortId::P1_AB;
    std::uint64_t slot = 0;
    DetectorSide side = DetectorSide::L;
};

struct SystemConfig {
    double rep_rate = 5.0e8;           // slot clock [Hz]
    double quantum_duty = 143.52 / 500.0;
    double per_arm_transmittance = 6.18e-3;
    double detector_efficiency = 0.81;
    double dark_count_prob = 2.0e-7;   // per slot per detector
    double p_mu = 0.15;
    double p_nu = 0.35;
    double mu = 0.3535;
    double nu = 0.0413;
    double f_ec = 1.06;
    double epsilon = 1.0e-10;
    std::uint64_t window_slots = 50000;
    double drift_rate = 0.0;           // fiber phase diffusion [rad^2/s]
    double visibility = 1.0;

    // Operational knobs (not part of the security model).
    double ref_intensity = 0.3535;     // mean photon number of reference light
    std::uint64_t frame_len = 10000;   // slots per frame
    std::uint64_t total_slots = 1000000;
    std::uint64_t shard_slots = 0;     // 0 = single shard
    int lp_cutoff = 4;                 // photon-number cutoff for decoy LP

    double vacuum_prob() const { return 1.0 - p_mu - p_nu; }
    double intensity_of(IntensityTag t) const {
        switch (t) {
            case IntensityTag::Signal: return mu;
            case IntensityTag::Decoy: return nu;
            case IntensityTag::Vacuum: return 0.0;
            default: return ref_intensity;
        }
    }
    double slot_seconds() const { return 1.0 / rep_rate; }
};

struct ConfigViolation {
    std::string field;
    double observed;
    std::string message;
};

// Returns the full list of violated invariants; empty means valid.
std::vector<ConfigViolation> validate_config(const SystemConfig& cfg);

// Flat `key = value` config file I/O. Unknown keys are rejected so typos
// do not silently fall back to defaults.
std::string serialize_config(const SystemConfig& cfg);
SystemConfig parse_config(std::istream& in);
SystemConfig parse_config_string(const std::string& text);
SystemConfig load_config_file(const std::string& path);

// Applies a `key=value` override (CLI layer); throws on unknown key.
void apply_override(SystemConfig& cfg, const std::string& key, const std::string& value);

// All recognized config keys, in serialization order.
std::vector<std::string> config_keys();

}  // namespace qcc
