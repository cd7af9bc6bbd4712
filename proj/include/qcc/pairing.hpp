#pragma once

#include <array>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "qcc/types.hpp"

// Port-indexed sliding-window pairing and basis sifting.
//
// Greedy matching in port order P1 -> P2 -> P3: take the earliest pending
// P1 click, the earliest unconsumed P2 click within window_slots of it,
// then the earliest unconsumed P3 click that keeps the total span within
// window_slots. If either completion step fails the P1 click is dropped
// and nothing is consumed. Because candidates are always taken from the
// head of each stream, three monotone cursors implement this exactly.

namespace qcc {

struct TripleEvent {
    ClickRecord c1, c2, c3;  // ports P1, P2, P3

    std::uint64_t min_slot() const {
        return std::min(c1.slot, std::min(c2.slot, c3.slot));
    }
    std::uint64_t max_slot() const {
        return std::max(c1.slot, std::max(c2.slot, c3.slot));
    }
    std::uint64_t span() const { return max_slot() - min_slot(); }
    // Even number of L-side detectors among the three clicks.
    bool parity_even() const {
        int l = (c1.side == DetectorSide::L) + (c2.side == DetectorSide::L) +
                (c3.side == DetectorSide::L);
        return (l % 2) == 0;
    }
};

// Incremental pairing over click streams delivered in slot order. Decisions
// for a P1 click at slot s only need clicks up to s + window, so triples
// are finalized once the watermark passes s + window; this makes sharded
// processing produce exactly the same triples as a single pass.
class PairingStream {
  public:
    explicit PairingStream(std::uint64_t window_slots) : window_(window_slots) {}

    void push(const ClickRecord& c);

    // All clicks with slot <= watermark have been delivered (on all ports).
    // Appends finalized triples to `out`.
    void advance(std::uint64_t watermark, std::vector<TripleEvent>& out);

    // No further clicks; flushes all remaining decisions.
    void finish(std::vector<TripleEvent>& out);

    // Clicks that entered a triple, and total clicks seen, per port.
    std::array<std::uint64_t, 3> paired_clicks() const { return paired_; }
    std::array<std::uint64_t, 3> total_clicks() const { return totals_; }

  private:
    void drain(std::uint64_t p1_limit, std::vector<TripleEvent>& out);

    std::uint64_t window_;
    std::array<std::vector<ClickRecord>, 3> pending_{};
    std::array<std::size_t, 3> head_{0, 0, 0};
    std::array<std::uint64_t, 3> last_slot_{0, 0, 0};
    std::array<bool, 3> seen_any_{false, false, false};
    std::array<std::uint64_t, 3> paired_{0, 0, 0};
    std::array<std::uint64_t, 3> totals_{0, 0, 0};
};

// One-shot pairing of complete per-port streams (each strictly increasing
// in slot; throws std::invalid_argument otherwise).
std::vector<TripleEvent> pair_clicks(const std::array<std::vector<ClickRecord>, 3>& streams,
                                     std::uint64_t window_slots);

enum class Basis : std::uint8_t { Z = 0, X = 1, Discard = 2 };

// Intensity pattern of one user's two involved slots (canonical port order).
enum class PatternCode : std::uint8_t {
    SignalVacuum = 0,   // {mu, 0} in some order
    DecoyVacuum = 1,    // {nu, 0}
    VacuumVacuum = 2,   // {0, 0}
    SignalSignal = 3,   // {mu, mu}
    DecoyDecoy = 4,     // {nu, nu}
    Mixed = 5,          // anything else
};

const char* to_string(PatternCode c);

struct SiftedEvent {
    TripleEvent triple;
    Basis basis = Basis::Discard;
    std::array<PatternCode, 3> pattern{PatternCode::Mixed, PatternCode::Mixed,
                                       PatternCode::Mixed};
    // Z: 0 iff the user's non-vacuum pulse sits at the user's first
    // canonical port (A: P1 before P3, B: P1 before P2, C: P2 before P3).
    std::array<int, 3> z_bit{-1, -1, -1};
    // X: encoded relative phase 2*pi*(n_first - n_second)/16, wrapped to
    // [0, 2pi). Zero for vacuum-vacuum users.
    std::array<double, 3> delta{0.0, 0.0, 0.0};
    bool parity_even = false;

    // True when every user's pattern is localized-or-vacuum ({mu,0}, {nu,0},
    // {0,0}): the event contributes to the Z-side decoy gains.
    bool z_gain_eligible() const {
        for (auto c : pattern)
            if (c != PatternCode::SignalVacuum && c != PatternCode::DecoyVacuum &&
                c != PatternCode::VacuumVacuum)
                return false;
        return true;
    }
    // True when every user's two pulses share one intensity ({mu,mu},
    // {nu,nu}, {0,0}): the event contributes to the X-side estimation gains.
    bool x_gain_eligible() const {
        for (auto c : pattern)
            if (c != PatternCode::SignalSignal && c != PatternCode::DecoyDecoy &&
                c != PatternCode::VacuumVacuum)
                return false;
        return true;
    }
    // Base-3 combo index (A*9+B*3+C). Z digits: 0=mu,1=nu,2=vacuum.
    // X digits: 0={mu,mu}, 1={nu,nu}, 2={0,0}.
    int z_combo() const;
    int x_combo() const;
};

// The two slots user `u` contributes to a triple, in canonical port order.
inline std::array<std::uint64_t, 2> user_slots(const TripleEvent& t, User u) {
    switch (u) {
        case User::A: return {t.c1.slot, t.c3.slot};
        case User::B: return {t.c1.slot, t.c2.slot};
        default: return {t.c2.slot, t.c3.slot};
    }
}

// Classifies a triple given access to the transmitted pulses.
// `pulse_lookup(user, slot)` must return the PulseDescriptor the user sent
// in that slot; throws std::logic_error if a non-quantum pulse shows up.
template <typename PulseLookup>
SiftedEvent classify_event(const TripleEvent& triple, PulseLookup&& pulse_lookup) {
    SiftedEvent ev;
    ev.triple = triple;
    ev.parity_even = triple.parity_even();

    for (User u : kUsers) {
        const auto slots = user_slots(triple, u);
        const PulseDescriptor first = pulse_lookup(u, slots[0]);
        const PulseDescriptor second = pulse_lookup(u, slots[1]);
        if (first.role != SlotRole::Quantum || second.role != SlotRole::Quantum)
            throw std::logic_error("classify_event: click in non-quantum slot");
        const int ui = static_cast<int>(u);
        const IntensityTag a = first.intensity, b = second.intensity;
        auto is_vac = [](IntensityTag t) { return t == IntensityTag::Vacuum; };

        if (a == b) {
            if (is_vac(a)) {
                ev.pattern[ui] = PatternCode::VacuumVacuum;
            } else {
                ev.pattern[ui] = (a == IntensityTag::Signal) ? PatternCode::SignalSignal
                                                             : PatternCode::DecoyDecoy;
                const int dn = static_cast<int>(first.phase.n) - static_cast<int>(second.phase.n);
                ev.delta[ui] = 2.0 * M_PI * ((dn % kPhaseLevels + kPhaseLevels) % kPhaseLevels) /
                               kPhaseLevels;
            }
        } else if (is_vac(a) || is_vac(b)) {
            const IntensityTag lit = is_vac(a) ? b : a;
            ev.pattern[ui] = (lit == IntensityTag::Signal) ? PatternCode::SignalVacuum
                                                           : PatternCode::DecoyVacuum;
            ev.z_bit[ui] = is_vac(a) ? 1 : 0;
        } else {
            ev.pattern[ui] = PatternCode::Mixed;
        }
    }

    bool all_z = true, all_x = true;
    for (auto c : ev.pattern) {
        all_z &= (c == PatternCode::SignalVacuum || c == PatternCode::DecoyVacuum);
        all_x &= (c == PatternCode::DecoyDecoy);
    }
    ev.basis = all_z ? Basis::Z : (all_x ? Basis::X : Basis::Discard);
    return ev;
}

}  // namespace qcc
