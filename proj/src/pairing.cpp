#include "qcc/pairing.hpp"

#include <limits>

namespace qcc {

void PairingStream::push(const ClickRecord& c) {
    const int p = port_index(c.port);
    if (seen_any_[p] && c.slot <= last_slot_[p])
        throw std::invalid_argument("click stream not strictly increasing on port " +
                                    std::to_string(p + 1));
    seen_any_[p] = true;
    last_slot_[p] = c.slot;
    pending_[p].push_back(c);
    ++totals_[p];
}

void PairingStream::drain(std::uint64_t p1_limit, std::vector<TripleEvent>& out) {
    auto& s1 = pending_[0];
    auto& s2 = pending_[1];
    auto& s3 = pending_[2];

    while (head_[0] < s1.size() && s1[head_[0]].slot <= p1_limit) {
        const ClickRecord c1 = s1[head_[0]];

        // Earliest P2 click with |slot - c1.slot| <= window. Clicks below the
        // lower bound can never match a later P1 click either, so the cursor
        // advances permanently.
        const std::uint64_t lo2 = c1.slot >= window_ ? c1.slot - window_ : 0;
        while (head_[1] < s2.size() && s2[head_[1]].slot < lo2) ++head_[1];
        if (head_[1] >= s2.size() || s2[head_[1]].slot > c1.slot + window_) {
            ++head_[0];  // no completion: drop the P1 click
            continue;
        }
        const ClickRecord c2 = s2[head_[1]];

        // Earliest P3 click keeping max-min <= window. The lower bound
        // hi - window is nondecreasing across iterations because both c1 and
        // the P2 head advance monotonically.
        const std::uint64_t lo = std::min(c1.slot, c2.slot);
        const std::uint64_t hi = std::max(c1.slot, c2.slot);
        const std::uint64_t lo3 = hi >= window_ ? hi - window_ : 0;
        while (head_[2] < s3.size() && s3[head_[2]].slot < lo3) ++head_[2];
        if (head_[2] >= s3.size() || s3[head_[2]].slot > lo + window_) {
            ++head_[0];
            continue;
        }
        const ClickRecord c3 = s3[head_[2]];

        out.push_back({c1, c2, c3});
        ++head_[0];
        ++head_[1];
        ++head_[2];
        for (int p = 0; p < 3; ++p) ++paired_[p];
    }

    // Reclaim memory: everything before the heads is decided.
    for (int p = 0; p < 3; ++p) {
        if (head_[p] > 4096 && head_[p] * 2 > pending_[p].size()) {
            pending_[p].erase(pending_[p].begin(),
                              pending_[p].begin() + static_cast<std::ptrdiff_t>(head_[p]));
            head_[p] = 0;
        }
    }
}

void PairingStream::advance(std::uint64_t watermark, std::vector<TripleEvent>& out) {
    // A P1 click at slot s is decidable once every port is complete up to
    // s + window.
    if (watermark >= window_) drain(watermark - window_, out);
}

void PairingStream::finish(std::vector<TripleEvent>& out) {
    drain(std::numeric_limits<std::uint64_t>::max(), out);
}

std::vector<TripleEvent> pair_clicks(const std::array<std::vector<ClickRecord>, 3>& streams,
                                     std::uint64_t window_slots) {
    PairingStream ps(window_slots);
    for (int p = 0; p < 3; ++p)
        for (const auto& c : streams[p]) {
            if (port_index(c.port) != p)
                throw std::invalid_argument("click filed under wrong port stream");
            ps.push(c);
        }
    std::vector<TripleEvent> out;
    ps.finish(out);
    return out;
}

const char* to_string(PatternCode c) {
    switch (c) {
        case PatternCode::SignalVacuum: return "M0";
        case PatternCode::DecoyVacuum: return "N0";
        case PatternCode::VacuumVacuum: return "00";
        case PatternCode::SignalSignal: return "MM";
        case PatternCode::DecoyDecoy: return "NN";
        default: return "XX";
    }
}

namespace {
int combo_digit_z(PatternCode c) {
    switch (c) {
        case PatternCode::SignalVacuum: return 0;
        case PatternCode::DecoyVacuum: return 1;
        case PatternCode::VacuumVacuum: return 2;
        default: return -1;
    }
}
int combo_digit_x(PatternCode c) {
    switch (c) {
        case PatternCode::SignalSignal: return 0;
        case PatternCode::DecoyDecoy: return 1;
        case PatternCode::VacuumVacuum: return 2;
        default: return -1;
    }
}
}  // namespace

int SiftedEvent::z_combo() const {
    int idx = 0;
    for (int u = 0; u < 3; ++u) {
        const int d = combo_digit_z(pattern[u]);
        if (d < 0) return -1;
        idx = idx * 3 + d;
    }
    return idx;
}

int SiftedEvent::x_combo() const {
    int idx = 0;
    for (int u = 0; u < 3; ++u) {
        const int d = combo_digit_x(pattern[u]);
        if (d < 0) return -1;
        idx = idx * 3 + d;
    }
    return idx;
}

}  // namespace qcc
