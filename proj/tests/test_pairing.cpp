#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "qcc/pairing.hpp"
#include "qcc/rng.hpp"

using namespace qcc;

namespace {

std::vector<ClickRecord> make_stream(PortId port, const std::vector<std::uint64_t>& slots) {
    std::vector<ClickRecord> v;
    for (auto s : slots) v.push_back({port, s, DetectorSide::L});
    return v;
}

// Independent oracle: naive scan-based transcription of the greedy rule,
// O(n^2), with explicit consumed flags. Kept deliberately dumb.
std::vector<TripleEvent> oracle_pairing(const std::array<std::vector<ClickRecord>, 3>& streams,
                                        std::uint64_t window) {
    std::vector<TripleEvent> out;
    std::vector<bool> used2(streams[1].size(), false), used3(streams[2].size(), false);
    for (const ClickRecord& c1 : streams[0]) {
        // earliest unconsumed P2 click within the window of c1
        std::size_t best2 = streams[1].size();
        for (std::size_t j = 0; j < streams[1].size(); ++j) {
            if (used2[j]) continue;
            const auto s = streams[1][j].slot;
            const std::uint64_t d = s > c1.slot ? s - c1.slot : c1.slot - s;
            if (d <= window) {
                best2 = j;
                break;
            }
            if (s > c1.slot + window) break;
        }
        if (best2 == streams[1].size()) continue;
        const ClickRecord& c2 = streams[1][best2];

        const std::uint64_t lo = std::min(c1.slot, c2.slot);
        const std::uint64_t hi = std::max(c1.slot, c2.slot);
        std::size_t best3 = streams[2].size();
        for (std::size_t j = 0; j < streams[2].size(); ++j) {
            if (used3[j]) continue;
            const auto s = streams[2][j].slot;
            const std::uint64_t span = std::max(hi, s) - std::min(lo, s);
            if (span <= window) {
                best3 = j;
                break;
            }
            if (s > lo + window) break;
        }
        if (best3 == streams[2].size()) continue;

        used2[best2] = true;
        used3[best3] = true;
        out.push_back({c1, c2, streams[2][best3]});
    }
    return out;
}

std::array<std::vector<ClickRecord>, 3> random_streams(std::uint64_t seed, int max_clicks,
                                                       std::uint64_t slot_range) {
    std::mt19937_64 gen(seed);
    std::array<std::vector<ClickRecord>, 3> streams;
    for (int p = 0; p < 3; ++p) {
        std::uniform_int_distribution<int> n_dist(0, max_clicks);
        std::set<std::uint64_t> slots;
        const int n = n_dist(gen);
        std::uniform_int_distribution<std::uint64_t> s_dist(0, slot_range);
        while (static_cast<int>(slots.size()) < n) slots.insert(s_dist(gen));
        for (auto s : slots)
            streams[p].push_back(
                {kPorts[p], s, (gen() & 1) ? DetectorSide::L : DetectorSide::R});
    }
    return streams;
}

bool same_triples(const std::vector<TripleEvent>& a, const std::vector<TripleEvent>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].c1.slot != b[i].c1.slot || a[i].c2.slot != b[i].c2.slot ||
            a[i].c3.slot != b[i].c3.slot)
            return false;
    }
    return true;
}

}  // namespace

TEST_CASE("single candidate forms one triple with the right span") {
    const std::array<std::vector<ClickRecord>, 3> streams{
        make_stream(PortId::P1_AB, {10}), make_stream(PortId::P2_BC, {20}),
        make_stream(PortId::P3_CA, {30})};
    const auto triples = pair_clicks(streams, 100);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].span() == 20);
}

TEST_CASE("span beyond the window yields nothing") {
    const std::array<std::vector<ClickRecord>, 3> streams{
        make_stream(PortId::P1_AB, {10}), make_stream(PortId::P2_BC, {20}),
        make_stream(PortId::P3_CA, {200})};
    CHECK(pair_clicks(streams, 100).empty());
}

TEST_CASE("P2 clicks may precede the P1 click") {
    const std::array<std::vector<ClickRecord>, 3> streams{
        make_stream(PortId::P1_AB, {100}), make_stream(PortId::P2_BC, {40}),
        make_stream(PortId::P3_CA, {90})};
    const auto triples = pair_clicks(streams, 60);
    REQUIRE(triples.size() == 1);
    CHECK(triples[0].span() == 60);
}

TEST_CASE("unsorted stream is rejected") {
    std::array<std::vector<ClickRecord>, 3> streams{
        make_stream(PortId::P1_AB, {10, 5}), make_stream(PortId::P2_BC, {}),
        make_stream(PortId::P3_CA, {})};
    CHECK_THROWS_AS(pair_clicks(streams, 100), std::invalid_argument);
}

TEST_CASE("greedy output matches the oracle on adversarial small cases") {
    int nonempty = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        // Tight slot range so windows bind often.
        const auto streams = random_streams(seed, 30, 120);
        const std::uint64_t window = 1 + seed % 60;
        const auto fast = pair_clicks(streams, window);
        const auto slow = oracle_pairing(streams, window);
        REQUIRE(same_triples(fast, slow));
        nonempty += !fast.empty();

        // Feasibility predicate: spans within the window, no click reused.
        std::set<std::uint64_t> seen[3];
        std::uint64_t prev_p1 = 0;
        bool first = true;
        for (const auto& t : fast) {
            CHECK(t.span() <= window);
            CHECK(seen[0].insert(t.c1.slot).second);
            CHECK(seen[1].insert(t.c2.slot).second);
            CHECK(seen[2].insert(t.c3.slot).second);
            if (!first) CHECK(t.c1.slot > prev_p1);
            prev_p1 = t.c1.slot;
            first = false;
        }
    }
    CHECK(nonempty > 500);
}

TEST_CASE("pairing count is monotone in the window length") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto streams = random_streams(seed * 31 + 7, 60, 2000);
        std::size_t prev = 0;
        for (std::uint64_t w : {1, 5, 20, 80, 300, 1000, 4000}) {
            const std::size_t n = pair_clicks(streams, w).size();
            CHECK(n >= prev);
            prev = n;
        }
    }
}

TEST_CASE("pairing is deterministic") {
    const auto streams = random_streams(4242, 200, 50000);
    CHECK(same_triples(pair_clicks(streams, 777), pair_clicks(streams, 777)));
}

TEST_CASE("streaming with arbitrary watermarks equals one-shot pairing") {
    std::mt19937_64 gen(99);
    for (int rep = 0; rep < 30; ++rep) {
        const auto streams = random_streams(1000 + rep, 100, 20000);
        const std::uint64_t window = 500;
        const auto reference = pair_clicks(streams, window);

        // Interleave clicks by slot and push with random watermark advances.
        std::vector<ClickRecord> all;
        for (const auto& s : streams) all.insert(all.end(), s.begin(), s.end());
        std::sort(all.begin(), all.end(),
                  [](const ClickRecord& a, const ClickRecord& b) { return a.slot < b.slot; });

        PairingStream ps(window);
        std::vector<TripleEvent> triples;
        std::size_t i = 0;
        std::uint64_t watermark = 0;
        while (i < all.size()) {
            watermark += std::uniform_int_distribution<int>(1, 4000)(gen);
            while (i < all.size() && all[i].slot <= watermark) ps.push(all[i++]);
            ps.advance(watermark, triples);
        }
        ps.finish(triples);
        CHECK(same_triples(triples, reference));
    }
}

TEST_CASE("high-rate streams pair almost everything while coincidences stay rare") {
    // P_click = 1e-3 per slot per port over 1e6 slots, window 50k slots.
    constexpr std::uint64_t kSlots = 1000000;
    std::array<std::vector<ClickRecord>, 3> streams;
    for (int p = 0; p < 3; ++p)
        for (std::uint64_t s = 0; s < kSlots; ++s)
            if (rng::uniform(5150 + p, rng::Stream::synth, p, s) < 1e-3)
                streams[p].push_back({kPorts[p], s, DetectorSide::L});

    const auto triples = pair_clicks(streams, 50000);
    const std::size_t min_clicks =
        std::min({streams[0].size(), streams[1].size(), streams[2].size()});
    CHECK(triples.size() >= static_cast<std::size_t>(0.95 * min_clicks));

    std::uint64_t coincidences = 0;
    std::set<std::uint64_t> s2, s3;
    for (const auto& c : streams[1]) s2.insert(c.slot);
    for (const auto& c : streams[2]) s3.insert(c.slot);
    for (const auto& c : streams[0]) coincidences += s2.count(c.slot) && s3.count(c.slot);
    CHECK(coincidences * 1000 < triples.size());
}

// ---- classification ----

namespace {

// Pulse lookup backed by a small map; unlisted slots return vacuum.
struct MapLookup {
    SystemConfig cfg;
    std::map<std::pair<int, std::uint64_t>, std::pair<IntensityTag, int>> pulses;

    PulseDescriptor operator()(User u, std::uint64_t slot) const {
        PulseDescriptor p;
        p.user = u;
        p.slot = slot;
        p.role = SlotRole::Quantum;
        const auto it = pulses.find({static_cast<int>(u), slot});
        p.intensity = it == pulses.end() ? IntensityTag::Vacuum : it->second.first;
        p.phase.n = static_cast<std::uint8_t>(it == pulses.end() ? 0 : it->second.second);
        p.intensity_value = cfg.intensity_of(p.intensity);
        return p;
    }
};

TripleEvent triple_at(std::uint64_t t1, std::uint64_t t2, std::uint64_t t3) {
    return {{PortId::P1_AB, t1, DetectorSide::L},
            {PortId::P2_BC, t2, DetectorSide::R},
            {PortId::P3_CA, t3, DetectorSide::R}};
}

}  // namespace

TEST_CASE("Z classification follows the signal positions") {
    MapLookup lk;
    // A: mu at t1 (first port), vacuum at t3 -> bit 0.
    lk.pulses[{0, 10}] = {IntensityTag::Signal, 0};
    // B: vacuum at t1, mu at t2 -> bit 1.
    lk.pulses[{1, 20}] = {IntensityTag::Signal, 0};
    // C: vacuum at t2, mu at t3 -> bit 1.
    lk.pulses[{2, 30}] = {IntensityTag::Signal, 0};
    const SiftedEvent ev = classify_event(triple_at(10, 20, 30), lk);
    CHECK(ev.basis == Basis::Z);
    CHECK(ev.z_bit == std::array<int, 3>{0, 1, 1});
    CHECK(ev.z_combo() == 0);
    CHECK(ev.parity_even == true);  // one L click
}

TEST_CASE("a signal-signal user discards the event from both bases") {
    MapLookup lk;
    lk.pulses[{0, 10}] = {IntensityTag::Signal, 0};
    lk.pulses[{0, 30}] = {IntensityTag::Signal, 0};
    lk.pulses[{1, 20}] = {IntensityTag::Signal, 0};
    lk.pulses[{2, 30}] = {IntensityTag::Signal, 0};
    const SiftedEvent ev = classify_event(triple_at(10, 20, 30), lk);
    CHECK(ev.basis == Basis::Discard);
    CHECK(ev.pattern[0] == PatternCode::SignalSignal);
    CHECK_FALSE(ev.z_gain_eligible());
    CHECK(ev.x_combo() == -1);  // B and C are localized patterns
}

TEST_CASE("X classification computes the encoded relative phases") {
    MapLookup lk;
    lk.pulses[{0, 10}] = {IntensityTag::Decoy, 3};   // A first
    lk.pulses[{0, 30}] = {IntensityTag::Decoy, 3};   // A second
    lk.pulses[{1, 10}] = {IntensityTag::Decoy, 5};   // B first
    lk.pulses[{1, 20}] = {IntensityTag::Decoy, 1};   // B second
    lk.pulses[{2, 20}] = {IntensityTag::Decoy, 8};   // C first
    lk.pulses[{2, 30}] = {IntensityTag::Decoy, 0};   // C second
    const SiftedEvent ev = classify_event(triple_at(10, 20, 30), lk);
    CHECK(ev.basis == Basis::X);
    CHECK(ev.delta[0] == doctest::Approx(0.0));
    CHECK(ev.delta[1] == doctest::Approx(M_PI / 2));
    CHECK(ev.delta[2] == doctest::Approx(M_PI));
    CHECK(ev.x_combo() == 13);  // (nu,nu,nu)
}

TEST_CASE("vacuum-vacuum users keep gain eligibility in both families") {
    MapLookup lk;
    lk.pulses[{1, 20}] = {IntensityTag::Decoy, 2};
    lk.pulses[{1, 10}] = {IntensityTag::Decoy, 9};
    lk.pulses[{2, 20}] = {IntensityTag::Decoy, 4};
    lk.pulses[{2, 30}] = {IntensityTag::Decoy, 4};
    // A sends nothing in either slot.
    const SiftedEvent ev = classify_event(triple_at(10, 20, 30), lk);
    CHECK(ev.basis == Basis::Discard);
    CHECK(ev.pattern[0] == PatternCode::VacuumVacuum);
    CHECK(ev.z_gain_eligible() == false);  // B, C are decoy-decoy
    CHECK(ev.x_gain_eligible() == true);
    CHECK(ev.x_combo() == 2 * 9 + 1 * 3 + 1);
}

TEST_CASE("a user's two slots may coincide") {
    MapLookup lk;
    lk.pulses[{0, 10}] = {IntensityTag::Decoy, 7};
    lk.pulses[{1, 10}] = {IntensityTag::Decoy, 2};
    lk.pulses[{1, 20}] = {IntensityTag::Decoy, 2};
    lk.pulses[{2, 20}] = {IntensityTag::Decoy, 11};
    // A's two ports clicked in the same slot: pattern {nu,nu}, delta 0.
    const SiftedEvent ev = classify_event(triple_at(10, 20, 10), lk);
    CHECK(ev.pattern[0] == PatternCode::DecoyDecoy);
    CHECK(ev.delta[0] == doctest::Approx(0.0));
    CHECK(ev.basis == Basis::X);
}
