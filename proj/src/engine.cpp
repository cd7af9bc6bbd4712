#include "qcc/engine.hpp"

#include <cassert>
#include <stdexcept>
#include <string>

namespace qcc {

namespace {

int intensity_index(double u, const SystemConfig& cfg) {
    if (u < cfg.p_mu) return 0;
    if (u < cfg.p_mu + cfg.p_nu) return 1;
    return 2;
}

// Reference-slot quadrature class as seen by one port: 0 plain, 1 effective
// +pi/2 offset, 2 effective -pi/2 offset.
int ref_class(SlotRole role, PortId port, User designee) {
    if (role == SlotRole::Reference) return 0;
    const auto [first, second] = port_users(port);
    if (designee != first && designee != second) return 0;
    const bool plus = (role == SlotRole::MarkerHalfPi) == (designee == first);
    return plus ? 1 : 2;
}

void add_ref_count(ReferenceCounts& rc, int cls, bool fired_r, bool fired_l) {
    switch (cls) {
        case 0:
            rc.n_r += fired_r;
            rc.n_l += fired_l;
            break;
        case 1:
            rc.n_r_half += fired_r;
            rc.n_l_half += fired_l;
            break;
        default:
            rc.n_r_three += fired_r;
            rc.n_l_three += fired_l;
    }
}

constexpr std::array<std::uint8_t, 3> kRefDn{0, kHalfPiIndex, kThreeHalfPiIndex};

}  // namespace

FrameResult simulate_frame_fast(const FrameContext& ctx) {
    const SystemConfig& cfg = *ctx.cfg;
    const FrameSchedule& sched = *ctx.sched;
    FrameResult out;
    out.clicks.reserve(64);

    const std::array<double, 3> kval{cfg.mu, cfg.nu, 0.0};

    // Per-port firing probability tables for this frame's drift.
    // Quantum slots: [port][k_first][k_second][phase-index difference].
    // Reference slots: [port][quadrature class].
    double tab_r[3][3][3][kPhaseLevels];
    double tab_l[3][3][3][kPhaseLevels];
    double ref_r[3][3];
    double ref_l[3][3];
    for (int p = 0; p < 3; ++p) {
        const auto [uf, us] = port_users(kPorts[p]);
        const double theta_diff =
            ctx.theta[static_cast<int>(uf)] - ctx.theta[static_cast<int>(us)];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int d = 0; d < kPhaseLevels; ++d) {
                    const PortIntensity in =
                        port_mean_photons_raw(kval[a], kval[b], d, theta_diff, cfg);
                    tab_r[p][a][b][d] = detect_probability(in.right, cfg);
                    tab_l[p][a][b][d] = detect_probability(in.left, cfg);
                }
        for (int c = 0; c < 3; ++c) {
            const PortIntensity in = port_mean_photons_raw(cfg.ref_intensity, cfg.ref_intensity,
                                                           kRefDn[c], theta_diff, cfg);
            ref_r[p][c] = detect_probability(in.right, cfg);
            ref_l[p][c] = detect_probability(in.left, cfg);
        }
    }

    const std::uint64_t start = ctx.frame * sched.frame_len;
    const std::uint64_t end = start + sched.frame_len;
    for (std::uint64_t s = start; s < end; ++s) {
        const SlotRole role = sched.roles[s - start];
        if (role == SlotRole::Quantum) {
            int ki[3];
            int ph[3];
            bool ph_drawn[3] = {false, false, false};
            for (int u = 0; u < 3; ++u)
                ki[u] = intensity_index(rng::uniform(ctx.seed, rng::Stream::intensity, u, s), cfg);
            for (int p = 0; p < 3; ++p) {
                const auto [uf, us] = port_users(kPorts[p]);
                const int a = static_cast<int>(uf), b = static_cast<int>(us);
                int dn = 0;
                if (ki[a] != 2 && ki[b] != 2) {
                    // Phase matters only when both arms carry light; vacuum
                    // arms zero the cross term exactly.
                    for (int u : {a, b})
                        if (!ph_drawn[u]) {
                            ph[u] = static_cast<int>(
                                rng::hash(ctx.seed, rng::Stream::phase, u, s) &
                                (kPhaseLevels - 1));
                            ph_drawn[u] = true;
                        }
                    dn = (ph[a] - ph[b]) & (kPhaseLevels - 1);
                }
                const std::uint64_t h = rng::hash(ctx.seed, rng::Stream::detector, p, s);
                const bool r = unit_from_high(h) < tab_r[p][ki[a]][ki[b]][dn];
                const bool l = unit_from_low(h) < tab_l[p][ki[a]][ki[b]][dn];
                if (r != l)
                    out.clicks.push_back(
                        {kPorts[p], s, r ? DetectorSide::R : DetectorSide::L});
            }
        } else {
            const User designee = marker_designee(s);
            for (int p = 0; p < 3; ++p) {
                const int cls = ref_class(role, kPorts[p], designee);
                const std::uint64_t h = rng::hash(ctx.seed, rng::Stream::detector, p, s);
                const bool r = unit_from_high(h) < ref_r[p][cls];
                const bool l = unit_from_low(h) < ref_l[p][cls];
                if (r || l) add_ref_count(out.ref[p], cls, r, l);
            }
        }
    }
    return out;
}

FrameResult simulate_frame_reference(const FrameContext& ctx) {
    const SystemConfig& cfg = *ctx.cfg;
    const FrameSchedule& sched = *ctx.sched;
    FrameResult out;

    DriftState drift;
    drift.theta = ctx.theta;

    const std::uint64_t start = ctx.frame * sched.frame_len;
    const std::uint64_t end = start + sched.frame_len;
    for (std::uint64_t s = start; s < end; ++s) {
        const SlotRole role = sched.roles[s - start];
        const std::array<PulseDescriptor, 3> pulses{
            pulse_at(User::A, s, sched, cfg, ctx.seed),
            pulse_at(User::B, s, sched, cfg, ctx.seed),
            pulse_at(User::C, s, sched, cfg, ctx.seed),
        };
        const auto outcomes = simulate_slot(pulses, drift, cfg, ctx.seed);
        if (role == SlotRole::Quantum) {
            for (const PortOutcome& po : outcomes) {
                if (po.outcome == PortOutcomeKind::OnlyR)
                    out.clicks.push_back({po.port, s, DetectorSide::R});
                else if (po.outcome == PortOutcomeKind::OnlyL)
                    out.clicks.push_back({po.port, s, DetectorSide::L});
            }
        } else {
            const User designee = marker_designee(s);
            for (const PortOutcome& po : outcomes) {
                const int cls = ref_class(role, po.port, designee);
                const bool r = po.outcome == PortOutcomeKind::OnlyR ||
                               po.outcome == PortOutcomeKind::Both;
                const bool l = po.outcome == PortOutcomeKind::OnlyL ||
                               po.outcome == PortOutcomeKind::Both;
                if (r || l) add_ref_count(out.ref[port_index(po.port)], cls, r, l);
            }
        }
    }
    return out;
}

namespace {

// Effective (carry-forward) per-frame phase estimates for the recent past.
class EstimateRing {
  public:
    EstimateRing(std::uint64_t size) : size_(size), ring_(size) {}

    void store(std::uint64_t frame, const std::array<PhaseEstimate, 3>& est) {
        ring_[frame % size_] = est;
        newest_ = frame;
    }
    const std::array<PhaseEstimate, 3>& at(std::uint64_t frame) const {
        assert(frame <= newest_ && newest_ - frame < size_);
        return ring_[frame % size_];
    }

  private:
    std::uint64_t size_;
    std::vector<std::array<PhaseEstimate, 3>> ring_;
    std::uint64_t newest_ = 0;
};

}  // namespace

RunOutput run_simulation(const SystemConfig& cfg, std::uint64_t seed,
                         const EngineOptions& options, const EngineSinks& sinks,
                         std::vector<CalibrationEvent>* calib_out) {
    const KernelKind kind = options.kernel;
    const SignConvention& convention = options.convention;
    if (const auto violations = validate_config(cfg); !violations.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : violations) msg += " [" + v.message + "]";
        throw std::invalid_argument(msg);
    }

    const FrameSchedule sched = build_frame_schedule(cfg, cfg.frame_len);
    const std::uint64_t n_frames =
        std::max<std::uint64_t>(1, (cfg.total_slots + cfg.frame_len - 1) / cfg.frame_len);
    const std::uint64_t shard_frames =
        cfg.shard_slots == 0 ? n_frames
                             : std::max<std::uint64_t>(1, cfg.shard_slots / cfg.frame_len);
    const std::uint64_t window_frames = cfg.window_slots / cfg.frame_len + 1;

    PairingStream pairing(cfg.window_slots);
    EstimateRing ring(shard_frames + 3 * window_frames + 4);
    std::array<PhaseEstimate, 3> last_effective{};  // invalid until first estimate

    RunOutput out;
    out.stats.n_frames = n_frames;
    out.stats.n_slots = n_frames * cfg.frame_len;
    SecurityAccounting& acc = out.accounting;
    acc.n_quantum_slots = n_frames * sched.quantum_per_frame;

    auto pulse_lookup = [&](User u, std::uint64_t slot) {
        return pulse_at(u, slot, sched, cfg, seed);
    };

    std::vector<TripleEvent> triples;
    auto process_triples = [&]() {
        for (const TripleEvent& t : triples) {
            const SiftedEvent ev = classify_event(t, pulse_lookup);
            ++out.stats.triples;

            if (ev.z_gain_eligible()) {
                acc.z_gain_count[ev.z_combo()] += 1.0;
                if (ev.basis == Basis::Z && ev.z_combo() == kComboMuMuMu) {
                    acc.s_z_mu3 += 1.0;
                    // Valid events satisfy bitB = bitC = 1 - bitA.
                    acc.err_ab += ev.z_bit[1] == ev.z_bit[0];
                    acc.err_ac += ev.z_bit[2] == ev.z_bit[0];
                }
            }

            std::optional<double> theta;
            bool kept = false, expected_even = false;
            if (ev.x_gain_eligible()) {
                const std::array<PhaseEstimate, 3> est{
                    ring.at(sched.frame_of(t.c1.slot))[0],
                    ring.at(sched.frame_of(t.c2.slot))[1],
                    ring.at(sched.frame_of(t.c3.slot))[2],
                };
                if (est[0].valid && est[1].valid && est[2].valid) {
                    const std::array<double, 3> th =
                        options.apply_compensation
                            ? std::array<double, 3>{est[0].theta_hat, est[1].theta_hat,
                                                    est[2].theta_hat}
                            : std::array<double, 3>{0.0, 0.0, 0.0};
                    theta = compensate(ev.delta, th, convention);
                    if (const auto exp_even = slice_expected_even(*theta)) {
                        kept = true;
                        expected_even = *exp_even;
                        const int xc = ev.x_combo();
                        acc.x_kept_count[xc] += 1.0;
                        if (expected_even != ev.parity_even) acc.x_error_count[xc] += 1.0;
                    }
                    if (calib_out && ev.basis == Basis::X)
                        calib_out->push_back({ev.delta, th, ev.parity_even});
                }
            }
            if (sinks.on_event) sinks.on_event(ev, theta, kept, expected_even);
        }
        triples.clear();
    };

    DriftState drift = init_drift(seed);
    std::vector<std::array<double, 3>> thetas;
    std::vector<FrameResult> results;

    for (std::uint64_t f0 = 0; f0 < n_frames; f0 += shard_frames) {
        const std::uint64_t fs = std::min(shard_frames, n_frames - f0);

        // Drift is sequential; materialize it for the shard first.
        thetas.resize(fs);
        for (std::uint64_t i = 0; i < fs; ++i) {
            thetas[i] = drift.theta;
            drift = advance_drift(drift, (f0 + i + 1) * cfg.frame_len, cfg, seed);
        }

        results.resize(fs);
        if (kind == KernelKind::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
            for (std::int64_t i = 0; i < static_cast<std::int64_t>(fs); ++i) {
                FrameContext ctx{&cfg, &sched, seed, f0 + static_cast<std::uint64_t>(i),
                                 thetas[static_cast<std::uint64_t>(i)]};
                results[static_cast<std::uint64_t>(i)] = simulate_frame_fast(ctx);
            }
        } else {
            for (std::uint64_t i = 0; i < fs; ++i) {
                FrameContext ctx{&cfg, &sched, seed, f0 + i, thetas[i]};
                results[i] = simulate_frame_reference(ctx);
            }
        }

        // Ordered consumption: estimates, sinks, pairing.
        for (std::uint64_t i = 0; i < fs; ++i) {
            const std::uint64_t f = f0 + i;
            if (sinks.on_pulse) {
                for (std::uint64_t s = f * cfg.frame_len; s < (f + 1) * cfg.frame_len; ++s)
                    for (User u : kUsers) sinks.on_pulse(pulse_lookup(u, s));
            }
            std::array<PhaseEstimate, 3> eff;
            for (int p = 0; p < 3; ++p) {
                const PhaseEstimate raw = estimate_pair_phase(results[i].ref[p], f);
                if (sinks.on_phase) sinks.on_phase(f, p, raw, results[i].ref[p]);
                eff[p] = raw.valid ? raw : last_effective[p];
                eff[p].interval = f;
                last_effective[p] = eff[p];
            }
            ring.store(f, eff);
            for (const ClickRecord& c : results[i].clicks) {
                pairing.push(c);
                if (sinks.on_click) sinks.on_click(c);
            }
        }

        pairing.advance((f0 + fs) * cfg.frame_len - 1, triples);
        process_triples();
    }

    pairing.finish(triples);
    process_triples();

    out.stats.clicks = pairing.total_clicks();
    out.stats.paired = pairing.paired_clicks();
    return out;
}

}  // namespace qcc
