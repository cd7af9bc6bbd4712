#include "qcc/security.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qcc/lp.hpp"
#include "qcc/optics.hpp"

namespace qcc {

ConfidenceBound chernoff_bounds(double x, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("chernoff_bounds: epsilon outside (0,1)");
    if (x < 0) throw std::invalid_argument("chernoff_bounds: negative count");
    const double beta = std::log(1.0 / epsilon);
    ConfidenceBound b;
    b.observed = x;
    b.epsilon = epsilon;
    b.upper = x + beta + std::sqrt(2.0 * beta * x + beta * beta);
    b.lower = std::max(0.0, x - std::sqrt(2.0 * beta * x));
    return b;
}

double binary_entropy(double x) {
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("binary_entropy: domain is [0,1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {

// H2 extended conservatively: error fractions at or beyond 1/2 cost a full
// bit.
double entropy_cost(double x) { return x >= 0.5 ? 1.0 : binary_entropy(std::max(x, 0.0)); }

double poisson_pmf(int n, double lambda) {
    if (lambda == 0.0) return n == 0 ? 1.0 : 0.0;
    double logp = -lambda + n * std::log(lambda);
    for (int i = 2; i <= n; ++i) logp -= std::log(static_cast<double>(i));
    return std::exp(logp);
}

std::array<int, 3> combo_digits(int combo) {
    return {combo / 9, (combo / 3) % 3, combo % 3};
}

double z_digit_intensity(int d, const SystemConfig& cfg) {
    return d == 0 ? cfg.mu : (d == 1 ? cfg.nu : 0.0);
}
// X patterns carry the intensity in both slots; the user's Poisson mean is
// twice the per-slot value.
double x_digit_intensity(int d, const SystemConfig& cfg) {
    return d == 0 ? 2.0 * cfg.mu : (d == 1 ? 2.0 * cfg.nu : 0.0);
}

const char* digit_name_z(int d) { return d == 0 ? "mu" : (d == 1 ? "nu" : "0"); }
const char* digit_name_x(int d) { return d == 0 ? "2mu" : (d == 1 ? "2nu" : "0"); }

}  // namespace

std::string z_combo_name(int combo) {
    const auto d = combo_digits(combo);
    return std::string(digit_name_z(d[0])) + "," + digit_name_z(d[1]) + "," + digit_name_z(d[2]);
}

std::string x_combo_name(int combo) {
    const auto d = combo_digits(combo);
    return std::string(digit_name_x(d[0])) + "," + digit_name_x(d[1]) + "," + digit_name_x(d[2]);
}

double z_pattern_prior(int digit, const SystemConfig& cfg) {
    const double p0 = cfg.vacuum_prob();
    switch (digit) {
        case 0: return 2.0 * cfg.p_mu * p0;
        case 1: return 2.0 * cfg.p_nu * p0;
        default: return p0 * p0;
    }
}

double x_pattern_prior(int digit, const SystemConfig& cfg) {
    const double p0 = cfg.vacuum_prob();
    switch (digit) {
        case 0: return cfg.p_mu * cfg.p_mu;
        case 1: return cfg.p_nu * cfg.p_nu;
        default: return p0 * p0;
    }
}

double z_combo_prior(int combo, const SystemConfig& cfg) {
    const auto d = combo_digits(combo);
    return z_pattern_prior(d[0], cfg) * z_pattern_prior(d[1], cfg) * z_pattern_prior(d[2], cfg);
}

double x_combo_prior(int combo, const SystemConfig& cfg) {
    const auto d = combo_digits(combo);
    return x_pattern_prior(d[0], cfg) * x_pattern_prior(d[1], cfg) * x_pattern_prior(d[2], cfg);
}

namespace {

struct YieldIndex {
    int cutoff;
    int stride;
    int count;
    explicit YieldIndex(int nc) : cutoff(nc), stride(nc + 1), count((nc + 1) * (nc + 1) * (nc + 1)) {}
    int operator()(int na, int nb, int nc_) const { return (na * stride + nb) * stride + nc_; }
};

// Poisson mixture weight of photon triple n under combo means lam.
double triple_weight(const std::array<int, 3>& n, const std::array<double, 3>& lam) {
    return poisson_pmf(n[0], lam[0]) * poisson_pmf(n[1], lam[1]) * poisson_pmf(n[2], lam[2]);
}

double truncation_tail(const std::array<double, 3>& lam, int cutoff) {
    double inside = 0.0;
    for (int a = 0; a <= cutoff; ++a)
        for (int b = 0; b <= cutoff; ++b)
            for (int c = 0; c <= cutoff; ++c)
                inside += triple_weight({a, b, c}, lam);
    return std::max(0.0, 1.0 - inside);
}

struct GainInterval {
    double lo = 0.0;  // already tail-relaxed
    double hi = 0.0;
    bool present = false;
};

GainInterval gain_interval(double count, double trials, double tail, double epsilon) {
    GainInterval g;
    if (trials <= 0.0) return g;
    const ConfidenceBound cb = chernoff_bounds(count, epsilon);
    g.lo = std::max(0.0, cb.lower / trials - tail);
    g.hi = cb.upper / trials;
    g.present = true;
    return g;
}

}  // namespace

DecoyBounds decoy_lp_bounds(const SecurityAccounting& acc, const SystemConfig& cfg, int cutoff) {
    if (cutoff < 2) throw std::invalid_argument("decoy_lp_bounds: cutoff must be >= 2");
    const double n_slots = static_cast<double>(acc.n_quantum_slots);
    DecoyBounds out;

    // ---- Z-side LP: min Y_111 over Poisson mixture constraints ----
    const YieldIndex zi(cutoff);
    lp::Problem zp;
    zp.num_vars = zi.count;
    zp.maximize = false;
    zp.objective.assign(zp.num_vars, 0.0);
    zp.objective[zi(1, 1, 1)] = 1.0;
    zp.var_upper.assign(zp.num_vars, 1.0);

    for (int combo = 0; combo < kNumCombos; ++combo) {
        const double trials = n_slots * z_combo_prior(combo, cfg);
        const auto d = combo_digits(combo);
        const std::array<double, 3> lam{z_digit_intensity(d[0], cfg), z_digit_intensity(d[1], cfg),
                                        z_digit_intensity(d[2], cfg)};
        const GainInterval g =
            gain_interval(acc.z_gain_count[combo], trials, truncation_tail(lam, cutoff), cfg.epsilon);
        if (!g.present) continue;
        lp::Row row;
        row.name = "Z gain " + z_combo_name(combo);
        row.lo = g.lo;
        row.hi = g.hi;
        for (int a = 0; a <= cutoff; ++a)
            for (int b = 0; b <= cutoff; ++b)
                for (int c = 0; c <= cutoff; ++c) {
                    const double w = triple_weight({a, b, c}, lam);
                    if (w > 0.0) row.coeffs.emplace_back(zi(a, b, c), w);
                }
        zp.rows.push_back(std::move(row));
    }

    const lp::Result zres = lp::solve(zp);
    if (zres.status == lp::Status::Infeasible) {
        DecoyInfeasible err("decoy Z LP infeasible: observed gains admit no yield decomposition");
        err.violated = zres.violated_rows;
        throw err;
    }
    if (zres.status != lp::Status::Optimal)
        throw std::runtime_error("decoy Z LP: solver did not reach an optimum");
    out.y111_lower = std::max(0.0, zres.objective_value);

    const double p111_mu3 = triple_weight({1, 1, 1}, {cfg.mu, cfg.mu, cfg.mu});
    out.s111_lower = out.y111_lower * n_slots * z_combo_prior(kComboMuMuMu, cfg) * p111_mu3;

    // ---- X-side LP: max error-yield of the single-photon triple ----
    // Variables per photon triple n within the cutoff:
    //   any n_u = 0 : one variable V_n = EY_n = Ybar_n (error rate exactly
    //                 1/2: the vacuum user's encoded phase never reaches the
    //                 detectors, so parity is independent of the expected
    //                 sign); gain coefficient 2w, error coefficient w.
    //   all n_u >= 1: Ybar_n (correct part) and EY_n with Y_n = Ybar_n+EY_n.
    const YieldIndex xi(cutoff);
    std::vector<int> var_of_v(xi.count, -1), var_of_ybar(xi.count, -1), var_of_ey(xi.count, -1);
    int nv = 0;
    for (int a = 0; a <= cutoff; ++a)
        for (int b = 0; b <= cutoff; ++b)
            for (int c = 0; c <= cutoff; ++c) {
                const int id = xi(a, b, c);
                if (a == 0 || b == 0 || c == 0) {
                    var_of_v[id] = nv++;
                } else {
                    var_of_ybar[id] = nv++;
                    var_of_ey[id] = nv++;
                }
            }

    lp::Problem xp;
    xp.num_vars = nv;
    xp.maximize = true;
    xp.objective.assign(nv, 0.0);
    xp.var_upper.assign(nv, 1.0);
    for (int id = 0; id < xi.count; ++id)
        if (var_of_v[id] >= 0) xp.var_upper[var_of_v[id]] = 0.5;
    xp.objective[var_of_ey[xi(1, 1, 1)]] = 1.0;

    for (int combo = 0; combo < kNumCombos; ++combo) {
        const double trials = n_slots * x_combo_prior(combo, cfg);
        if (trials <= 0.0) continue;
        const auto d = combo_digits(combo);
        const std::array<double, 3> lam{x_digit_intensity(d[0], cfg), x_digit_intensity(d[1], cfg),
                                        x_digit_intensity(d[2], cfg)};
        const double tail = truncation_tail(lam, cutoff);

        lp::Row gain, err;
        gain.name = "X gain " + x_combo_name(combo);
        err.name = "X error " + x_combo_name(combo);
        const GainInterval gg =
            gain_interval(acc.x_kept_count[combo], trials, tail, cfg.epsilon);
        const GainInterval ge =
            gain_interval(acc.x_error_count[combo], trials, tail, cfg.epsilon);
        gain.lo = gg.lo;
        gain.hi = gg.hi;
        err.lo = ge.lo;
        err.hi = ge.hi;
        for (int a = 0; a <= cutoff; ++a)
            for (int b = 0; b <= cutoff; ++b)
                for (int c = 0; c <= cutoff; ++c) {
                    const int id = xi(a, b, c);
                    const double w = triple_weight({a, b, c}, lam);
                    if (w <= 0.0) continue;
                    if (var_of_v[id] >= 0) {
                        gain.coeffs.emplace_back(var_of_v[id], 2.0 * w);
                        err.coeffs.emplace_back(var_of_v[id], w);
                    } else {
                        gain.coeffs.emplace_back(var_of_ybar[id], w);
                        gain.coeffs.emplace_back(var_of_ey[id], w);
                        err.coeffs.emplace_back(var_of_ey[id], w);
                    }
                }
        xp.rows.push_back(std::move(gain));
        xp.rows.push_back(std::move(err));
    }

    // The X-basis single-photon yield equals the Z-side one divided by the
    // phase-slice retention (exactly 2 of the 16 total-phase classes).
    const double y111_from_z = out.y111_lower / 8.0;

    // Direct X-side lower bound on Y'_111 as well; use the better of the two.
    lp::Problem xmin = xp;
    xmin.maximize = false;
    xmin.objective.assign(nv, 0.0);
    xmin.objective[var_of_ybar[xi(1, 1, 1)]] = 1.0;
    xmin.objective[var_of_ey[xi(1, 1, 1)]] = 1.0;
    const lp::Result xmin_res = lp::solve(xmin);
    double y111_x = 0.0;
    if (xmin_res.status == lp::Status::Optimal) y111_x = std::max(0.0, xmin_res.objective_value);

    const double y111_lb = std::max(y111_from_z, y111_x);
    if (y111_lb > 0.0) {
        lp::Row anchor;
        anchor.name = "X single-photon yield floor";
        anchor.lo = y111_lb;
        anchor.hi = 1.0;
        anchor.coeffs.emplace_back(var_of_ybar[xi(1, 1, 1)], 1.0);
        anchor.coeffs.emplace_back(var_of_ey[xi(1, 1, 1)], 1.0);
        xp.rows.push_back(std::move(anchor));
    }

    const lp::Result xres = lp::solve(xp);
    if (xres.status == lp::Status::Infeasible) {
        DecoyInfeasible errx("decoy X LP infeasible: observed gains admit no yield decomposition");
        errx.violated = xres.violated_rows;
        throw errx;
    }
    if (xres.status != lp::Status::Optimal)
        throw std::runtime_error("decoy X LP: solver did not reach an optimum");

    if (y111_lb <= 0.0) {
        out.e111ph_upper = 0.5;
    } else {
        out.e111ph_upper = std::clamp(xres.objective_value / y111_lb, 0.0, 0.5);
    }
    return out;
}

double key_length(const KeyInputs& in, const SystemConfig& cfg) {
    const double gain = in.s111_lower * (1.0 - entropy_cost(in.e111ph_upper));
    const double cost = cfg.f_ec * in.s_mu3_upper *
                        std::max(entropy_cost(in.e_ab_upper), entropy_cost(in.e_ac_upper));
    return std::max(0.0, gain - cost);
}

KeyRate rate_conversion(double key_bits, std::uint64_t n_quantum_slots, const SystemConfig& cfg) {
    if (n_quantum_slots == 0) throw std::invalid_argument("rate_conversion: N must be > 0");
    KeyRate r;
    r.per_pulse = key_bits / static_cast<double>(n_quantum_slots);
    r.per_second = r.per_pulse * cfg.quantum_duty * cfg.rep_rate;
    return r;
}

double repeaterless_bound(double eta) {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::invalid_argument("repeaterless_bound: eta must be in (0,1)");
    return -std::log2(1.0 - eta * eta);
}

SecuritySummary evaluate_security(const SecurityAccounting& acc, const SystemConfig& cfg) {
    SecuritySummary s;
    s.decoy = decoy_lp_bounds(acc, cfg, cfg.lp_cutoff);
    s.inputs.s111_lower = s.decoy.s111_lower;
    s.inputs.e111ph_upper = s.decoy.e111ph_upper;
    s.inputs.s_mu3_upper = chernoff_bounds(acc.s_z_mu3, cfg.epsilon).upper;
    const double mu3_lo = chernoff_bounds(acc.s_z_mu3, cfg.epsilon).lower;
    s.inputs.e_ab_upper =
        mu3_lo > 0.0 ? std::min(1.0, chernoff_bounds(acc.err_ab, cfg.epsilon).upper / mu3_lo) : 1.0;
    s.inputs.e_ac_upper =
        mu3_lo > 0.0 ? std::min(1.0, chernoff_bounds(acc.err_ac, cfg.epsilon).upper / mu3_lo) : 1.0;
    s.key_bits = key_length(s.inputs, cfg);
    s.rate = rate_conversion(s.key_bits, acc.n_quantum_slots, cfg);
    s.z_error_ab = acc.z_error_ab();
    s.z_error_ac = acc.z_error_ac();
    s.x_error = acc.x_error();
    return s;
}

// ---- Closed-form sweep model ----

double single_click_probability(double k_u, double k_v, const SystemConfig& cfg) {
    double acc = 0.0;
    for (int d = 0; d < kPhaseLevels; ++d) {
        const PortIntensity in = port_mean_photons_raw(k_u, k_v, d, 0.0, cfg);
        const double pr = detect_probability(in.right, cfg);
        const double pl = detect_probability(in.left, cfg);
        acc += pr * (1.0 - pl) + pl * (1.0 - pr);
    }
    return acc / kPhaseLevels;
}

namespace {

struct ClickModel {
    // single-click probability per ordered intensity pair index (3x3; 0=mu,
    // 1=nu, 2=vacuum)
    std::array<std::array<double, 3>, 3> p{};
    double p_port = 0.0;  // unconditional per-slot single-click probability

    ClickModel(const SystemConfig& cfg) {
        const std::array<double, 3> k{cfg.mu, cfg.nu, 0.0};
        const std::array<double, 3> prob{cfg.p_mu, cfg.p_nu, cfg.vacuum_prob()};
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                p[a][b] = single_click_probability(k[a], k[b], cfg);
                p_port += prob[a] * prob[b] * p[a][b];
            }
    }
};

// Clicked-slot intensity digits for a Z combo under bit assignment
// (a,b,c): bit 0 puts the user's lit pulse at its first canonical port.
// Digit 2 denotes vacuum.
struct ZSlotDigits {
    std::array<std::array<int, 2>, 3> port_pair;  // per port: (first,second) digits
};

ZSlotDigits z_slot_digits(const std::array<int, 3>& d, int a, int b, int c) {
    ZSlotDigits s;
    s.port_pair[0] = {a == 0 ? d[0] : 2, b == 0 ? d[1] : 2};  // P1: A@t1, B@t1
    s.port_pair[1] = {b == 1 ? d[1] : 2, c == 0 ? d[2] : 2};  // P2: B@t2, C@t2
    s.port_pair[2] = {c == 1 ? d[2] : 2, a == 1 ? d[0] : 2};  // P3: C@t3, A@t3
    return s;
}

}  // namespace

SecurityAccounting analytic_accounting(const SystemConfig& cfg, std::uint64_t n_quantum_slots,
                                       bool coincidence) {
    const ClickModel cm(cfg);
    const double n = static_cast<double>(n_quantum_slots);
    const double p = cm.p_port;

    double n_triples;
    if (coincidence) {
        // Same-slot triples: all three ports click in one slot.
        double p_coinc = 0.0;
        const std::array<double, 3> prob{cfg.p_mu, cfg.p_nu, cfg.vacuum_prob()};
        for (int ka = 0; ka < 3; ++ka)
            for (int kb = 0; kb < 3; ++kb)
                for (int kc = 0; kc < 3; ++kc)
                    p_coinc += prob[ka] * prob[kb] * prob[kc] * cm.p[ka][kb] * cm.p[kb][kc] *
                               cm.p[kc][ka];
        n_triples = n * p_coinc;
    } else {
        // Greedy pairing saturation: every P1 click completes when both other
        // ports click at least once inside the window.
        const double completion =
            std::pow(1.0 - std::pow(1.0 - p, static_cast<double>(cfg.window_slots)), 2.0);
        n_triples = n * p * completion;
    }

    SecurityAccounting acc;
    acc.n_quantum_slots = n_quantum_slots;
    const double p3 = p * p * p;

    // Z-side combos: average the three-port click likelihood over the 8 bit
    // assignments; error when B's (C's) bit fails to complement Alice's.
    for (int combo = 0; combo < kNumCombos; ++combo) {
        const auto d = combo_digits(combo);
        double likelihood = 0.0;
        double err_b = 0.0, err_c = 0.0;
        for (int bits = 0; bits < 8; ++bits) {
            const int a = (bits >> 2) & 1, b = (bits >> 1) & 1, c = bits & 1;
            const ZSlotDigits sd = z_slot_digits(d, a, b, c);
            double l = 1.0;
            for (int port = 0; port < 3; ++port)
                l *= cm.p[sd.port_pair[port][0]][sd.port_pair[port][1]];
            likelihood += l / 8.0;
            if (b == a) err_b += l / 8.0;
            if (c == a) err_c += l / 8.0;
        }
        const double count = n_triples * z_combo_prior(combo, cfg) * likelihood / p3;
        acc.z_gain_count[combo] = count;
        if (combo == kComboMuMuMu && likelihood > 0.0) {
            acc.s_z_mu3 = count;
            acc.err_ab = count * err_b / likelihood;
            acc.err_ac = count * err_c / likelihood;
        }
    }

    // X-side combos: both slots of each user carry the digit intensity; the
    // phase slice keeps 1/8 of events. Kept-event error is the 3/8 floor
    // lifted by port visibility and the dark-count contrast penalty.
    const std::array<double, 3> kx{cfg.mu, cfg.nu, 0.0};
    for (int combo = 0; combo < kNumCombos; ++combo) {
        const auto d = combo_digits(combo);
        double likelihood = 1.0;
        double contrast = cfg.visibility * cfg.visibility * cfg.visibility;
        for (int port = 0; port < 3; ++port) {
            const auto [u, v] = port_users(kPorts[port]);
            const double iu = kx[d[static_cast<int>(u)]];
            const double iv = kx[d[static_cast<int>(v)]];
            likelihood *= cm.p[d[static_cast<int>(u)]][d[static_cast<int>(v)]];
            const double isum = 0.5 * (iu + iv) * cfg.per_arm_transmittance;
            if (iu + iv > 0.0) {
                double vis = 2.0 * std::sqrt(iu * iv) / (iu + iv);
                vis *= cfg.detector_efficiency * isum /
                       (cfg.detector_efficiency * isum + 2.0 * cfg.dark_count_prob);
                contrast *= vis;
            } else {
                contrast = 0.0;
            }
        }
        const double kept = n_triples * x_combo_prior(combo, cfg) * likelihood / p3 / 8.0;
        acc.x_kept_count[combo] = kept;
        acc.x_error_count[combo] = kept * (0.5 - contrast / 8.0);
    }
    return acc;
}

AnalyticPoint analytic_point(SystemConfig cfg, double total_loss_db,
                             std::uint64_t n_quantum_slots) {
    AnalyticPoint pt;
    pt.total_loss_db = total_loss_db;
    pt.eta_total = std::pow(10.0, -total_loss_db / 10.0);
    cfg.per_arm_transmittance = std::pow(10.0, -(total_loss_db / 3.0) / 10.0);

    const SecurityAccounting acc = analytic_accounting(cfg, n_quantum_slots, false);
    const SecuritySummary sum = evaluate_security(acc, cfg);
    pt.rate_per_pulse = sum.rate.per_pulse;
    pt.rate_bits_per_s = sum.rate.per_second;
    pt.s111_lower = sum.decoy.s111_lower;
    pt.e111ph_upper = sum.decoy.e111ph_upper;
    pt.z_error = sum.z_error_ab;
    pt.x_error = sum.x_error;
    pt.bound_per_pulse = repeaterless_bound(pt.eta_total);

    // Reference model: identical analysis fed by same-slot coincidences only.
    const SecurityAccounting acc_c = analytic_accounting(cfg, n_quantum_slots, true);
    const double triples = acc.z_gain_count[kComboMuMuMu];
    const double triples_c = acc_c.z_gain_count[kComboMuMuMu];
    pt.coincidence_rate_per_pulse =
        triples > 0.0 ? pt.rate_per_pulse * (triples_c / triples) : 0.0;
    return pt;
}

std::vector<AnalyticPoint> analytic_sweep(const SystemConfig& cfg, double db_from, double db_to,
                                          double db_step, std::uint64_t n_quantum_slots) {
    std::vector<AnalyticPoint> out;
    for (double db = db_from; db <= db_to + 1e-9; db += db_step)
        out.push_back(analytic_point(cfg, db, n_quantum_slots));
    return out;
}

}  // namespace qcc
