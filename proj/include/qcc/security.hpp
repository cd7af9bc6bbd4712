#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qcc/types.hpp"

// Finite-size decoy-state estimation and secure-key evaluation: confidence
// bounds on observed counts, LP bounds on the single-photon-triple yield
// and phase error, the key-length formula, rate conversion, and a
// closed-form rate model for loss sweeps.

namespace qcc {

struct ConfidenceBound {
    double observed = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double epsilon = 0.0;
};

// Multiplicative-style concentration bounds with beta = ln(1/epsilon):
// upper = x + beta + sqrt(2*beta*x + beta^2), lower = max(0, x - sqrt(2*beta*x)).
ConfidenceBound chernoff_bounds(double x, double epsilon);

// H2(x) = -x log2 x - (1-x) log2 (1-x), with H2(0) = H2(1) = 0.
double binary_entropy(double x);

// Per-combo tallies. Combos index {A,B,C} base-3; Z digits are the user's
// localized intensity (0=mu, 1=nu, 2=vacuum), X digits the user's
// equal-intensity pair (0={mu,mu}, 1={nu,nu}, 2={0,0}).
constexpr int kNumCombos = 27;
constexpr int kComboMuMuMu = 0;
constexpr int kComboNuNuNu = 13;  // 1*9 + 1*3 + 1

std::string z_combo_name(int combo);
std::string x_combo_name(int combo);

struct SecurityAccounting {
    std::uint64_t n_quantum_slots = 0;

    std::array<double, kNumCombos> z_gain_count{};   // Z-side decoy tallies
    std::array<double, kNumCombos> x_kept_count{};   // X-side, after phase slice
    std::array<double, kNumCombos> x_error_count{};

    double s_z_mu3 = 0.0;      // Z events with combo (mu,mu,mu)
    double err_ab = 0.0;       // bit mismatches vs Alice among mu3 events
    double err_ac = 0.0;

    double z_error_ab() const { return s_z_mu3 > 0 ? err_ab / s_z_mu3 : 0.0; }
    double z_error_ac() const { return s_z_mu3 > 0 ? err_ac / s_z_mu3 : 0.0; }
    double x_error() const {
        return x_kept_count[kComboNuNuNu] > 0
                   ? x_error_count[kComboNuNuNu] / x_kept_count[kComboNuNuNu]
                   : 0.0;
    }
};

// Prior probability that a user's slot pair carries the given Z / X pattern.
double z_pattern_prior(int digit, const SystemConfig& cfg);
double x_pattern_prior(int digit, const SystemConfig& cfg);
double z_combo_prior(int combo, const SystemConfig& cfg);
double x_combo_prior(int combo, const SystemConfig& cfg);

struct DecoyBounds {
    double y111_lower = 0.0;      // Z-side single-photon-triple yield
    double e111ph_upper = 0.5;    // phase-error bound for those triples
    double s111_lower = 0.0;      // surviving single-photon count in the mu3 block
};

// Two truncated LPs over photon-number yields with Poisson mixture
// constraints per intensity combo, Chernoff-widened gain intervals and
// tail slack beyond the cutoff. Throws DecoyInfeasible when the observed
// statistics admit no yield decomposition.
struct DecoyInfeasible : std::runtime_error {
    explicit DecoyInfeasible(const std::string& what) : std::runtime_error(what) {}
    std::vector<std::string> violated;
};

DecoyBounds decoy_lp_bounds(const SecurityAccounting& acc, const SystemConfig& cfg, int cutoff);

struct KeyInputs {
    double s111_lower = 0.0;
    double e111ph_upper = 0.0;
    double s_mu3_upper = 0.0;
    double e_ab_upper = 0.0;
    double e_ac_upper = 0.0;
};

// l = max(0, s111*(1 - H2(e111)) - f * s_mu3 * max(H2(E_AB), H2(E_AC))).
double key_length(const KeyInputs& in, const SystemConfig& cfg);

struct KeyRate {
    double per_pulse = 0.0;
    double per_second = 0.0;
};

KeyRate rate_conversion(double key_bits, std::uint64_t n_quantum_slots, const SystemConfig& cfg);

// Repeaterless limit -log2(1 - eta^2) in bits per pulse; eta in (0,1).
double repeaterless_bound(double eta);

// Full evaluation from accounting to key; uses Chernoff bounds everywhere.
struct SecuritySummary {
    DecoyBounds decoy;
    KeyInputs inputs;
    double key_bits = 0.0;
    KeyRate rate;
    double z_error_ab = 0.0;
    double z_error_ac = 0.0;
    double x_error = 0.0;
};

SecuritySummary evaluate_security(const SecurityAccounting& acc, const SystemConfig& cfg);

// ---- Closed-form rate model for parameter sweeps ----

struct AnalyticPoint {
    double total_loss_db = 0.0;
    double eta_total = 0.0;          // end-to-end transmittance 10^(-dB/10)
    double rate_per_pulse = 0.0;
    double rate_bits_per_s = 0.0;
    double bound_per_pulse = 0.0;    // repeaterless bound at eta_total
    double s111_lower = 0.0;
    double e111ph_upper = 0.0;
    double z_error = 0.0;
    double x_error = 0.0;
    double coincidence_rate_per_pulse = 0.0;  // same-slot-triple reference model
};

// Expected accounting at the configured settings with per-arm transmittance
// set from the total loss (split equally across the three arms), evaluated
// through the same decoy LP and key formula as the Monte Carlo pipeline.
// `coincidence` replaces the pairing yield with the same-slot requirement.
SecurityAccounting analytic_accounting(const SystemConfig& cfg, std::uint64_t n_quantum_slots,
                                       bool coincidence);

AnalyticPoint analytic_point(SystemConfig cfg, double total_loss_db,
                             std::uint64_t n_quantum_slots);

std::vector<AnalyticPoint> analytic_sweep(const SystemConfig& cfg, double db_from, double db_to,
                                          double db_step, std::uint64_t n_quantum_slots);

// Phase-averaged per-slot probability that exactly one detector fires at a
// port, for one intensity pair (grid-exact average over the 16x16 phases).
double single_click_probability(double k_u, double k_v, const SystemConfig& cfg);

}  // namespace qcc
