#include "qcc/types.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace qcc {

double PhaseIndex::radians() const { return 2.0 * M_PI * n / kPhaseLevels; }

namespace {

struct FieldDef {
    std::function<double(const SystemConfig&)> get;
    std::function<void(SystemConfig&, double)> set;
};

// Field table shared by serialize/parse/override so key names stay in sync
// with the struct.
const std::map<std::string, FieldDef>& field_table() {
    static const std::map<std::string, FieldDef> table = {
#define QCC_FIELD(name) \
    {#name, {[](const SystemConfig& c) { return static_cast<double>(c.name); }, \
             [](SystemConfig& c, double v) { c.name = v; }}}
#define QCC_FIELD_U64(name) \
    {#name, {[](const SystemConfig& c) { return static_cast<double>(c.name); }, \
             [](SystemConfig& c, double v) { c.name = static_cast<std::uint64_t>(v); }}}
        QCC_FIELD(rep_rate),
        QCC_FIELD(quantum_duty),
        QCC_FIELD(per_arm_transmittance),
        QCC_FIELD(detector_efficiency),
        QCC_FIELD(dark_count_prob),
        QCC_FIELD(p_mu),
        QCC_FIELD(p_nu),
        QCC_FIELD(mu),
        QCC_FIELD(nu),
        QCC_FIELD(f_ec),
        QCC_FIELD(epsilon),
        QCC_FIELD_U64(window_slots),
        QCC_FIELD(drift_rate),
        QCC_FIELD(visibility),
        QCC_FIELD(ref_intensity),
        QCC_FIELD_U64(frame_len),
        QCC_FIELD_U64(total_slots),
        QCC_FIELD_U64(shard_slots),
        {"lp_cutoff", {[](const SystemConfig& c) { return static_cast<double>(c.lp_cutoff); },
                       [](SystemConfig& c, double v) { c.lp_cutoff = static_cast<int>(v); }}},
#undef QCC_FIELD
#undef QCC_FIELD_U64
    };
    return table;
}

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

}  // namespace

std::vector<ConfigViolation> validate_config(const SystemConfig& cfg) {
    std::vector<ConfigViolation> out;
    auto bad = [&out](const std::string& field, double observed, const std::string& msg) {
        out.push_back({field, observed, msg});
    };

    if (cfg.rep_rate <= 0) bad("rep_rate", cfg.rep_rate, "rep_rate > 0 violated");
    if (!in_unit(cfg.quantum_duty))
        bad("quantum_duty", cfg.quantum_duty, "quantum_duty in [0,1] violated");
    if (cfg.per_arm_transmittance <= 0 || cfg.per_arm_transmittance > 1)
        bad("per_arm_transmittance", cfg.per_arm_transmittance,
            "per_arm_transmittance in (0,1] violated");
    if (!in_unit(cfg.detector_efficiency))
        bad("detector_efficiency", cfg.detector_efficiency,
            "detector_efficiency in [0,1] violated");
    if (!in_unit(cfg.dark_count_prob))
        bad("dark_count_prob", cfg.dark_count_prob, "dark_count_prob in [0,1] violated");
    if (!in_unit(cfg.p_mu)) bad("p_mu", cfg.p_mu, "p_mu in [0,1] violated");
    if (!in_unit(cfg.p_nu)) bad("p_nu", cfg.p_nu, "p_nu in [0,1] violated");
    if (cfg.p_mu + cfg.p_nu > 1.0)
        bad("p_mu", cfg.p_mu + cfg.p_nu, "p_mu+p_nu <= 1 violated");
    if (!(cfg.nu > 0.0)) bad("nu", cfg.nu, "0 < nu violated");
    if (!(cfg.nu < cfg.mu)) bad("nu", cfg.nu, "nu < mu violated");
    if (!(cfg.mu < 1.0)) bad("mu", cfg.mu, "mu < 1 violated");
    if (!(cfg.f_ec >= 1.0)) bad("f_ec", cfg.f_ec, "f_ec >= 1 violated");
    if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
        bad("epsilon", cfg.epsilon, "epsilon in (0,1) violated");
    if (cfg.window_slots == 0) bad("window_slots", 0.0, "window_slots >= 1 violated");
    if (cfg.drift_rate < 0) bad("drift_rate", cfg.drift_rate, "drift_rate >= 0 violated");
    if (!in_unit(cfg.visibility)) bad("visibility", cfg.visibility, "visibility in [0,1] violated");
    if (!(cfg.ref_intensity > 0.0))
        bad("ref_intensity", cfg.ref_intensity, "ref_intensity > 0 violated");
    if (cfg.frame_len < 100) bad("frame_len", static_cast<double>(cfg.frame_len),
                                 "frame_len >= 100 violated");
    if (cfg.lp_cutoff < 2) bad("lp_cutoff", cfg.lp_cutoff, "lp_cutoff >= 2 violated");
    return out;
}

std::string serialize_config(const SystemConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    for (const auto& [key, def] : field_table()) os << key << " = " << def.get(cfg) << "\n";
    return os.str();
}

void apply_override(SystemConfig& cfg, const std::string& key, const std::string& value) {
    auto it = field_table().find(key);
    if (it == field_table().end()) throw std::runtime_error("unknown config key: " + key);
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::runtime_error("bad numeric value for " + key + ": " + value);
    it->second.set(cfg, v);
}

SystemConfig parse_config(std::istream& in) {
    SystemConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            auto b = s.find_first_not_of(" \t\r");
            auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        apply_override(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

SystemConfig parse_config_string(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, def] : field_table()) keys.push_back(key);
    return keys;
}

SystemConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace qcc
