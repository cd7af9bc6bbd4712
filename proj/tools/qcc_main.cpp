// qcc: three-user mode-pairing conferencing simulator and security analysis.
//
// Subcommands:
//   simulate       full Monte Carlo pipeline -> sifted events, phase log, summary
//   analyze        recompute security outputs from a stored sifted-event CSV
//   sweep          closed-form key-rate curve over total channel loss
//   calibrate-signs  8-vertex phase-difference sign calibration table
//   pairing-demo   paired vs coincidence counts vs window length
//
// Exit codes: 0 success, 2 config error, 3 infeasible decoy LP, 4 I/O failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <omp.h>

#include "qcc/engine.hpp"
#include "qcc/io.hpp"
#include "qcc/rng.hpp"

namespace fs = std::filesystem;
using namespace qcc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

struct CommonArgs {
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "config file (key = value lines)");
    cmd->add_option("--seed", args.seed, "64-bit run seed");
    cmd->add_option("--out", args.out_dir, "output directory");
    for (const std::string& key : config_keys()) {
        cmd->add_option_function<std::string>(
               "--" + key,
               [&args, key](const std::string& v) { args.overrides.emplace_back(key, v); },
               "override config key " + key)
            ->expected(1);
    }
}

SystemConfig resolve_config(const CommonArgs& args) {
    SystemConfig cfg;
    if (!args.config_path.empty()) cfg = load_config_file(args.config_path);
    for (const auto& [k, v] : args.overrides) apply_override(cfg, k, v);
    const auto violations = validate_config(cfg);
    if (!violations.empty()) {
        for (const auto& v : violations)
            std::cerr << "config error: " << v.message << " (" << v.field << " = " << v.observed
                      << ")\n";
        throw CLI::RuntimeError(kExitConfig);
    }
    return cfg;
}

void apply_thread_cap() {
    if (const char* env = std::getenv("QCC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }
}

SignConvention parse_flips(const std::string& s) {
    if (s.size() != 3 || s.find_first_not_of("01") != std::string::npos)
        throw CLI::ValidationError("--flips expects three binary digits, e.g. 010");
    SignConvention c;
    for (int i = 0; i < 3; ++i) c.flips[i] = s[i] == '1';
    return c;
}

int run_simulate(const CommonArgs& args, const std::string& kernel, const std::string& flips,
                 bool no_compensation, const std::string& dump_pulses,
                 const std::string& dump_clicks) {
    const SystemConfig cfg = resolve_config(args);
    fs::create_directories(args.out_dir);
    RunManifest manifest{cfg, args.seed, "simulate", args.out_dir};

    EngineOptions opt;
    opt.kernel = kernel == "serial" ? KernelKind::SerialReference : KernelKind::Parallel;
    opt.convention = parse_flips(flips);
    opt.apply_compensation = !no_compensation;

    const FrameSchedule sched = build_frame_schedule(cfg, cfg.frame_len);
    const std::uint64_t n_frames =
        std::max<std::uint64_t>(1, (cfg.total_slots + cfg.frame_len - 1) / cfg.frame_len);
    const std::uint64_t n_quantum = n_frames * sched.quantum_per_frame;

    SiftedEventWriter events(args.out_dir + "/sifted_events.csv", manifest, n_quantum);
    PhaseLogWriter phases(args.out_dir + "/phase_log.csv", manifest);
    std::unique_ptr<PulseDumpWriter> pulse_dump;
    std::unique_ptr<ClickDumpWriter> click_dump;
    if (!dump_pulses.empty()) pulse_dump = std::make_unique<PulseDumpWriter>(dump_pulses);
    if (!dump_clicks.empty()) click_dump = std::make_unique<ClickDumpWriter>(dump_clicks);

    EngineSinks sinks;
    sinks.on_event = [&](const SiftedEvent& ev, std::optional<double> theta, bool, bool) {
        events.write(ev, theta);
    };
    sinks.on_phase = [&](std::uint64_t f, int p, const PhaseEstimate& est,
                         const ReferenceCounts& counts) { phases.write(f, p, est, counts); };
    if (click_dump)
        sinks.on_click = [&](const ClickRecord& c) { click_dump->write(c); };
    if (pulse_dump)
        sinks.on_pulse = [&](const PulseDescriptor& p) { pulse_dump->write(p); };

    const RunOutput out = run_simulation(cfg, args.seed, opt, sinks);
    const SecuritySummary summary = evaluate_security(out.accounting, cfg);
    events.close();
    phases.close();
    write_summary(args.out_dir + "/summary.txt", summary, out.stats, out.accounting, manifest);

    std::cout << "triples " << out.stats.triples << ", s_z_mu3 " << out.accounting.s_z_mu3
              << ", x_error " << summary.x_error << ", key " << summary.key_bits << " bits ("
              << summary.rate.per_pulse << " /pulse, " << summary.rate.per_second << " bit/s)\n";
    return kExitOk;
}

int run_analyze(const CommonArgs& args, const std::string& events_path) {
    const SystemConfig cfg = resolve_config(args);
    fs::create_directories(args.out_dir);
    RunManifest manifest{cfg, args.seed, "analyze", args.out_dir};

    const SiftedCsv csv = read_sifted_csv(events_path);
    const SecurityAccounting acc = accounting_from_csv(csv, SignConvention{});
    const SecuritySummary summary = evaluate_security(acc, cfg);
    RunStats stats;
    stats.triples = csv.rows.size();
    write_summary(args.out_dir + "/summary.txt", summary, stats, acc, manifest);
    std::cout << "events " << csv.rows.size() << ", key " << summary.key_bits << " bits ("
              << summary.rate.per_pulse << " /pulse)\n";
    return kExitOk;
}

int run_sweep(const CommonArgs& args, double from_db, double to_db, double step_db,
              double pulses) {
    const SystemConfig cfg = resolve_config(args);
    fs::create_directories(args.out_dir);
    RunManifest manifest{cfg, args.seed, "sweep", args.out_dir};
    const auto points =
        analytic_sweep(cfg, from_db, to_db, step_db, static_cast<std::uint64_t>(pulses));
    write_sweep_csv(args.out_dir + "/sweep.csv", points, manifest);
    std::cout << "sweep points " << points.size() << " -> " << args.out_dir << "/sweep.csv\n";
    return kExitOk;
}

int run_calibrate(const CommonArgs& args, const std::string& inject) {
    const SystemConfig cfg = resolve_config(args);
    fs::create_directories(args.out_dir);
    RunManifest manifest{cfg, args.seed, "calibrate-signs", args.out_dir};

    std::vector<CalibrationEvent> events;
    EngineOptions opt;
    run_simulation(cfg, args.seed, opt, {}, &events);

    const SignConvention injected = parse_flips(inject);
    for (auto& ev : events)
        for (int p = 0; p < 3; ++p)
            if (injected.flips[p]) ev.theta_hat[p] = wrap_2pi(-ev.theta_hat[p]);

    const CalibrationResult result = calibrate_sign_convention(events);

    std::ofstream out(args.out_dir + "/sign_calibration.csv");
    if (!out) throw std::runtime_error("cannot open sign_calibration.csv");
    out << "vertex,flip_ab,flip_bc,flip_ca,x_error,kept_events,selected\n";
    out.precision(12);
    for (int i = 0; i < 8; ++i) {
        const SignConvention c = SignConvention::from_index(i);
        out << i << ',' << c.flips[0] << ',' << c.flips[1] << ',' << c.flips[2] << ','
            << result.error_by_vertex[i] << ',' << result.kept_by_vertex[i] << ','
            << (c == result.convention ? 1 : 0) << '\n';
    }
    out << "# manifest_sha256=" << manifest.hash() << "\n";
    if (!out) throw std::runtime_error("sign calibration CSV write failed");

    std::cout << "calibration events " << events.size() << ", selected vertex "
              << result.convention.index() << " (injected " << injected.index() << ")\n";
    return kExitOk;
}

int run_pairing_demo(const CommonArgs& args, const std::vector<double>& p_clicks,
                     const std::vector<std::uint64_t>& windows, std::uint64_t n_slots) {
    const SystemConfig cfg = resolve_config(args);
    fs::create_directories(args.out_dir);
    RunManifest manifest{cfg, args.seed, "pairing-demo", args.out_dir};

    std::ofstream out(args.out_dir + "/pairing_demo.csv");
    if (!out) throw std::runtime_error("cannot open pairing_demo.csv");
    out << "p_click,window_slots,n_slots,total_clicks,paired_clicks,triples,coincidences\n";

    for (double p : p_clicks) {
        // Synthetic Bernoulli click streams shared across window settings.
        std::array<std::vector<ClickRecord>, 3> streams;
        for (int port = 0; port < 3; ++port) {
            for (std::uint64_t s = 0; s < n_slots; ++s) {
                const std::uint64_t h =
                    rng::hash(args.seed, rng::Stream::synth, 100 + port, s);
                if (rng::to_unit(h) < p)
                    streams[port].push_back({kPorts[port], s,
                                             (h & 1) ? DetectorSide::R : DetectorSide::L});
            }
        }
        std::uint64_t coincidences = 0;
        {
            std::size_t i2 = 0, i3 = 0;
            for (const auto& c : streams[0]) {
                while (i2 < streams[1].size() && streams[1][i2].slot < c.slot) ++i2;
                while (i3 < streams[2].size() && streams[2][i3].slot < c.slot) ++i3;
                if (i2 < streams[1].size() && streams[1][i2].slot == c.slot &&
                    i3 < streams[2].size() && streams[2][i3].slot == c.slot)
                    ++coincidences;
            }
        }
        const std::uint64_t total =
            streams[0].size() + streams[1].size() + streams[2].size();
        for (std::uint64_t w : windows) {
            const auto triples = pair_clicks(streams, w);
            out << p << ',' << w << ',' << n_slots << ',' << total << ','
                << 3 * triples.size() << ',' << triples.size() << ',' << coincidences << '\n';
        }
    }
    out << "# manifest_sha256=" << manifest.hash() << "\n";
    if (!out) throw std::runtime_error("pairing demo CSV write failed");
    std::cout << "pairing demo -> " << args.out_dir << "/pairing_demo.csv\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_cap();
    CLI::App app{"three-user mode-pairing conferencing simulator"};
    app.require_subcommand(1);

    CommonArgs sim_args, ana_args, sweep_args, cal_args, demo_args;

    auto* sim = app.add_subcommand("simulate", "run the Monte Carlo pipeline");
    add_common(sim, sim_args);
    std::string kernel = "parallel", flips = "000";
    bool no_comp = false;
    std::string dump_pulses, dump_clicks;
    sim->add_option("--kernel", kernel, "parallel | serial")
        ->check(CLI::IsMember({"parallel", "serial"}));
    sim->add_option("--flips", flips, "sign convention as three binary digits");
    sim->add_flag("--no-phase-compensation", no_comp, "ignore drift estimates in total phase");
    sim->add_option("--dump-pulses", dump_pulses, "binary pulse-train dump path");
    sim->add_option("--dump-clicks", dump_clicks, "binary click-stream dump path");

    auto* ana = app.add_subcommand("analyze", "recompute security outputs from a sifted CSV");
    add_common(ana, ana_args);
    std::string events_path;
    ana->add_option("--events", events_path, "sifted_events.csv path")->required();

    auto* swp = app.add_subcommand("sweep", "analytic key-rate curve over total loss");
    add_common(swp, sweep_args);
    double from_db = 40.0, to_db = 70.0, step_db = 5.0, pulses = 1e13;
    swp->add_option("--from-db", from_db, "sweep start, total loss dB");
    swp->add_option("--to-db", to_db, "sweep end, total loss dB");
    swp->add_option("--step-db", step_db, "sweep step, dB");
    swp->add_option("--pulses", pulses, "quantum pulses per point");

    auto* cal = app.add_subcommand("calibrate-signs", "sign-convention calibration table");
    add_common(cal, cal_args);
    std::string inject = "000";
    cal->add_option("--inject", inject, "flips injected into the estimates, e.g. 101");

    auto* demo = app.add_subcommand("pairing-demo", "paired vs coincidence counts per window");
    add_common(demo, demo_args);
    std::vector<double> p_clicks{1e-2, 1e-3};
    std::vector<std::uint64_t> windows{100, 1000, 10000, 100000};
    std::uint64_t demo_slots = 10000000;
    demo->add_option("--p-click", p_clicks, "per-slot click probabilities");
    demo->add_option("--window", windows, "window lengths in slots");
    demo->add_option("--slots", demo_slots, "number of slots");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return run_simulate(sim_args, kernel, flips, no_comp, dump_pulses, dump_clicks);
        if (ana->parsed()) return run_analyze(ana_args, events_path);
        if (swp->parsed()) return run_sweep(sweep_args, from_db, to_db, step_db, pulses);
        if (cal->parsed()) return run_calibrate(cal_args, inject);
        if (demo->parsed()) return run_pairing_demo(demo_args, p_clicks, windows, demo_slots);
    } catch (const CLI::RuntimeError& e) {
        return e.get_exit_code();
    } catch (const DecoyInfeasible& e) {
        std::cerr << "error: " << e.what() << "\n";
        for (const auto& row : e.violated) std::cerr << "  violated: " << row << "\n";
        return kExitInfeasible;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitOk;
}
