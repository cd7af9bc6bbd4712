// Throughput comparison: serial reference kernel vs the OpenMP table-driven
// kernel, on the same configuration. The two must produce identical
// accounting (also enforced by tests/test_engine.cpp); this target reports
// slots/second for each.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <omp.h>

#include "qcc/engine.hpp"

using namespace qcc;

namespace {

double run_once(const SystemConfig& cfg, KernelKind kind, RunOutput& out) {
    EngineOptions opt;
    opt.kernel = kind;
    const auto t0 = std::chrono::steady_clock::now();
    out = run_simulation(cfg, 42, opt);
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    SystemConfig cfg;
    cfg.per_arm_transmittance = 0.1;
    cfg.total_slots = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20000000ull;
    cfg.frame_len = 10000;
    cfg.shard_slots = 2000000;
    cfg.drift_rate = 100.0;

    if (const char* env = std::getenv("QCC_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) omp_set_num_threads(n);
    }

    RunOutput serial_out, parallel_out;
    const double ts = run_once(cfg, KernelKind::SerialReference, serial_out);
    const double tp = run_once(cfg, KernelKind::Parallel, parallel_out);

    const double slots = static_cast<double>(serial_out.stats.n_slots);
    std::printf("slots                %.3g\n", slots);
    std::printf("serial reference     %.2f s   %.1f Mslot/s\n", ts, slots / ts / 1e6);
    std::printf("openmp kernel        %.2f s   %.1f Mslot/s  (%d threads)\n", tp,
                slots / tp / 1e6, omp_get_max_threads());
    std::printf("speedup              %.2fx\n", ts / tp);

    const bool same = serial_out.stats.triples == parallel_out.stats.triples &&
                      serial_out.accounting.s_z_mu3 == parallel_out.accounting.s_z_mu3;
    std::printf("outputs identical    %s (triples %llu, s_z_mu3 %.0f)\n", same ? "yes" : "NO",
                static_cast<unsigned long long>(parallel_out.stats.triples),
                parallel_out.accounting.s_z_mu3);
    return same ? 0 : 1;
}
