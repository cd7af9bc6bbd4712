#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcc/engine.hpp"
#include "qcc/pairing.hpp"
#include "qcc/phase_comp.hpp"
#include "qcc/security.hpp"
#include "qcc/types.hpp"

// File formats: CSV artifacts (RFC 4180 quoting, header row, trailing
// manifest-hash comment), binary pulse/click dumps (little-endian), and the
// run manifest whose SHA-256 stamps every output.

namespace qcc {

std::string sha256_hex(const void* data, std::size_t len);
std::string sha256_hex(const std::string& s);
std::string sha256_file(const std::string& path);  // throws on I/O failure

struct RunManifest {
    SystemConfig cfg;
    std::uint64_t seed = 0;
    std::string mode;
    std::string out_dir;

    std::string canonical_text() const;  // excludes out_dir: content-defining inputs only
    std::string hash() const { return sha256_hex(canonical_text()); }
};

std::string csv_escape(const std::string& field);

// Sifted-event CSV: one row per triple with basis, bits, compensated total
// phase, parity and the per-user intensity pattern combo.
class SiftedEventWriter {
  public:
    SiftedEventWriter(const std::string& path, const RunManifest& manifest,
                      std::uint64_t n_quantum_slots);
    void write(const SiftedEvent& ev, std::optional<double> theta);
    void close();
    ~SiftedEventWriter();

  private:
    std::ofstream out_;
    std::string manifest_hash_;
    bool closed_ = false;
};

struct SiftedCsv {
    std::uint64_t n_quantum_slots = 0;
    struct Row {
        std::uint64_t p1_slot, p2_slot, p3_slot;
        Basis basis;
        std::array<int, 3> z_bit;
        std::optional<double> theta;
        bool parity_even;
        std::array<PatternCode, 3> pattern;
    };
    std::vector<Row> rows;
};

SiftedCsv read_sifted_csv(const std::string& path);

// Rebuilds the security tallies from a stored sifted-event CSV.
SecurityAccounting accounting_from_csv(const SiftedCsv& csv, const SignConvention& convention);

class PhaseLogWriter {
  public:
    PhaseLogWriter(const std::string& path, const RunManifest& manifest);
    void write(std::uint64_t interval, int port, const PhaseEstimate& est,
               const ReferenceCounts& counts);
    void close();
    ~PhaseLogWriter();

  private:
    std::ofstream out_;
    std::string manifest_hash_;
    bool closed_ = false;
};

void write_sweep_csv(const std::string& path, const std::vector<AnalyticPoint>& points,
                     const RunManifest& manifest);

void write_summary(const std::string& path, const SecuritySummary& summary,
                   const RunStats& stats, const SecurityAccounting& acc,
                   const RunManifest& manifest);

// Binary dumps, little-endian records.
// Pulse: u64 slot, u8 user, u8 role, u8 intensity tag, u8 phase index.
class PulseDumpWriter {
  public:
    explicit PulseDumpWriter(const std::string& path);
    void write(const PulseDescriptor& p);

  private:
    std::ofstream out_;
};

// Click: u64 slot, u8 port, u8 side.
class ClickDumpWriter {
  public:
    explicit ClickDumpWriter(const std::string& path);
    void write(const ClickRecord& c);

  private:
    std::ofstream out_;
};

std::vector<ClickRecord> read_click_dump(const std::string& path);

}  // namespace qcc
