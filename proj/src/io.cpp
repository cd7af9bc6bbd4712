#include "qcc/io.hpp"

#include <cstring>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace qcc {

// ---- SHA-256 ----

namespace {

struct Sha256 {
    std::uint32_t h[8] = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                          0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    std::uint64_t length = 0;
    std::uint8_t buf[64];
    std::size_t buf_len = 0;

    static constexpr std::uint32_t k[64] = {
        0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4,
        0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe,
        0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f,
        0x4a7484aa, 0x5cb0a9dc, 0x76f988da, 0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7,
        0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc,
        0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
        0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070, 0x19a4c116,
        0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
        0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7,
        0xc67178f2};

    static std::uint32_t rotr(std::uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void compress(const std::uint8_t* p) {
        std::uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        for (int i = 16; i < 64; ++i) {
            const std::uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            const std::uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4], f = h[5], g = h[6],
                      hh = h[7];
        for (int i = 0; i < 64; ++i) {
            const std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            const std::uint32_t ch = (e & f) ^ (~e & g);
            const std::uint32_t t1 = hh + s1 + ch + k[i] + w[i];
            const std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            const std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            const std::uint32_t t2 = s0 + maj;
            hh = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
        h[5] += f;
        h[6] += g;
        h[7] += hh;
    }

    void update(const void* data, std::size_t len) {
        const auto* p = static_cast<const std::uint8_t*>(data);
        length += len;
        while (len > 0) {
            const std::size_t take = std::min(len, sizeof(buf) - buf_len);
            std::memcpy(buf + buf_len, p, take);
            buf_len += take;
            p += take;
            len -= take;
            if (buf_len == 64) {
                compress(buf);
                buf_len = 0;
            }
        }
    }

    std::string finish() {
        const std::uint64_t bits = length * 8;
        const std::uint8_t one = 0x80;
        update(&one, 1);
        const std::uint8_t zero = 0;
        while (buf_len != 56) update(&zero, 1);
        std::uint8_t lenbuf[8];
        for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<std::uint8_t>(bits >> (56 - 8 * i));
        update(lenbuf, 8);
        std::ostringstream os;
        for (std::uint32_t v : h) os << std::hex << std::setw(8) << std::setfill('0') << v;
        return os.str();
    }
};

constexpr std::uint32_t Sha256::k[64];

void write_le_u64(std::ofstream& out, std::uint64_t v) {
    std::uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t read_le_u64(std::istream& in) {
    std::uint8_t b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

}  // namespace

std::string sha256_hex(const void* data, std::size_t len) {
    Sha256 s;
    s.update(data, len);
    return s.finish();
}

std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file for hashing: " + path);
    Sha256 s;
    char buf[65536];
    while (in) {
        in.read(buf, sizeof(buf));
        s.update(buf, static_cast<std::size_t>(in.gcount()));
    }
    return s.finish();
}

std::string RunManifest::canonical_text() const {
    std::ostringstream os;
    os << "mode=" << mode << "\nseed=" << seed << "\n" << serialize_config(cfg);
    return os.str();
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

const char* basis_name(Basis b) {
    switch (b) {
        case Basis::Z: return "Z";
        case Basis::X: return "X";
        default: return "discard";
    }
}

std::string pattern_combo_string(const std::array<PatternCode, 3>& p) {
    return std::string(to_string(p[0])) + "+" + to_string(p[1]) + "+" + to_string(p[2]);
}

PatternCode pattern_from_string(const std::string& s) {
    for (int i = 0; i < 6; ++i) {
        const auto c = static_cast<PatternCode>(i);
        if (s == to_string(c)) return c;
    }
    throw std::runtime_error("bad pattern code in CSV: " + s);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    // Fields we emit are never quoted; reject quotes to keep the parser honest.
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

SiftedEventWriter::SiftedEventWriter(const std::string& path, const RunManifest& manifest,
                                     std::uint64_t n_quantum_slots)
    : out_(path), manifest_hash_(manifest.hash()) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << "# qcc sifted events v1\n";
    out_ << "# meta n_quantum_slots=" << n_quantum_slots << "\n";
    out_ << "p1_slot,p2_slot,p3_slot,basis,bitA,bitB,bitC,theta_total,parity,intensity_combo\n";
}

void SiftedEventWriter::write(const SiftedEvent& ev, std::optional<double> theta) {
    const TripleEvent& t = ev.triple;
    out_ << t.c1.slot << ',' << t.c2.slot << ',' << t.c3.slot << ',' << basis_name(ev.basis);
    for (int u = 0; u < 3; ++u) {
        out_ << ',';
        if (ev.z_bit[u] >= 0) out_ << ev.z_bit[u];
    }
    out_ << ',';
    if (theta) out_ << fmt_double(*theta);
    out_ << ',' << (ev.parity_even ? 0 : 1) << ',' << pattern_combo_string(ev.pattern) << '\n';
}

void SiftedEventWriter::close() {
    if (closed_) return;
    out_ << "# manifest_sha256=" << manifest_hash_ << "\n";
    out_.close();
    if (!out_) throw std::runtime_error("sifted event CSV write failed");
    closed_ = true;
}

SiftedEventWriter::~SiftedEventWriter() {
    try {
        close();
    } catch (...) {
    }
}

SiftedCsv read_sifted_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sifted CSV: " + path);
    SiftedCsv csv;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string meta = "# meta n_quantum_slots=";
            if (line.rfind(meta, 0) == 0) csv.n_quantum_slots = std::stoull(line.substr(meta.size()));
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // column header
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 10) throw std::runtime_error("bad sifted CSV row: " + line);
        SiftedCsv::Row row{};
        row.p1_slot = std::stoull(f[0]);
        row.p2_slot = std::stoull(f[1]);
        row.p3_slot = std::stoull(f[2]);
        row.basis = f[3] == "Z" ? Basis::Z : (f[3] == "X" ? Basis::X : Basis::Discard);
        for (int u = 0; u < 3; ++u) row.z_bit[u] = f[4 + u].empty() ? -1 : std::stoi(f[4 + u]);
        if (!f[7].empty()) row.theta = std::stod(f[7]);
        row.parity_even = f[8] == "0";
        const auto plus1 = f[9].find('+');
        const auto plus2 = f[9].find('+', plus1 + 1);
        if (plus1 == std::string::npos || plus2 == std::string::npos)
            throw std::runtime_error("bad intensity combo: " + f[9]);
        row.pattern[0] = pattern_from_string(f[9].substr(0, plus1));
        row.pattern[1] = pattern_from_string(f[9].substr(plus1 + 1, plus2 - plus1 - 1));
        row.pattern[2] = pattern_from_string(f[9].substr(plus2 + 1));
        csv.rows.push_back(row);
    }
    if (csv.n_quantum_slots == 0)
        throw std::runtime_error("sifted CSV missing n_quantum_slots meta line");
    return csv;
}

SecurityAccounting accounting_from_csv(const SiftedCsv& csv, const SignConvention&) {
    SecurityAccounting acc;
    acc.n_quantum_slots = csv.n_quantum_slots;
    for (const auto& row : csv.rows) {
        SiftedEvent ev;
        ev.pattern = row.pattern;
        ev.z_bit = row.z_bit;
        ev.basis = row.basis;
        ev.parity_even = row.parity_even;
        if (ev.z_gain_eligible()) {
            acc.z_gain_count[ev.z_combo()] += 1.0;
            if (row.basis == Basis::Z && ev.z_combo() == kComboMuMuMu) {
                acc.s_z_mu3 += 1.0;
                acc.err_ab += row.z_bit[1] == row.z_bit[0];
                acc.err_ac += row.z_bit[2] == row.z_bit[0];
            }
        }
        if (ev.x_gain_eligible() && row.theta) {
            // theta_total already carries the sign convention of the run.
            if (const auto expected = slice_expected_even(*row.theta)) {
                const int xc = ev.x_combo();
                acc.x_kept_count[xc] += 1.0;
                if (*expected != row.parity_even) acc.x_error_count[xc] += 1.0;
            }
        }
    }
    return acc;
}

PhaseLogWriter::PhaseLogWriter(const std::string& path, const RunManifest& manifest)
    : out_(path), manifest_hash_(manifest.hash()) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    out_ << "interval,port,theta_hat,n_R,n_L,flag\n";
}

void PhaseLogWriter::write(std::uint64_t interval, int port, const PhaseEstimate& est,
                           const ReferenceCounts& counts) {
    out_ << interval << ',' << (port + 1) << ',' << (est.valid ? fmt_double(est.theta_hat) : "")
         << ',' << fmt_double(counts.n_r) << ',' << fmt_double(counts.n_l) << ','
         << (est.sign_flagged ? 1 : 0) << '\n';
}

void PhaseLogWriter::close() {
    if (closed_) return;
    out_ << "# manifest_sha256=" << manifest_hash_ << "\n";
    out_.close();
    if (!out_) throw std::runtime_error("phase log write failed");
    closed_ = true;
}

PhaseLogWriter::~PhaseLogWriter() {
    try {
        close();
    } catch (...) {
    }
}

void write_sweep_csv(const std::string& path, const std::vector<AnalyticPoint>& points,
                     const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "total_loss_db,eta_total,rate_per_pulse,rate_bits_per_s,bound_per_pulse,"
           "s111_lower,e111ph_upper,z_error,x_error\n";
    for (const auto& p : points) {
        out << fmt_double(p.total_loss_db) << ',' << fmt_double(p.eta_total) << ','
            << fmt_double(p.rate_per_pulse) << ',' << fmt_double(p.rate_bits_per_s) << ','
            << fmt_double(p.bound_per_pulse) << ',' << fmt_double(p.s111_lower) << ','
            << fmt_double(p.e111ph_upper) << ',' << fmt_double(p.z_error) << ','
            << fmt_double(p.x_error) << '\n';
    }
    out << "# manifest_sha256=" << manifest.hash() << "\n";
    if (!out) throw std::runtime_error("sweep CSV write failed");
}

void write_summary(const std::string& path, const SecuritySummary& summary, const RunStats& stats,
                   const SecurityAccounting& acc, const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(12);
    out << "n_frames = " << stats.n_frames << "\n";
    out << "n_slots = " << stats.n_slots << "\n";
    out << "n_quantum_slots = " << acc.n_quantum_slots << "\n";
    for (int p = 0; p < 3; ++p)
        out << "clicks_port" << (p + 1) << " = " << stats.clicks[p] << "\n";
    for (int p = 0; p < 3; ++p)
        out << "paired_port" << (p + 1) << " = " << stats.paired[p] << "\n";
    out << "triples = " << stats.triples << "\n";
    out << "s_z_mu3 = " << acc.s_z_mu3 << "\n";
    out << "z_error_ab = " << summary.z_error_ab << "\n";
    out << "z_error_ac = " << summary.z_error_ac << "\n";
    out << "x_kept = " << acc.x_kept_count[kComboNuNuNu] << "\n";
    out << "x_error = " << summary.x_error << "\n";
    out << "s111_lower = " << summary.decoy.s111_lower << "\n";
    out << "e111ph_upper = " << summary.decoy.e111ph_upper << "\n";
    out << "key_bits = " << summary.key_bits << "\n";
    out << "rate_per_pulse = " << summary.rate.per_pulse << "\n";
    out << "rate_bits_per_s = " << summary.rate.per_second << "\n";
    out << "# manifest_sha256=" << manifest.hash() << "\n";
    if (!out) throw std::runtime_error("summary write failed");
}

PulseDumpWriter::PulseDumpWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void PulseDumpWriter::write(const PulseDescriptor& p) {
    write_le_u64(out_, p.slot);
    const std::uint8_t rest[4] = {static_cast<std::uint8_t>(p.user),
                                  static_cast<std::uint8_t>(p.role),
                                  static_cast<std::uint8_t>(p.intensity), p.phase.n};
    out_.write(reinterpret_cast<const char*>(rest), 4);
}

ClickDumpWriter::ClickDumpWriter(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void ClickDumpWriter::write(const ClickRecord& c) {
    write_le_u64(out_, c.slot);
    const std::uint8_t rest[2] = {static_cast<std::uint8_t>(c.port),
                                  static_cast<std::uint8_t>(c.side)};
    out_.write(reinterpret_cast<const char*>(rest), 2);
}

std::vector<ClickRecord> read_click_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open click dump: " + path);
    std::vector<ClickRecord> out;
    while (true) {
        const std::uint64_t slot = read_le_u64(in);
        std::uint8_t rest[2];
        in.read(reinterpret_cast<char*>(rest), 2);
        if (!in) break;
        out.push_back({static_cast<PortId>(rest[0]), slot, static_cast<DetectorSide>(rest[1])});
    }
    return out;
}

}  // namespace qcc
