#pragma once
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vph/field.hpp"
#include "vph/grid.hpp"

namespace vph {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// shortest decimal string that parses back to exactly the same double
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace detail {
inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                          (unsigned char)((v >> 16) & 0xff), (unsigned char)((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}
inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}
inline void put_f64(std::ostream& os, double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((u >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}
inline double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= std::uint64_t(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}
} // namespace detail

// VPF1 snapshot: magic 'V','P','F','1'; u32 n, N_x, N_v; f64 L_x, L_v, time;
// then N_x^n * N_v^n f64 values, row-major x-major, all little-endian.
inline void write_vpf1(const std::string& path, const DistributionField& f, double time) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for write: " + path);
    os.write("VPF1", 4);
    detail::put_u32(os, std::uint32_t(f.grid.dim()));
    detail::put_u32(os, std::uint32_t(f.grid.nx()));
    detail::put_u32(os, std::uint32_t(f.grid.nv()));
    detail::put_f64(os, f.grid.lx());
    detail::put_f64(os, f.grid.lv());
    detail::put_f64(os, time);
    for (double v : f.values) detail::put_f64(os, v);
    if (!os) throw IoError("write failed: " + path);
}

inline DistributionField read_vpf1(const std::string& path, double* time_out = nullptr,
                                   std::size_t mem_cap = PhaseGrid::default_mem_cap()) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for read: " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "VPF1", 4) != 0) throw IoError("bad VPF1 magic: " + path);
    const int n = int(detail::get_u32(is));
    const int nx = int(detail::get_u32(is));
    const int nv = int(detail::get_u32(is));
    const double lx = detail::get_f64(is);
    const double lv = detail::get_f64(is);
    const double time = detail::get_f64(is);
    PhaseGrid grid(n, nx, nv, lx, lv, mem_cap);
    DistributionField f(grid);
    for (double& v : f.values) v = detail::get_f64(is);
    if (!is) throw IoError("truncated VPF1 payload: " + path);
    if (time_out) *time_out = time;
    return f;
}

// diagnostics CSV: header pinned to the external interface
inline void write_diagnostics_csv(const std::string& path, const DiagnosticsSeries& d) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for write: " + path);
    os << "t,l1,l2,hs,Q,F,R,rho_hs14,gradU_inf\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        os << format_double(d.t[i]) << ',' << format_double(d.l1[i]) << ','
           << format_double(d.l2[i]) << ',' << format_double(d.hs[i]) << ','
           << format_double(d.q[i]) << ',' << format_double(d.f_bound[i]) << ','
           << format_double(d.r_bound[i]) << ',' << format_double(d.rho_hs14[i]) << ','
           << format_double(d.gradu_inf[i]) << '\n';
    }
}

} // namespace vph
