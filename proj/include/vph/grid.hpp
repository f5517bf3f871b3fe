#pragma once
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace vph {

struct GridError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Periodic phase-space box [-L_x,L_x)^n x [-L_v,L_v)^n, N points per axis,
// x-major row-major layout: index = xlin * Nv^n + vlin.
class PhaseGrid {
  public:
    PhaseGrid() = default;

    PhaseGrid(int n, int nx, int nv, double lx, double lv,
              std::size_t mem_cap_bytes = default_mem_cap()) {
        if (n < 1 || n > 3)
            throw GridError("dimension n must be 1, 2, or 3 (got " + std::to_string(n) + ")");
        if (nx < 4 || !is_pow2(nx))
            throw GridError("N_x must be a power of two >= 4 (got " + std::to_string(nx) + ")");
        if (nv < 4 || !is_pow2(nv))
            throw GridError("N_v must be a power of two >= 4 (got " + std::to_string(nv) + ")");
        if (!(lx > 0.0) || !(lv > 0.0))
            throw GridError("box half-widths must be positive");
        n_ = n;
        nx_ = nx;
        nv_ = nv;
        lx_ = lx;
        lv_ = lv;
        dx_ = 2.0 * lx / nx;
        dv_ = 2.0 * lv / nv;
        nxn_ = ipow(nx, n);
        nvn_ = ipow(nv, n);
        const std::size_t bytes = field_bytes();
        if (bytes > mem_cap_bytes)
            throw GridError("field storage " + std::to_string(bytes) +
                            " bytes exceeds memory cap " + std::to_string(mem_cap_bytes));
        xi_.resize(nx);
        for (int j = 0; j < nx; ++j) xi_[j] = pi() * signed_index(j, nx) / lx;
        mu_.resize(nv);
        for (int k = 0; k < nv; ++k) mu_[k] = pi() * signed_index(k, nv) / lv;
        xpts_.resize(nx);
        for (int j = 0; j < nx; ++j) xpts_[j] = -lx + j * dx_;
        vpts_.resize(nv);
        for (int k = 0; k < nv; ++k) vpts_[k] = -lv + k * dv_;
    }

    static constexpr std::size_t default_mem_cap() { return std::size_t(1) << 31; }

    static double pi() { return 3.14159265358979323846; }

    // DFT index -> signed frequency index, 0 -> 0
    static int signed_index(int j, int n) { return j < n / 2 ? j : j - n; }

    int dim() const { return n_; }
    int nx() const { return nx_; }
    int nv() const { return nv_; }
    double lx() const { return lx_; }
    double lv() const { return lv_; }
    double dx() const { return dx_; }
    double dv() const { return dv_; }
    std::size_t nxn() const { return nxn_; }  // points in the x-box
    std::size_t nvn() const { return nvn_; }  // points in the v-box
    std::size_t size() const { return nxn_ * nvn_; }
    std::size_t field_bytes() const { return size() * sizeof(double); }
    double cell_x() const { return ipowd(dx_, n_); }  // dx^n
    double cell_v() const { return ipowd(dv_, n_); }  // dv^n

    double xi(int j) const { return xi_[j]; }
    double mu(int k) const { return mu_[k]; }
    double x(int j) const { return xpts_[j]; }
    double v(int k) const { return vpts_[k]; }
    const std::vector<double>& xi_table() const { return xi_; }
    const std::vector<double>& mu_table() const { return mu_; }

    // decode a linear index over an n-fold axis of extent N (row-major)
    void decode(std::size_t lin, int extent, int* out) const {
        for (int a = n_ - 1; a >= 0; --a) {
            out[a] = int(lin % extent);
            lin /= extent;
        }
    }
    std::size_t encode(const int* idx, int extent) const {
        std::size_t lin = 0;
        for (int a = 0; a < n_; ++a) lin = lin * extent + std::size_t(idx[a]);
        return lin;
    }

    double xi_norm2(const int* kx) const {
        double s = 0;
        for (int a = 0; a < n_; ++a) s += xi_[kx[a]] * xi_[kx[a]];
        return s;
    }
    double mu_norm2(const int* kv) const {
        double s = 0;
        for (int a = 0; a < n_; ++a) s += mu_[kv[a]] * mu_[kv[a]];
        return s;
    }
    double v_norm2(const int* kv) const {
        double s = 0;
        for (int a = 0; a < n_; ++a) s += vpts_[kv[a]] * vpts_[kv[a]];
        return s;
    }
    double x_norm2(const int* kx) const {
        double s = 0;
        for (int a = 0; a < n_; ++a) s += xpts_[kx[a]] * xpts_[kx[a]];
        return s;
    }

    bool operator==(const PhaseGrid& o) const {
        return n_ == o.n_ && nx_ == o.nx_ && nv_ == o.nv_ && lx_ == o.lx_ && lv_ == o.lv_;
    }

    static std::size_t ipow(int b, int e) {
        std::size_t r = 1;
        for (int i = 0; i < e; ++i) r *= std::size_t(b);
        return r;
    }
    static double ipowd(double b, int e) {
        double r = 1;
        for (int i = 0; i < e; ++i) r *= b;
        return r;
    }

  private:
    int n_ = 0, nx_ = 0, nv_ = 0;
    double lx_ = 0, lv_ = 0, dx_ = 0, dv_ = 0;
    std::size_t nxn_ = 0, nvn_ = 0;
    std::vector<double> xi_, mu_, xpts_, vpts_;
};

// Iterate all multi-indices of an n-fold axis; idx must hold n zeros initially.
inline bool next_index(int* idx, int n, int extent) {
    for (int a = n - 1; a >= 0; --a) {
        if (++idx[a] < extent) return true;
        idx[a] = 0;
    }
    return false;
}

} // namespace vph
