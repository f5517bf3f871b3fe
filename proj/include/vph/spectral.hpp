#pragma once
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vph/fft.hpp"
#include "vph/field.hpp"
#include "vph/grid.hpp"

// Discrete Fourier transforms in x, v and (x,v), with the unitary 1/sqrt(N)
// convention per axis so Plancherel is an identity. Spectral coefficients are
// plain DFT coefficients; all multipliers are functions of the signed
// frequency tables xi, mu.

namespace vph {

struct SobolevExponent {
    double s = 0.0;
    SobolevExponent(double v = 0.0) : s(v) {
        if (!std::isfinite(v) || v < 0)
            throw std::invalid_argument("Sobolev exponent must be finite and >= 0");
    }
};

namespace detail {

inline std::vector<int> rep_dims(int extent, int n) { return std::vector<int>(n, extent); }

inline void scale(std::vector<cplx>& a, double c) {
    for (auto& z : a) z *= c;
}

// per-linear-index |xi|^2 and |mu|^2 tables
inline std::vector<double> xi_norm2_table(const PhaseGrid& g) {
    std::vector<double> t(g.nxn());
    int idx[3] = {0, 0, 0};
    std::size_t lin = 0;
    do { t[lin++] = g.xi_norm2(idx); } while (next_index(idx, g.dim(), g.nx()));
    return t;
}
inline std::vector<double> mu_norm2_table(const PhaseGrid& g) {
    std::vector<double> t(g.nvn());
    int idx[3] = {0, 0, 0};
    std::size_t lin = 0;
    do { t[lin++] = g.mu_norm2(idx); } while (next_index(idx, g.dim(), g.nv()));
    return t;
}

} // namespace detail

// ---- transforms on the phase-space field ----

inline void forward_xv_inplace(std::vector<cplx>& buf, const PhaseGrid& g) {
    std::vector<int> dims = detail::rep_dims(g.nx(), g.dim());
    for (int a = 0; a < g.dim(); ++a) dims.push_back(g.nv());
    FftEngine::instance().dft_all(buf.data(), dims, FFTW_FORWARD);
    detail::scale(buf, 1.0 / std::sqrt(double(g.size())));
}

inline void inverse_xv_inplace(std::vector<cplx>& buf, const PhaseGrid& g) {
    std::vector<int> dims = detail::rep_dims(g.nx(), g.dim());
    for (int a = 0; a < g.dim(); ++a) dims.push_back(g.nv());
    FftEngine::instance().dft_all(buf.data(), dims, FFTW_BACKWARD);
    detail::scale(buf, 1.0 / std::sqrt(double(g.size())));
}

inline SpectralField transform_xv(const DistributionField& f) {
    SpectralField out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = f.values[i];
    forward_xv_inplace(out.values, f.grid);
    return out;
}

inline DistributionField inverse_xv(const SpectralField& fh) {
    std::vector<cplx> buf = fh.values;
    inverse_xv_inplace(buf, fh.grid);
    DistributionField out(fh.grid);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

// x-axes only (batched over v); data stays complex
inline void forward_x_inplace(std::vector<cplx>& buf, const PhaseGrid& g) {
    FftEngine::instance().dft_leading(buf.data(), detail::rep_dims(g.nx(), g.dim()), g.nvn(),
                                      FFTW_FORWARD);
    detail::scale(buf, 1.0 / std::sqrt(double(g.nxn())));
}
inline void inverse_x_inplace(std::vector<cplx>& buf, const PhaseGrid& g) {
    FftEngine::instance().dft_leading(buf.data(), detail::rep_dims(g.nx(), g.dim()), g.nvn(),
                                      FFTW_BACKWARD);
    detail::scale(buf, 1.0 / std::sqrt(double(g.nxn())));
}
inline void forward_v_inplace(std::vector<cplx>& buf, const PhaseGrid& g) {
    FftEngine::instance().dft_trailing(buf.data(), g.nxn(), detail::rep_dims(g.nv(), g.dim()),
                                       FFTW_FORWARD);
    detail::scale(buf, 1.0 / std::sqrt(double(g.nvn())));
}
inline void inverse_v_inplace(std::vector<cplx>& buf, const PhaseGrid& g) {
    FftEngine::instance().dft_trailing(buf.data(), g.nxn(), detail::rep_dims(g.nv(), g.dim()),
                                       FFTW_BACKWARD);
    detail::scale(buf, 1.0 / std::sqrt(double(g.nvn())));
}

// ---- transforms on x-only fields ----

inline XSpectralField transform_x(const XField& f) {
    XSpectralField out(f.grid);
    for (std::size_t i = 0; i < f.values.size(); ++i) out.values[i] = f.values[i];
    FftEngine::instance().dft_all(out.values.data(), detail::rep_dims(f.grid.nx(), f.grid.dim()),
                                  FFTW_FORWARD);
    detail::scale(out.values, 1.0 / std::sqrt(double(f.grid.nxn())));
    return out;
}

inline XField inverse_x(const XSpectralField& fh) {
    std::vector<cplx> buf = fh.values;
    FftEngine::instance().dft_all(buf.data(), detail::rep_dims(fh.grid.nx(), fh.grid.dim()),
                                  FFTW_BACKWARD);
    detail::scale(buf, 1.0 / std::sqrt(double(fh.grid.nxn())));
    XField out(fh.grid);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

// ---- norms ----

// discrete L^p with cell-volume weights; p may be infinity
inline double lp_norm(const std::vector<double>& vals, double cell, double p) {
    if (std::isinf(p)) {
        double m = 0;
        for (double v : vals) m = std::max(m, std::fabs(v));
        return m;
    }
    double s = 0;
    for (double v : vals) s += std::pow(std::fabs(v), p);
    return std::pow(s * cell, 1.0 / p);
}

inline double lp_norm(const DistributionField& f, double p) {
    return lp_norm(f.values, f.grid.cell_x() * f.grid.cell_v(), p);
}
inline double lp_norm(const XField& f, double p) {
    return lp_norm(f.values, f.grid.cell_x(), p);
}

inline double l2_norm(const DistributionField& f) { return lp_norm(f, 2.0); }
inline double l1_norm(const DistributionField& f) { return lp_norm(f, 1.0); }

// H^s over (x,v) from the spectrum: sum (1+|xi|^2+|mu|^2)^s |fh|^2 dx^n dv^n.
// Negative s is allowed (used for the H^{-1} Lipschitz diagnostics).
inline double sobolev_norm_spectrum(const SpectralField& fh, double s) {
    const PhaseGrid& g = fh.grid;
    auto xin = detail::xi_norm2_table(g);
    auto mun = detail::mu_norm2_table(g);
    double acc = 0;
    for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
        const cplx* row = fh.values.data() + kx * g.nvn();
        const double xr = xin[kx];
        for (std::size_t kv = 0; kv < g.nvn(); ++kv) {
            acc += std::pow(1.0 + xr + mun[kv], s) * std::norm(row[kv]);
        }
    }
    return std::sqrt(acc * g.cell_x() * g.cell_v());
}

inline double hs_norm(const DistributionField& f, SobolevExponent s) {
    return sobolev_norm_spectrum(transform_xv(f), s.s);
}

// H^s over x only
inline double sobolev_norm_x_spectrum(const XSpectralField& rh, double s) {
    const PhaseGrid& g = rh.grid;
    auto xin = detail::xi_norm2_table(g);
    double acc = 0;
    for (std::size_t kx = 0; kx < g.nxn(); ++kx)
        acc += std::pow(1.0 + xin[kx], s) * std::norm(rh.values[kx]);
    return std::sqrt(acc * g.cell_x());
}

inline double hs_norm_x(const XField& f, double s) {
    return sobolev_norm_x_spectrum(transform_x(f), s);
}

// ---- fractional derivative |xi|^s in x (Lambda^s_x) ----

namespace detail {
inline double abs_pow(double r2, double s) {
    if (s == 0.0) return 1.0;            // Lambda^0 = identity
    if (r2 == 0.0) return 0.0;
    return std::pow(r2, 0.5 * s);
}
} // namespace detail

inline DistributionField frac_deriv_x(const DistributionField& f, double s) {
    const PhaseGrid& g = f.grid;
    std::vector<cplx> buf(f.values.begin(), f.values.end());
    forward_x_inplace(buf, g);
    auto xin = detail::xi_norm2_table(g);
    for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
        const double m = detail::abs_pow(xin[kx], s);
        cplx* row = buf.data() + kx * g.nvn();
        for (std::size_t kv = 0; kv < g.nvn(); ++kv) row[kv] *= m;
    }
    inverse_x_inplace(buf, g);
    DistributionField out(g);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

inline XField frac_deriv_x(const XField& f, double s) {
    XSpectralField fh = transform_x(f);
    auto xin = detail::xi_norm2_table(f.grid);
    for (std::size_t kx = 0; kx < f.grid.nxn(); ++kx)
        fh.values[kx] *= detail::abs_pow(xin[kx], s);
    return inverse_x(fh);
}

// spectral partial derivative d/dx_c of an x-field
inline XField deriv_x(const XField& f, int axis) {
    const PhaseGrid& g = f.grid;
    XSpectralField fh = transform_x(f);
    int idx[3];
    for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
        g.decode(kx, g.nx(), idx);
        fh.values[kx] *= cplx(0.0, g.xi(idx[axis]));
    }
    return inverse_x(fh);
}

// ---- Kato-Ponce product check ----
// returns ||Lambda^s(hg)||_r / (||h||_p1 ||Lambda^s g||_q1 + ||Lambda^s h||_p2 ||g||_q2)

inline double kato_ponce_check(const XField& h, const XField& g, double s, double p1, double q1,
                               double p2, double q2) {
    auto inv = [](double p) { return std::isinf(p) ? 0.0 : 1.0 / p; };
    const double r1 = inv(p1) + inv(q1), r2 = inv(p2) + inv(q2);
    if (std::fabs(r1 - r2) > 1e-12)
        throw std::invalid_argument("kato_ponce_check: 1/p1+1/q1 must equal 1/p2+1/q2");
    const double r = r1 == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / r1;

    XField prod(h.grid);
    for (std::size_t i = 0; i < prod.values.size(); ++i)
        prod.values[i] = h.values[i] * g.values[i];

    const double lhs = lp_norm(frac_deriv_x(prod, s), r);
    const double rhs = lp_norm(h, p1) * lp_norm(frac_deriv_x(g, s), q1) +
                       lp_norm(frac_deriv_x(h, s), p2) * lp_norm(g, q2);
    if (rhs == 0.0) return 0.0;  // then lhs vanishes too
    return lhs / rhs;
}

// ---- trigonometric point evaluation (used by the flow-map module) ----

// Evaluate the trig interpolant of an x-grid spectrum at physical point y.
// Positions are converted to grid units u = (y+L)/dx; signed frequencies make
// the result the natural band-limited interpolant of the real samples.
inline double eval_x_spectrum(const XSpectralField& fh, const double* y) {
    const PhaseGrid& g = fh.grid;
    const int n = g.dim(), nx = g.nx();
    const double two_pi = 2.0 * PhaseGrid::pi();
    double u[3];
    for (int a = 0; a < n; ++a) u[a] = (y[a] + g.lx()) / g.dx();
    // per-axis phase tables
    std::vector<cplx> ph(std::size_t(n) * nx);
    for (int a = 0; a < n; ++a)
        for (int k = 0; k < nx; ++k) {
            double ang = two_pi * PhaseGrid::signed_index(k, nx) * u[a] / nx;
            ph[std::size_t(a) * nx + k] = cplx(std::cos(ang), std::sin(ang));
        }
    cplx acc{};
    int idx[3];
    for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
        g.decode(kx, nx, idx);
        cplx w = fh.values[kx];
        for (int a = 0; a < n; ++a) w *= ph[std::size_t(a) * nx + idx[a]];
        acc += w;
    }
    return acc.real() / std::sqrt(double(g.nxn()));
}

// Evaluate the phase-space trig interpolant at (y_x, y_v).
inline double eval_xv_spectrum(const SpectralField& fh, const double* yx, const double* yv) {
    const PhaseGrid& g = fh.grid;
    const int n = g.dim(), nx = g.nx(), nv = g.nv();
    const double two_pi = 2.0 * PhaseGrid::pi();
    std::vector<cplx> phx(std::size_t(n) * nx), phv(std::size_t(n) * nv);
    for (int a = 0; a < n; ++a) {
        const double ux = (yx[a] + g.lx()) / g.dx();
        for (int k = 0; k < nx; ++k) {
            double ang = two_pi * PhaseGrid::signed_index(k, nx) * ux / nx;
            phx[std::size_t(a) * nx + k] = cplx(std::cos(ang), std::sin(ang));
        }
        const double uv = (yv[a] + g.lv()) / g.dv();
        for (int k = 0; k < nv; ++k) {
            double ang = two_pi * PhaseGrid::signed_index(k, nv) * uv / nv;
            phv[std::size_t(a) * nv + k] = cplx(std::cos(ang), std::sin(ang));
        }
    }
    cplx acc{};
    int ix[3], iv[3];
    for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
        g.decode(kx, nx, ix);
        cplx wx = 1.0;
        for (int a = 0; a < n; ++a) wx *= phx[std::size_t(a) * nx + ix[a]];
        const cplx* row = fh.values.data() + kx * g.nvn();
        cplx inner{};
        for (std::size_t kv = 0; kv < g.nvn(); ++kv) {
            g.decode(kv, nv, iv);
            cplx wv = row[kv];
            for (int a = 0; a < n; ++a) wv *= phv[std::size_t(a) * nv + iv[a]];
            inner += wv;
        }
        acc += wx * inner;
    }
    return acc.real() / std::sqrt(double(g.size()));
}

} // namespace vph
