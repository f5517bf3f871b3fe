#pragma once
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "vph/fft.hpp"
#include "vph/field.hpp"
#include "vph/grid.hpp"
#include "vph/rng.hpp"
#include "vph/spectral.hpp"

// Executable velocity-averaging machinery: both sides of the inequality
//   || int h dv ||_{L^2_t H^{1/4}_x} <= C (1+Q)^{n/2} (||h|| + ||g||)
// for pairs satisfying d_t h + v.grad_x h = div_v g, plus the cutoff
// decomposition I1/I2 of the proof, mode by mode.

namespace vph {

// Even cutoff: zeta(z) = 1 for |z|<=1, 0 for |z|>=2, quintic smoothstep in
// between; max |zeta'| = 15/8.
struct CutoffZeta {
    static double smoothstep(double u) { return ((6.0 * u - 15.0) * u + 10.0) * u * u * u; }
    static double smoothstep_deriv(double u) {
        double a = u * (1.0 - u);
        return 30.0 * a * a;
    }
    static double value(double z) {
        double a = std::fabs(z);
        if (a <= 1.0) return 1.0;
        if (a >= 2.0) return 0.0;
        return 1.0 - smoothstep(a - 1.0);
    }
    static double deriv(double z) {
        double a = std::fabs(z);
        if (a <= 1.0 || a >= 2.0) return 0.0;
        double d = -smoothstep_deriv(a - 1.0);
        return z < 0 ? -d : d;
    }
};

// Space-time-velocity pair (h, g) sampled at t_i = i*dt over a time circle of
// m_total samples. Pairs built from [0,T] data carry m_live < m_total samples
// and are zero on the padding (the zero-extension device); fully spectral
// manufactured pairs live on the whole circle (m_live == m_total).
struct KineticPair {
    PhaseGrid grid;
    int m_live = 0;
    int m_total = 0;
    double dt = 0;
    double q = 0;  // velocity support radius of h
    std::vector<double> h;               // [t][x][v]
    std::vector<std::vector<double>> g;  // n components, same layout

    double t_live() const { return m_live * dt; }
    double t_circle() const { return m_total * dt; }
    std::size_t slab() const { return grid.size(); }

    double tau(int r) const {
        return 2.0 * PhaseGrid::pi() * PhaseGrid::signed_index(r, m_total) / t_circle();
    }

    void allocate() {
        h.assign(std::size_t(m_total) * slab(), 0.0);
        g.assign(grid.dim(), std::vector<double>(std::size_t(m_total) * slab(), 0.0));
    }
};

// rho_h(t,x) = sum_k h(t,x,v_k) dv^n
inline std::vector<double> velocity_average(const KineticPair& p) {
    const std::size_t nxn = p.grid.nxn(), nvn = p.grid.nvn();
    std::vector<double> rho(std::size_t(p.m_total) * nxn, 0.0);
    const double w = p.grid.cell_v();
    for (int t = 0; t < p.m_total; ++t)
        for (std::size_t x = 0; x < nxn; ++x) {
            const double* row = p.h.data() + (std::size_t(t) * nxn + x) * nvn;
            double acc = 0;
            for (std::size_t k = 0; k < nvn; ++k) acc += row[k];
            rho[std::size_t(t) * nxn + x] = acc * w;
        }
    return rho;
}

namespace detail {
// unitary DFT over (t, x-axes), batched over a trailing extent
inline void tx_transform(std::vector<cplx>& buf, const KineticPair& p, std::size_t trailing,
                         int sign) {
    std::vector<int> dims{p.m_total};
    for (int a = 0; a < p.grid.dim(); ++a) dims.push_back(p.grid.nx());
    FftEngine::instance().dft_leading(buf.data(), dims, trailing, sign);
    const double s = 1.0 / std::sqrt(double(p.m_total) * double(p.grid.nxn()));
    for (auto& z : buf) z *= s;
}
} // namespace detail

// || rho_h ||_{L^2_t H^{1/4}_x} over the padded circle
inline double averaging_lhs(const KineticPair& p) {
    std::vector<double> rho = velocity_average(p);
    std::vector<cplx> buf(rho.begin(), rho.end());
    detail::tx_transform(buf, p, 1, FFTW_FORWARD);
    auto xin = detail::xi_norm2_table(p.grid);
    double acc = 0;
    for (int r = 0; r < p.m_total; ++r)
        for (std::size_t kx = 0; kx < p.grid.nxn(); ++kx)
            acc += std::pow(1.0 + xin[kx], 0.25) *
                   std::norm(buf[std::size_t(r) * p.grid.nxn() + kx]);
    return std::sqrt(acc * p.dt * p.grid.cell_x());
}

// (1+Q)^{n/2} (||h||_{L^2_{t,x,v}} + ||g||_{L^2_{t,x,v}}); the constant C is
// reported by calibration, never baked in
inline double averaging_rhs(const KineticPair& p) {
    const double w = p.dt * p.grid.cell_x() * p.grid.cell_v();
    double hn = 0, gn = 0;
    for (double v : p.h) hn += v * v;
    for (const auto& comp : p.g)
        for (double v : comp) gn += v * v;
    return std::pow(1.0 + p.q, 0.5 * p.grid.dim()) * (std::sqrt(hn * w) + std::sqrt(gn * w));
}

// h, g transformed in (t,x); v stays physical
struct TransformedPair {
    const KineticPair* src = nullptr;
    std::vector<cplx> hh;
    std::vector<std::vector<cplx>> gh;

    explicit TransformedPair(const KineticPair& p) : src(&p) {
        hh.assign(p.h.begin(), p.h.end());
        detail::tx_transform(hh, p, p.grid.nvn(), FFTW_FORWARD);
        gh.resize(p.grid.dim());
        for (int c = 0; c < p.grid.dim(); ++c) {
            gh[c].assign(p.g[c].begin(), p.g[c].end());
            detail::tx_transform(gh[c], p, p.grid.nvn(), FFTW_FORWARD);
        }
    }

    const cplx* h_slice(int r, std::size_t kx) const {
        return hh.data() + (std::size_t(r) * src->grid.nxn() + kx) * src->grid.nvn();
    }
    const cplx* g_slice(int c, int r, std::size_t kx) const {
        return gh[c].data() + (std::size_t(r) * src->grid.nxn() + kx) * src->grid.nvn();
    }
};

struct ModeSplit {
    cplx i1{};
    cplx i2{};
    cplx average{};  // sum_v h^ dv^n, the decomposition target
};

// I1/I2 split at mode (tau_r, xi_k); requires |xi| >= 1 (below it the paper's
// split is undefined and low modes go through the plain L^2 bound).
inline ModeSplit mode_decomposition(const TransformedPair& tp, int r, std::size_t kx) {
    const KineticPair& p = *tp.src;
    const PhaseGrid& g = p.grid;
    int kidx[3];
    g.decode(kx, g.nx(), kidx);
    double xi[3];
    double xi2 = 0;
    for (int a = 0; a < g.dim(); ++a) {
        xi[a] = g.xi(kidx[a]);
        xi2 += xi[a] * xi[a];
    }
    const double xi_abs = std::sqrt(xi2);
    if (xi_abs < 1.0)
        throw std::invalid_argument("mode_decomposition requires |xi| >= 1");
    const double root = std::sqrt(xi_abs);
    const double tau = p.tau(r);
    const double cellv = g.cell_v();

    const cplx* hrow = tp.h_slice(r, kx);
    ModeSplit out;
    int vidx[3];
    for (std::size_t kv = 0; kv < g.nvn(); ++kv) {
        g.decode(kv, g.nv(), vidx);
        double phi = tau;
        for (int a = 0; a < g.dim(); ++a) phi += xi[a] * g.v(vidx[a]);
        const double z = phi / root;
        out.average += hrow[kv] * cellv;
        out.i1 += hrow[kv] * (CutoffZeta::value(z) * cellv);
        if (std::fabs(z) <= 1.0) continue;  // W vanishes on the plateau
        // dW/dphi for W = (i/phi)(1 - zeta(phi/root))
        const double one_m = 1.0 - CutoffZeta::value(z);
        const double dwd_im = -(one_m / (phi * phi) + CutoffZeta::deriv(z) / (phi * root));
        for (int a = 0; a < g.dim(); ++a) {
            const cplx gv = tp.g_slice(a, r, kx)[kv];
            out.i2 += gv * cplx(0.0, xi[a] * dwd_im) * cellv;
        }
    }
    return out;
}

// |I1| |xi|^{1/4} / (Q^{(n-1)/2} ||h^(tau,xi,.)||_{L^2_v}); 0 when the
// denominator vanishes (then I1 = 0 by Cauchy-Schwarz)
inline double i1_bound_check(const TransformedPair& tp, int r, std::size_t kx, double q) {
    const KineticPair& p = *tp.src;
    const PhaseGrid& g = p.grid;
    if (!(q > 0)) throw std::invalid_argument("i1_bound_check requires Q > 0");
    int kidx[3];
    g.decode(kx, g.nx(), kidx);
    const double xi_abs = std::sqrt(g.xi_norm2(kidx));
    if (xi_abs < 1.0)
        throw std::invalid_argument("i1_bound_check requires |xi| >= 1");
    const cplx* hrow = tp.h_slice(r, kx);
    double l2v = 0;
    for (std::size_t kv = 0; kv < g.nvn(); ++kv) l2v += std::norm(hrow[kv]);
    l2v = std::sqrt(l2v * g.cell_v());
    if (l2v == 0.0) return 0.0;
    const ModeSplit ms = mode_decomposition(tp, r, kx);
    return std::abs(ms.i1) * std::pow(xi_abs, 0.25) /
           (std::pow(q, 0.5 * (g.dim() - 1)) * l2v);
}

// max over modes with |xi| >= 1 of |I1 + I2 - sum_v h^ dv|
inline double decomposition_residual(const TransformedPair& tp) {
    const KineticPair& p = *tp.src;
    const PhaseGrid& g = p.grid;
    double worst = 0;
    int kidx[3];
    for (int r = 0; r < p.m_total; ++r)
        for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
            g.decode(kx, g.nx(), kidx);
            if (std::sqrt(g.xi_norm2(kidx)) < 1.0) continue;
            ModeSplit ms = mode_decomposition(tp, r, kx);
            worst = std::max(worst, std::abs(ms.i1 + ms.i2 - ms.average));
        }
    return worst;
}

// Smooth time window for zero-extended pairs: w in C^inf, supported in
// (0, T_live), with analytic derivative. Windowing turns the zero-extension
// into a smooth function on the circle, so the spectral time symbol applies:
//   d_t(wh) + v.grad_x(wh) = div_v(wg) + w'h.
struct TimeWindow {
    static double bump(double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        return std::exp(4.0 - 1.0 / (u * (1.0 - u)));
    }
    static double bump_deriv(double u) {
        if (u <= 0.0 || u >= 1.0) return 0.0;
        const double a = u * (1.0 - u);
        return bump(u) * (1.0 - 2.0 * u) / (a * a);
    }
};

// max over (tau,xi,v) of |i(tau + xi.v) h^ - (div_v g)^ - (w'h)^|, the
// discrete transport residual. Pairs on the full circle are checked as-is;
// zero-extended pairs are windowed first (the w'h term compensates exactly).
inline double verify_transport(const KineticPair& p) {
    const PhaseGrid& g = p.grid;
    const std::size_t slab = p.slab();
    const bool windowed = p.m_live < p.m_total;
    const double t_live = p.t_live();

    std::vector<cplx> wh(p.h.begin(), p.h.end());
    std::vector<cplx> corr(wh.size(), cplx{});
    std::vector<std::vector<cplx>> wg(g.dim());
    for (int c = 0; c < g.dim(); ++c) wg[c].assign(p.g[c].begin(), p.g[c].end());

    if (windowed) {
        for (int t = 0; t < p.m_total; ++t) {
            const double u = (t * p.dt) / t_live;
            const double w = TimeWindow::bump(u);
            const double wp = TimeWindow::bump_deriv(u) / t_live;
            for (std::size_t i = 0; i < slab; ++i) {
                const std::size_t at = std::size_t(t) * slab + i;
                corr[at] = wp * p.h[at];
                wh[at] *= w;
                for (int c = 0; c < g.dim(); ++c) wg[c][at] *= w;
            }
        }
    }

    detail::tx_transform(wh, p, g.nvn(), FFTW_FORWARD);
    detail::tx_transform(corr, p, g.nvn(), FFTW_FORWARD);
    // (div_v g)^: transform g in (t,x), then spectral divergence in v
    std::vector<cplx> div(std::size_t(p.m_total) * slab, cplx{});
    {
        const std::size_t rows = std::size_t(p.m_total) * g.nxn();
        std::vector<int> vdims(g.dim(), g.nv());
        auto& eng = FftEngine::instance();
        int vidx[3];
        for (int c = 0; c < g.dim(); ++c) {
            detail::tx_transform(wg[c], p, g.nvn(), FFTW_FORWARD);
            eng.dft_trailing(wg[c].data(), rows, vdims, FFTW_FORWARD);
            for (std::size_t row = 0; row < rows; ++row) {
                cplx* s = wg[c].data() + row * g.nvn();
                for (std::size_t kv = 0; kv < g.nvn(); ++kv) {
                    g.decode(kv, g.nv(), vidx);
                    s[kv] *= cplx(0.0, g.mu(vidx[c]));
                }
            }
            eng.dft_trailing(wg[c].data(), rows, vdims, FFTW_BACKWARD);
            const double sc = 1.0 / double(g.nvn());
            for (std::size_t i = 0; i < div.size(); ++i) div[i] += wg[c][i] * sc;
        }
    }

    double worst = 0;
    int kidx[3], vidx[3];
    for (int r = 0; r < p.m_total; ++r) {
        const double tau = p.tau(r);
        for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
            g.decode(kx, g.nx(), kidx);
            double xi[3];
            for (int a = 0; a < g.dim(); ++a) xi[a] = g.xi(kidx[a]);
            const std::size_t base = (std::size_t(r) * g.nxn() + kx) * g.nvn();
            for (std::size_t kv = 0; kv < g.nvn(); ++kv) {
                g.decode(kv, g.nv(), vidx);
                double phi = tau;
                for (int a = 0; a < g.dim(); ++a) phi += xi[a] * g.v(vidx[a]);
                const cplx res = cplx(0.0, phi) * wh[base + kv] - div[base + kv] -
                                 corr[base + kv];
                worst = std::max(worst, std::abs(res));
            }
        }
    }
    return worst;
}

// ---- manufactured corpora ----

namespace detail {
// C-infinity radial bump in v, supported in |v| <= q
inline double vbump(const PhaseGrid& g, const int* vidx, double q) {
    const double u2 = g.v_norm2(vidx) / (q * q);
    if (u2 >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u2));
}
// d/dv_a of the bump
inline double vbump_deriv(const PhaseGrid& g, const int* vidx, double q, int a) {
    const double u2 = g.v_norm2(vidx) / (q * q);
    if (u2 >= 1.0) return 0.0;
    const double b = std::exp(1.0 - 1.0 / (1.0 - u2));
    const double d = 1.0 - u2;
    return b * (-2.0 * g.v(vidx[a]) / (q * q)) / (d * d);
}
} // namespace detail

// support radius of a pair's h over all samples
inline double support_radius_of(const KineticPair& p) {
    const PhaseGrid& g = p.grid;
    const std::size_t nvn = g.nvn();
    std::vector<char> live(nvn, 0);
    for (std::size_t i = 0; i < p.h.size(); ++i)
        if (p.h[i] != 0.0) live[i % nvn] = 1;
    double q2 = 0;
    int vidx[3];
    for (std::size_t kv = 0; kv < nvn; ++kv) {
        if (!live[kv]) continue;
        g.decode(kv, g.nv(), vidx);
        q2 = std::max(q2, g.v_norm2(vidx));
    }
    return std::sqrt(q2);
}

// Family A: exact analytic transport pairs built mode-by-mode on the circle.
// For g^ = phi^2 psi(v) e and h^ = -i (2 (xi.e) psi + phi e.grad psi) the
// identity i phi h^ = div_v g^ holds analytically at every v.
inline KineticPair make_spectral_pair(const PhaseGrid& grid, int m, double dt, double q,
                                      int n_modes, CounterRng& rng) {
    KineticPair p;
    p.grid = grid;
    p.m_live = m;
    p.m_total = m;
    p.dt = dt;
    p.q = q;
    p.allocate();
    const std::size_t nxn = grid.nxn(), nvn = grid.nvn();

    std::vector<cplx> hh(std::size_t(m) * nxn * nvn, cplx{});
    std::vector<std::vector<cplx>> gh(grid.dim(),
                                      std::vector<cplx>(hh.size(), cplx{}));
    int vidx[3];
    for (int mode = 0; mode < n_modes; ++mode) {
        // random (tau, xi) in a low band with |xi| >= 1, random direction e
        const int r = int(rng.next_u64() % std::uint64_t(m));
        std::size_t kx = 0;
        double xi[3], xi2 = 0;
        for (int tries = 0; tries < 64; ++tries) {
            kx = rng.next_u64() % nxn;
            int kidx[3];
            grid.decode(kx, grid.nx(), kidx);
            xi2 = 0;
            bool band = true;
            for (int a = 0; a < grid.dim(); ++a) {
                const int si = PhaseGrid::signed_index(kidx[a], grid.nx());
                band &= std::abs(si) <= 4;
                xi[a] = grid.xi(kidx[a]);
                xi2 += xi[a] * xi[a];
            }
            if (band && xi2 >= 1.0) break;
            xi2 = 0;
        }
        if (xi2 == 0.0) continue;
        double e[3] = {0, 0, 0};
        double en = 0;
        for (int a = 0; a < grid.dim(); ++a) {
            e[a] = rng.sym(1.0);
            en += e[a] * e[a];
        }
        en = std::sqrt(std::max(en, 1e-12));
        for (int a = 0; a < grid.dim(); ++a) e[a] /= en;
        const cplx amp(rng.sym(1.0), rng.sym(1.0));
        const double tau = p.tau(r);
        double xdote = 0;
        for (int a = 0; a < grid.dim(); ++a) xdote += xi[a] * e[a];

        const std::size_t base = (std::size_t(r) * nxn + kx) * nvn;
        for (std::size_t kv = 0; kv < nvn; ++kv) {
            grid.decode(kv, grid.nv(), vidx);
            const double psi = detail::vbump(grid, vidx, q);
            if (psi == 0.0) continue;
            double phi = tau;
            double edpsi = 0;
            for (int a = 0; a < grid.dim(); ++a) {
                phi += xi[a] * grid.v(vidx[a]);
                edpsi += e[a] * detail::vbump_deriv(grid, vidx, q, a);
            }
            hh[base + kv] += cplx(0.0, -1.0) * (2.0 * xdote * psi + phi * edpsi) * amp;
            for (int a = 0; a < grid.dim(); ++a)
                gh[a][base + kv] += phi * phi * psi * e[a] * amp;
        }
    }

    // enforce conjugate symmetry so the time-domain fields are real:
    // keep only the Hermitian part
    auto hermitize = [&](std::vector<cplx>& buf) {
        int kidx[3];
        for (int r = 0; r < m; ++r) {
            const int rn = r == 0 ? 0 : m - r;
            for (std::size_t kx = 0; kx < nxn; ++kx) {
                grid.decode(kx, grid.nx(), kidx);
                int nidx[3];
                for (int a = 0; a < grid.dim(); ++a)
                    nidx[a] = kidx[a] == 0 ? 0 : grid.nx() - kidx[a];
                const std::size_t kxn = grid.encode(nidx, grid.nx());
                for (std::size_t kv = 0; kv < nvn; ++kv) {
                    const std::size_t i = (std::size_t(r) * nxn + kx) * nvn + kv;
                    const std::size_t j = (std::size_t(rn) * nxn + kxn) * nvn + kv;
                    if (j < i) continue;
                    const cplx a = buf[i], b = buf[j];
                    buf[i] = 0.5 * (a + std::conj(b));
                    buf[j] = 0.5 * (b + std::conj(a));
                }
            }
        }
    };
    hermitize(hh);
    for (auto& comp : gh) hermitize(comp);

    // back to time domain
    detail::tx_transform(hh, p, nvn, FFTW_BACKWARD);
    for (std::size_t i = 0; i < hh.size(); ++i) p.h[i] = hh[i].real();
    for (int c = 0; c < grid.dim(); ++c) {
        detail::tx_transform(gh[c], p, nvn, FFTW_BACKWARD);
        for (std::size_t i = 0; i < gh[c].size(); ++i) p.g[c][i] = gh[c][i].real();
    }
    return p;
}

// Family B: pick smooth h (bump in v, random band-limited in (t,x)); project
// so sum_v phi h^ = 0 exactly; define g by the spectral v-solve of the
// divergence equation. The discrete transport identity then holds to roundoff.
inline KineticPair make_divsolve_pair(const PhaseGrid& grid, int m, double dt, double q,
                                      CounterRng& rng) {
    KineticPair p;
    p.grid = grid;
    p.m_live = m;
    p.m_total = m;
    p.dt = dt;
    p.q = q;
    p.allocate();
    const std::size_t nxn = grid.nxn(), nvn = grid.nvn();

    // random low-band h^(tau, xi, v) = a(tau,xi) * bump(v) * (1 + small ripple)
    std::vector<cplx> hh(std::size_t(m) * nxn * nvn, cplx{});
    std::vector<double> psi(nvn), ripple(nvn);
    int vidx[3];
    for (std::size_t kv = 0; kv < nvn; ++kv) {
        grid.decode(kv, grid.nv(), vidx);
        psi[kv] = detail::vbump(grid, vidx, q);
        double s = 0;
        for (int a = 0; a < grid.dim(); ++a) s += std::sin(3.0 * grid.v(vidx[a]));
        ripple[kv] = 1.0 + 0.3 * s;
    }
    int kidx[3];
    for (int r = 0; r < m; ++r)
        for (std::size_t kx = 0; kx < nxn; ++kx) {
            grid.decode(kx, grid.nx(), kidx);
            bool band = std::abs(PhaseGrid::signed_index(r, m)) <= m / 4;
            for (int a = 0; a < grid.dim(); ++a)
                band &= std::abs(PhaseGrid::signed_index(kidx[a], grid.nx())) <= grid.nx() / 4;
            if (!band) continue;
            const cplx a(rng.sym(1.0), rng.sym(1.0));
            cplx* row = hh.data() + (std::size_t(r) * nxn + kx) * nvn;
            for (std::size_t kv = 0; kv < nvn; ++kv) row[kv] = a * psi[kv] * ripple[kv];
        }

    // hermitize for real time-domain h
    for (int r = 0; r < m; ++r) {
        const int rn = r == 0 ? 0 : m - r;
        for (std::size_t kx = 0; kx < nxn; ++kx) {
            grid.decode(kx, grid.nx(), kidx);
            int nidx[3];
            for (int a = 0; a < grid.dim(); ++a)
                nidx[a] = kidx[a] == 0 ? 0 : grid.nx() - kidx[a];
            const std::size_t kxn = grid.encode(nidx, grid.nx());
            for (std::size_t kv = 0; kv < nvn; ++kv) {
                const std::size_t i = (std::size_t(r) * nxn + kx) * nvn + kv;
                const std::size_t j = (std::size_t(rn) * nxn + kxn) * nvn + kv;
                if (j < i) continue;
                const cplx a = hh[i], b = hh[j];
                hh[i] = 0.5 * (a + std::conj(b));
                hh[j] = 0.5 * (b + std::conj(a));
            }
        }
    }

    // project out the phi-weighted v-mean using the correction profile phi*psi
    // (its phi-weighted sum is strictly positive), then solve for g spectrally
    std::vector<std::vector<cplx>> gh(grid.dim(),
                                      std::vector<cplx>(hh.size(), cplx{}));
    std::vector<double> phi_v(nvn);
    std::vector<int> vdims(grid.dim(), grid.nv());
    auto& eng = FftEngine::instance();
    std::vector<cplx> rhs(nvn);
    for (int r = 0; r < m; ++r) {
        const double tau = p.tau(r);
        for (std::size_t kx = 0; kx < nxn; ++kx) {
            grid.decode(kx, grid.nx(), kidx);
            double xi[3];
            for (int a = 0; a < grid.dim(); ++a) xi[a] = grid.xi(kidx[a]);
            cplx s{};
            double w = 0;
            cplx* row = hh.data() + (std::size_t(r) * nxn + kx) * nvn;
            for (std::size_t kv = 0; kv < nvn; ++kv) {
                grid.decode(kv, grid.nv(), vidx);
                double phi = tau;
                for (int a = 0; a < grid.dim(); ++a) phi += xi[a] * grid.v(vidx[a]);
                phi_v[kv] = phi;
                s += phi * row[kv];
                w += phi * phi * psi[kv];
            }
            if (w > 0)
                for (std::size_t kv = 0; kv < nvn; ++kv)
                    row[kv] -= (s / w) * (phi_v[kv] * psi[kv]);
            // rhs = i phi h^, v-transform, divide by the divergence symbol
            for (std::size_t kv = 0; kv < nvn; ++kv)
                rhs[kv] = cplx(0.0, phi_v[kv]) * row[kv];
            eng.dft_all(rhs.data(), vdims, FFTW_FORWARD);
            for (int c = 0; c < grid.dim(); ++c) {
                cplx* grow = gh[c].data() + (std::size_t(r) * nxn + kx) * nvn;
                for (std::size_t kv = 0; kv < nvn; ++kv) {
                    grid.decode(kv, grid.nv(), vidx);
                    const double mu2 = grid.mu_norm2(vidx);
                    grow[kv] = mu2 == 0.0
                                   ? cplx{}
                                   : rhs[kv] * cplx(0.0, -grid.mu(vidx[c]) / mu2);
                }
                eng.dft_all(grow, vdims, FFTW_BACKWARD);
                const double sc = 1.0 / double(nvn);
                for (std::size_t kv = 0; kv < nvn; ++kv) grow[kv] *= sc;
            }
        }
    }

    detail::tx_transform(hh, p, nvn, FFTW_BACKWARD);
    for (std::size_t i = 0; i < hh.size(); ++i) p.h[i] = hh[i].real();
    for (int c = 0; c < grid.dim(); ++c) {
        detail::tx_transform(gh[c], p, nvn, FFTW_BACKWARD);
        for (std::size_t i = 0; i < gh[c].size(); ++i) p.g[c][i] = gh[c][i].real();
    }
    p.q = support_radius_of(p);
    return p;
}

// Free-streaming pair: h(t,x,v) = h0(x - v t, v), g = 0, zero-extended in time.
inline KineticPair make_free_streaming_pair(const PhaseGrid& grid, int m_live, double dt,
                                            double q, CounterRng& rng) {
    KineticPair p;
    p.grid = grid;
    p.m_live = m_live;
    p.m_total = 2 * m_live;
    p.dt = dt;
    p.q = q;
    p.allocate();
    const std::size_t nxn = grid.nxn(), nvn = grid.nvn();

    // band-limited random h0 in x times a v-bump
    std::vector<cplx> h0x(nxn, cplx{});
    int kidx[3];
    for (std::size_t kx = 0; kx < nxn; ++kx) {
        grid.decode(kx, grid.nx(), kidx);
        bool band = true;
        for (int a = 0; a < grid.dim(); ++a)
            band &= std::abs(PhaseGrid::signed_index(kidx[a], grid.nx())) <= grid.nx() / 4;
        if (band) h0x[kx] = cplx(rng.sym(1.0), rng.sym(1.0));
    }
    // hermitize in x
    for (std::size_t kx = 0; kx < nxn; ++kx) {
        grid.decode(kx, grid.nx(), kidx);
        int nidx[3];
        for (int a = 0; a < grid.dim(); ++a)
            nidx[a] = kidx[a] == 0 ? 0 : grid.nx() - kidx[a];
        const std::size_t kxn = grid.encode(nidx, grid.nx());
        if (kxn < kx) continue;
        const cplx a = h0x[kx], b = h0x[kxn];
        h0x[kx] = 0.5 * (a + std::conj(b));
        h0x[kxn] = 0.5 * (b + std::conj(a));
    }

    int vidx[3];
    std::vector<cplx> slab(nxn);
    for (std::size_t kv = 0; kv < nvn; ++kv) {
        grid.decode(kv, grid.nv(), vidx);
        const double psi = detail::vbump(grid, vidx, q);
        if (psi == 0.0) continue;
        double v[3];
        for (int a = 0; a < grid.dim(); ++a) v[a] = grid.v(vidx[a]);
        for (int t = 0; t < m_live; ++t) {
            const double time = t * dt;
            for (std::size_t kx = 0; kx < nxn; ++kx) {
                grid.decode(kx, grid.nx(), kidx);
                double ang = 0;
                for (int a = 0; a < grid.dim(); ++a) ang -= grid.xi(kidx[a]) * v[a] * time;
                slab[kx] = h0x[kx] * cplx(std::cos(ang), std::sin(ang));
            }
            FftEngine::instance().dft_all(slab.data(), std::vector<int>(grid.dim(), grid.nx()),
                                          FFTW_BACKWARD);
            const double sc = psi / std::sqrt(double(nxn));
            for (std::size_t x = 0; x < nxn; ++x)
                p.h[(std::size_t(t) * nxn + x) * nvn + kv] = slab[x].real() * sc;
        }
    }
    return p;
}

} // namespace vph
