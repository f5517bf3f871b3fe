#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vph/fft.hpp"
#include "vph/field.hpp"
#include "vph/spectral.hpp"

namespace vph {

// rho(x) = sum_k f(x, v_k) dv^n
inline XField density(const DistributionField& f) {
    const PhaseGrid& g = f.grid;
    XField rho(g);
    const double w = g.cell_v();
    for (std::size_t x = 0; x < g.nxn(); ++x) {
        const double* row = f.values.data() + x * g.nvn();
        double acc = 0;
        for (std::size_t k = 0; k < g.nvn(); ++k) acc += row[k];
        rho.values[x] = acc * w;
    }
    return rho;
}

// Solve Delta U = rho on the torus: U^ = -rho^/|xi|^2, zero mode projected out,
// E = grad U by the spectral derivative.
inline ForceField solve_periodic(const XField& rho) {
    const PhaseGrid& g = rho.grid;
    ForceField out(g);
    out.mode = PoissonMode::periodic;
    out.rho = rho;

    XSpectralField rh = transform_x(rho);
    XSpectralField uh(g);
    auto xin = detail::xi_norm2_table(g);
    for (std::size_t k = 0; k < g.nxn(); ++k)
        uh.values[k] = xin[k] == 0.0 ? cplx{} : -rh.values[k] / xin[k];
    out.u = inverse_x(uh);

    int idx[3];
    for (int a = 0; a < g.dim(); ++a) {
        XSpectralField eh(g);
        for (std::size_t k = 0; k < g.nxn(); ++k) {
            g.decode(k, g.nx(), idx);
            eh.values[k] = cplx(0.0, g.xi(idx[a])) * uh.values[k];
        }
        out.e[a] = inverse_x(eh);
    }
    return out;
}

// spectral Laplacian of an x-field (multiplier -|xi|^2)
inline XField laplacian_x(const XField& u) {
    XSpectralField uh = transform_x(u);
    auto xin = detail::xi_norm2_table(u.grid);
    for (std::size_t k = 0; k < u.grid.nxn(); ++k) uh.values[k] *= -xin[k];
    return inverse_x(uh);
}

// Fundamental solution Gamma_n(x) = |x|^{2-n} / (n(2-n) omega_n) tabulated on
// the doubled grid; the singular cell takes the exact average of Gamma_n over
// the volume-equivalent ball (radius r0).
struct GreensKernel {
    int n = 3;
    double omega_n = 0;  // unit n-ball volume
    double r0 = 0;       // near-origin regularization radius
    int doubled = 0;     // 2*N_x
    double dx = 0;
    std::vector<double> values;  // (2N)^n, DFT-wrapped displacement table

    static double unit_ball_volume(int n) {
        // pi^{n/2} / Gamma(n/2 + 1)
        return std::pow(PhaseGrid::pi(), 0.5 * n) / std::tgamma(0.5 * n + 1.0);
    }
};

inline GreensKernel make_greens_kernel(const PhaseGrid& g) {
    if (g.dim() < 3)
        throw std::invalid_argument("free-space kernel requires n >= 3");
    GreensKernel k;
    k.n = g.dim();
    k.omega_n = GreensKernel::unit_ball_volume(k.n);
    k.dx = g.dx();
    k.doubled = 2 * g.nx();
    k.r0 = g.dx() / std::pow(k.omega_n, 1.0 / k.n);
    const double pref = 1.0 / (k.n * (2.0 - k.n) * k.omega_n);
    // cell average of |x|^{2-n} over the ball of radius r0 equals n r0^{2-n} / 2
    const double origin = 0.5 * k.n * std::pow(k.r0, 2.0 - k.n) * pref;

    const std::size_t total = PhaseGrid::ipow(k.doubled, k.n);
    k.values.resize(total);
    int idx[3];
    for (std::size_t lin = 0; lin < total; ++lin) {
        std::size_t rest = lin;
        for (int a = k.n - 1; a >= 0; --a) {
            idx[a] = int(rest % k.doubled);
            rest /= k.doubled;
        }
        double r2 = 0;
        for (int a = 0; a < k.n; ++a) {
            double d = PhaseGrid::signed_index(idx[a], k.doubled) * k.dx;
            r2 += d * d;
        }
        k.values[lin] = r2 == 0.0 ? origin : pref * std::pow(std::sqrt(r2), 2.0 - k.n);
    }
    return k;
}

// Free-space potential by zero-padded convolution with Gamma_n on the doubled
// grid (exact discrete convolution, no periodic images); E by spectral
// differentiation of U on the original grid.
inline ForceField solve_free_space(const XField& rho, const GreensKernel& kernel) {
    const PhaseGrid& g = rho.grid;
    if (g.dim() < 3)
        throw std::invalid_argument("solve_free_space requires n >= 3 (paper kernel)");
    if (kernel.doubled != 2 * g.nx() || kernel.n != g.dim())
        throw std::invalid_argument("kernel does not match grid");

    // support must stay inside the inner half of the box
    const double margin = 0.5 * g.lx();
    int idx[3];
    for (std::size_t x = 0; x < g.nxn(); ++x) {
        if (rho.values[x] == 0.0) continue;
        g.decode(x, g.nx(), idx);
        for (int a = 0; a < g.dim(); ++a)
            if (std::fabs(g.x(idx[a])) > margin)
                throw std::runtime_error(
                    "solve_free_space: source support touches the padding margin; "
                    "the box is too small for free-space truncation");
    }

    const int n = g.dim(), m = kernel.doubled;
    const std::size_t total = PhaseGrid::ipow(m, n);
    std::vector<cplx> pad(total, cplx{}), ker(total);
    for (std::size_t i = 0; i < total; ++i) ker[i] = kernel.values[i];
    // embed rho at indices [0, N) per axis
    for (std::size_t x = 0; x < g.nxn(); ++x) {
        g.decode(x, g.nx(), idx);
        std::size_t lin = 0;
        for (int a = 0; a < n; ++a) lin = lin * m + std::size_t(idx[a]);
        pad[lin] = rho.values[x];
    }
    std::vector<int> dims(n, m);
    auto& eng = FftEngine::instance();
    eng.dft_all(pad.data(), dims, FFTW_FORWARD);
    eng.dft_all(ker.data(), dims, FFTW_FORWARD);
    for (std::size_t i = 0; i < total; ++i) pad[i] *= ker[i];
    eng.dft_all(pad.data(), dims, FFTW_BACKWARD);
    const double scale = g.cell_x() / double(total);

    ForceField out(g);
    out.mode = PoissonMode::free_space;
    out.rho = rho;
    for (std::size_t x = 0; x < g.nxn(); ++x) {
        g.decode(x, g.nx(), idx);
        std::size_t lin = 0;
        for (int a = 0; a < n; ++a) lin = lin * m + std::size_t(idx[a]);
        out.u.values[x] = pad[lin].real() * scale;
    }
    for (int a = 0; a < n; ++a) out.e[a] = deriv_x(out.u, a);
    return out;
}

inline ForceField solve_poisson(const XField& rho, PoissonMode mode) {
    if (mode == PoissonMode::periodic) return solve_periodic(rho);
    return solve_free_space(rho, make_greens_kernel(rho.grid));
}

// relative residual of the spectral identity Delta U = rho - mean(rho)
inline double laplacian_residual(const ForceField& ff) {
    const XField lap = laplacian_x(ff.u);
    double mean = 0;
    for (double r : ff.rho.values) mean += r;
    mean /= double(ff.rho.values.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lap.values.size(); ++i) {
        double target = ff.rho.values[i] - mean;
        num += (lap.values[i] - target) * (lap.values[i] - target);
        den += target * target;
    }
    return den == 0.0 ? std::sqrt(num) : std::sqrt(num / den);
}

} // namespace vph
