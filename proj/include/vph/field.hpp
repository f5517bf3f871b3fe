#pragma once
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "vph/grid.hpp"

namespace vph {

using cplx = std::complex<double>;

// f(x,v) on the grid, row-major x-major: values[xlin * nvn + vlin]
struct DistributionField {
    PhaseGrid grid;
    std::vector<double> values;

    DistributionField() = default;
    explicit DistributionField(const PhaseGrid& g) : grid(g), values(g.size(), 0.0) {}

    double& at(std::size_t xlin, std::size_t vlin) { return values[xlin * grid.nvn() + vlin]; }
    double at(std::size_t xlin, std::size_t vlin) const { return values[xlin * grid.nvn() + vlin]; }

    bool finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

// mixed transform f^(mu,xi); same layout, complex entries indexed by (kx, kv)
struct SpectralField {
    PhaseGrid grid;
    std::vector<cplx> values;

    SpectralField() = default;
    explicit SpectralField(const PhaseGrid& g) : grid(g), values(g.size(), cplx{}) {}

    cplx& at(std::size_t kxlin, std::size_t kvlin) { return values[kxlin * grid.nvn() + kvlin]; }
    cplx at(std::size_t kxlin, std::size_t kvlin) const { return values[kxlin * grid.nvn() + kvlin]; }
};

// real scalar field on the x-box only
struct XField {
    PhaseGrid grid;
    std::vector<double> values;

    XField() = default;
    explicit XField(const PhaseGrid& g) : grid(g), values(g.nxn(), 0.0) {}
};

struct XSpectralField {
    PhaseGrid grid;
    std::vector<cplx> values;

    XSpectralField() = default;
    explicit XSpectralField(const PhaseGrid& g) : grid(g), values(g.nxn(), cplx{}) {}
};

enum class PoissonMode { periodic, free_space };

// rho, U and E = grad_x U of the self-consistent field
struct ForceField {
    PhaseGrid grid;
    PoissonMode mode = PoissonMode::periodic;
    XField rho;
    XField u;
    std::vector<XField> e;  // n components

    ForceField() = default;
    explicit ForceField(const PhaseGrid& g) : grid(g), rho(g), u(g), e(g.dim(), XField(g)) {}
};

struct SimParams {
    double sigma = 1.0;        // the +/- of the transport term
    double s = 0.3;            // Sobolev exponent
    double t_final = 1.0;
    double dt = 1.0 / 256.0;
    double support_tol = 1e-12;
    PoissonMode poisson_mode = PoissonMode::periodic;
    bool field_enabled = true;  // off = free streaming
    bool theorem_mode = true;   // enables the s > n/2 - 1/4 hypothesis warning
    int snapshot_every = 1;
    bool lowpass_filter = false;  // optional spectral filter; off for all acceptance runs

    void validate(int n) const {
        if (!(dt != 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be nonzero");
        if (!(support_tol > 0)) throw std::invalid_argument("support_tol must be positive");
        if (sigma != 1.0 && sigma != -1.0) throw std::invalid_argument("sigma must be +1 or -1");
        if (s < 0) throw std::invalid_argument("s must be >= 0");
        (void)n;
    }
    bool theorem_hypothesis_ok(int n) const { return s > 0.5 * n - 0.25; }
};

// per-time diagnostics; F and R are running suprema and hence non-decreasing
struct DiagnosticsSeries {
    std::vector<double> t;
    std::vector<double> l1, l2, hs;
    std::vector<double> q;         // velocity support radius
    std::vector<double> f_bound;   // F(t) = 1 + sup_{t'<=t} ||f||_{H^s}
    std::vector<double> r_bound;   // R(t) = 1 + sup_{t'<=t} Q(t')
    std::vector<double> rho_hs14;  // ||rho(t)||_{H^{s+1/4}_x}
    std::vector<double> gradu_inf;
    std::vector<double> p;  // optional Loeper P(t)

    std::size_t size() const { return t.size(); }

    void push(double time, double n1, double n2, double ns, double qv, double rho_n,
              double gu) {
        t.push_back(time);
        l1.push_back(n1);
        l2.push_back(n2);
        hs.push_back(ns);
        q.push_back(qv);
        double fprev = f_bound.empty() ? 1.0 + ns : f_bound.back();
        double rprev = r_bound.empty() ? 1.0 + qv : r_bound.back();
        f_bound.push_back(std::max(fprev, 1.0 + ns));
        r_bound.push_back(std::max(rprev, 1.0 + qv));
        rho_hs14.push_back(rho_n);
        gradu_inf.push_back(gu);
    }
};

// max |v_k| over grid points where |f| exceeds tol; 0 if none do
inline double support_radius(const DistributionField& f, double tol) {
    if (!(tol > 0)) throw std::invalid_argument("support_radius: tol must be positive");
    const PhaseGrid& g = f.grid;
    const std::size_t nvn = g.nvn(), nxn = g.nxn();
    std::vector<char> live(nvn, 0);
    for (std::size_t x = 0; x < nxn; ++x) {
        const double* row = f.values.data() + x * nvn;
        for (std::size_t k = 0; k < nvn; ++k)
            if (std::fabs(row[k]) > tol) live[k] = 1;
    }
    double q2 = 0.0;
    int idx[3];
    for (std::size_t k = 0; k < nvn; ++k) {
        if (!live[k]) continue;
        g.decode(k, g.nv(), idx);
        q2 = std::max(q2, g.v_norm2(idx));
    }
    return std::sqrt(q2);
}

} // namespace vph
