#pragma once
#include <cmath>
#include <stdexcept>
#include <vector>

#include "vph/field.hpp"
#include "vph/poisson.hpp"
#include "vph/spectral.hpp"

// Strang-split spectral semi-Lagrangian integration of
//   d_t f + v . grad_x f + sigma grad_x U . grad_v f = 0,  Delta U = rho,
// with exact sub-flows: each substep is a unitary phase multiplication, so the
// discrete L^2 norm is conserved to roundoff.

namespace vph {

struct SolverAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// exact solution of d_t f + v . grad_x f = 0 over dt (per v-slice phase shift)
inline DistributionField step_x_advection(const DistributionField& f, double dt) {
    const PhaseGrid& g = f.grid;
    std::vector<cplx> buf(f.values.begin(), f.values.end());
    forward_x_inplace(buf, g);
    // per-axis phase tables: e^{-i xi_a v_a dt}
    const int n = g.dim(), nx = g.nx(), nv = g.nv();
    std::vector<cplx> ph(std::size_t(n) * nx * nv);
    for (int a = 0; a < n; ++a)
        for (int j = 0; j < nx; ++j)
            for (int k = 0; k < nv; ++k) {
                double ang = -g.xi(j) * g.v(k) * dt;
                ph[(std::size_t(a) * nx + j) * nv + k] = cplx(std::cos(ang), std::sin(ang));
            }
    int jx[3], kv[3];
    for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
        g.decode(kx, nx, jx);
        cplx* row = buf.data() + kx * g.nvn();
        for (std::size_t lv = 0; lv < g.nvn(); ++lv) {
            g.decode(lv, nv, kv);
            cplx w = ph[(std::size_t(0) * nx + jx[0]) * nv + kv[0]];
            for (int a = 1; a < n; ++a) w *= ph[(std::size_t(a) * nx + jx[a]) * nv + kv[a]];
            row[lv] *= w;
        }
    }
    inverse_x_inplace(buf, g);
    DistributionField out(g);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

// exact solution of d_t f + sigma E(x) . grad_v f = 0 over dt, E frozen
inline DistributionField step_v_advection(const DistributionField& f, const ForceField& force,
                                          double sigma, double dt) {
    const PhaseGrid& g = f.grid;
    for (int a = 0; a < g.dim(); ++a)
        for (double e : force.e[a].values)
            if (!std::isfinite(e)) throw SolverAbort("step_v_advection: non-finite field");
    std::vector<cplx> buf(f.values.begin(), f.values.end());
    forward_v_inplace(buf, g);
    const int n = g.dim(), nv = g.nv();
    std::vector<cplx> ph(std::size_t(n) * nv);
    int kv[3];
    for (std::size_t x = 0; x < g.nxn(); ++x) {
        for (int a = 0; a < n; ++a) {
            const double ea = force.e[a].values[x];
            for (int k = 0; k < nv; ++k) {
                double ang = -sigma * ea * g.mu(k) * dt;
                ph[std::size_t(a) * nv + k] = cplx(std::cos(ang), std::sin(ang));
            }
        }
        cplx* row = buf.data() + x * g.nvn();
        for (std::size_t lv = 0; lv < g.nvn(); ++lv) {
            g.decode(lv, nv, kv);
            cplx w = ph[std::size_t(0) * nv + kv[0]];
            for (int a = 1; a < n; ++a) w *= ph[std::size_t(a) * nv + kv[a]];
            row[lv] *= w;
        }
    }
    inverse_v_inplace(buf, g);
    DistributionField out(g);
    for (std::size_t i = 0; i < buf.size(); ++i) out.values[i] = buf[i].real();
    return out;
}

// optional 2/3-rule low-pass; off for all acceptance runs
inline void lowpass_filter(DistributionField& f) {
    const PhaseGrid& g = f.grid;
    std::vector<cplx> buf(f.values.begin(), f.values.end());
    forward_xv_inplace(buf, g);
    int ix[3], iv[3];
    const int cx = g.nx() / 3, cv = g.nv() / 3;
    for (std::size_t kx = 0; kx < g.nxn(); ++kx) {
        g.decode(kx, g.nx(), ix);
        bool cutx = false;
        for (int a = 0; a < g.dim(); ++a)
            cutx |= std::abs(PhaseGrid::signed_index(ix[a], g.nx())) > cx;
        cplx* row = buf.data() + kx * g.nvn();
        for (std::size_t kv = 0; kv < g.nvn(); ++kv) {
            g.decode(kv, g.nv(), iv);
            bool cut = cutx;
            for (int a = 0; a < g.dim(); ++a)
                cut |= std::abs(PhaseGrid::signed_index(iv[a], g.nv())) > cv;
            if (cut) row[kv] = 0.0;
        }
    }
    inverse_xv_inplace(buf, g);
    for (std::size_t i = 0; i < buf.size(); ++i) f.values[i] = buf[i].real();
}

struct StepResult {
    DistributionField f;
    ForceField force;  // the frozen field used in the v-advection
};

// half x-advection, Poisson solve, full v-advection, half x-advection
inline StepResult strang_step(const DistributionField& f, const SimParams& p) {
    const double dt = p.dt;
    DistributionField f1 = step_x_advection(f, 0.5 * dt);
    ForceField force(f.grid);
    if (p.field_enabled) force = solve_poisson(density(f1), p.poisson_mode);
    DistributionField f2 =
        p.field_enabled ? step_v_advection(f1, force, p.sigma, dt) : std::move(f1);
    DistributionField f3 = step_x_advection(f2, 0.5 * dt);
    if (p.lowpass_filter) lowpass_filter(f3);
    if (!f3.finite()) throw SolverAbort("strang_step: non-finite values");
    return {std::move(f3), std::move(force)};
}

struct Trajectory {
    PhaseGrid grid;
    SimParams params;
    std::vector<double> times;             // every step boundary, t_k = k dt
    std::vector<ForceField> forces;        // self-consistent field of f(t_k)
    std::vector<double> snap_times;
    std::vector<DistributionField> snapshots;
    DiagnosticsSeries diag;
    bool q_growth_ok = true;   // Q(t) <= Q(0) + sum ||E||_inf dt + 2 dv
    double q_growth_margin = 0;
};

inline double grad_inf_norm(const ForceField& ff) {
    double m = 0;
    for (const auto& comp : ff.e)
        for (double e : comp.values) m = std::max(m, std::fabs(e));
    return m;
}

// Integrate m = T/dt steps (dt may be negative for backward time), recording
// diagnostics at every step and snapshots at the configured cadence.
inline Trajectory run(const DistributionField& f0, const SimParams& p) {
    p.validate(f0.grid.dim());
    const double ratio = p.t_final / p.dt;
    const long m = std::lround(ratio);
    if (m < 0 || std::fabs(ratio - double(m)) > 1e-9)
        throw std::invalid_argument("run: t_final/dt must be a non-negative integer");

    Trajectory traj;
    traj.grid = f0.grid;
    traj.params = p;

    const double dv = f0.grid.dv();
    const double q_abort = f0.grid.lv() - 2.0 * dv;

    DistributionField f = f0;
    double e_sum = 0;  // sum of ||E||_inf |dt| over completed steps
    double q0 = 0;

    auto record = [&](long k, const DistributionField& fk) {
        XField rho = density(fk);
        ForceField force(fk.grid);
        if (p.field_enabled)
            force = solve_poisson(rho, p.poisson_mode);
        else
            force.rho = std::move(rho);  // free streaming: density tracked, U = E = 0
        const double t = double(k) * p.dt;
        const double l1 = l1_norm(fk);
        const double l2 = l2_norm(fk);
        if (!std::isfinite(l2)) throw SolverAbort("run: non-finite field norm");
        const double hs = sobolev_norm_spectrum(transform_xv(fk), p.s);
        const double q = support_radius(fk, p.support_tol);
        const double rho_n = hs_norm_x(force.rho, p.s + 0.25);
        const double gu = grad_inf_norm(force);
        traj.diag.push(t, l1, l2, hs, q, rho_n, gu);
        traj.times.push_back(t);
        traj.forces.push_back(std::move(force));
        if (k == 0) q0 = q;
        // discrete support-growth bound with one-cell slack on each side
        const double bound = q0 + e_sum + 2.0 * dv;
        traj.q_growth_margin = std::max(traj.q_growth_margin, q - bound);
        if (q > bound) traj.q_growth_ok = false;
        if (q >= q_abort)
            throw SolverAbort("run: velocity support reached the box boundary "
                              "(invalid truncation)");
        if (k % std::max(1, p.snapshot_every) == 0 || k == m) {
            traj.snap_times.push_back(t);
            traj.snapshots.push_back(fk);
        }
    };

    record(0, f);
    for (long k = 1; k <= m; ++k) {
        StepResult st = strang_step(f, p);
        f = std::move(st.f);
        e_sum += grad_inf_norm(st.force) * std::fabs(p.dt);
        record(k, f);
    }
    return traj;
}

} // namespace vph
