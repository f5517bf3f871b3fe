#pragma once
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vph/field.hpp"
#include "vph/solver.hpp"
#include "vph/spectral.hpp"

// Flow maps for time-dependent fields of regularity L^2_t C^{1+alpha}_x:
// Picard construction with trapezoid quadrature, a fourth-order one-step
// cross-check, Jacobians via the variational equation, and the Vlasov
// characteristic field (v, sigma E).

namespace vph {

constexpr int kMaxFlowDim = 6;

// u(t, y) -> out[d]; and its Jacobian grad u(t, y) -> out[d*d] row-major
using FieldEval = std::function<void(double, const double*, double*)>;

struct FlowField {
    int d = 0;
    FieldEval value;
    FieldEval gradient;  // optional; required by variational_jacobian
};

// Sampled d-component field on the x-grid with spectral-in-space,
// linear-in-time evaluation (the natural smooth approximant of the lemma).
class GridFieldSeries {
  public:
    GridFieldSeries(const PhaseGrid& grid, std::vector<double> times,
                    std::vector<std::vector<XField>> samples)
        : grid_(grid), times_(std::move(times)) {
        if (times_.size() != samples.size() || times_.empty())
            throw std::invalid_argument("GridFieldSeries: times/samples mismatch");
        d_ = int(samples.front().size());
        for (auto& comps : samples) {
            std::vector<XSpectralField> row;
            row.reserve(comps.size());
            for (auto& c : comps) row.push_back(transform_x(c));
            spectra_.push_back(std::move(row));
        }
    }

    int components() const { return d_; }
    const PhaseGrid& grid() const { return grid_; }
    const std::vector<double>& times() const { return times_; }

    void eval(double t, const double* y, double* out) const {
        auto [i, w] = bracket(t);
        for (int c = 0; c < d_; ++c) {
            double a = eval_x_spectrum(spectra_[i][c], y);
            double b = w == 0.0 ? a : eval_x_spectrum(spectra_[i + 1][c], y);
            out[c] = (1.0 - w) * a + w * b;
        }
    }

    // spatial gradient d out_c / d y_a, row-major c*n + a
    void eval_grad(double t, const double* y, double* out) const {
        auto [i, w] = bracket(t);
        const int n = grid_.dim();
        int kidx[3];
        for (int c = 0; c < d_; ++c)
            for (int a = 0; a < n; ++a) {
                XSpectralField da = spectra_[i][c];
                for (std::size_t k = 0; k < grid_.nxn(); ++k) {
                    grid_.decode(k, grid_.nx(), kidx);
                    da.values[k] *= cplx(0.0, grid_.xi(kidx[a]));
                }
                double g0 = eval_x_spectrum(da, y);
                double g1 = g0;
                if (w != 0.0) {
                    XSpectralField db = spectra_[i + 1][c];
                    for (std::size_t k = 0; k < grid_.nxn(); ++k) {
                        grid_.decode(k, grid_.nx(), kidx);
                        db.values[k] *= cplx(0.0, grid_.xi(kidx[a]));
                    }
                    g1 = eval_x_spectrum(db, y);
                }
                out[c * n + a] = (1.0 - w) * g0 + w * g1;
            }
    }

    // L^2-in-time estimate of ||u||_{C^{1+alpha}} from grid finite differences
    double c1_alpha_bound(double alpha) const {
        double acc = 0;
        for (std::size_t i = 0; i < times_.size(); ++i) {
            double norm = c_norm_at(i, alpha);
            double dt = i + 1 < times_.size() ? times_[i + 1] - times_[i]
                        : (times_.size() > 1 ? times_[i] - times_[i - 1] : 1.0);
            acc += norm * norm * dt;
        }
        return std::sqrt(acc);
    }

    FlowField field() const {
        return FlowField{d_,
                         [this](double t, const double* y, double* out) { eval(t, y, out); },
                         [this](double t, const double* y, double* out) {
                             eval_grad(t, y, out);
                         }};
    }

  private:
    PhaseGrid grid_;
    int d_ = 0;
    std::vector<double> times_;
    std::vector<std::vector<XSpectralField>> spectra_;

    std::pair<std::size_t, double> bracket(double t) const {
        if (times_.size() == 1 || t <= times_.front()) return {0, 0.0};
        if (t >= times_.back()) return {times_.size() - 2, 1.0};
        std::size_t i = 0;
        while (i + 2 < times_.size() && times_[i + 1] <= t) ++i;
        double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
        return {i, w};
    }

    double c_norm_at(std::size_t i, double alpha) const {
        const int n = grid_.dim();
        double sup_u = 0, sup_grad = 0, hoelder = 0;
        for (int c = 0; c < d_; ++c) {
            XField u = inverse_x(spectra_[i][c]);
            for (double v : u.values) sup_u = std::max(sup_u, std::fabs(v));
            for (int a = 0; a < n; ++a) {
                XField du = deriv_x_spectrum(spectra_[i][c], a);
                for (double v : du.values) sup_grad = std::max(sup_grad, std::fabs(v));
                // dyadic finite differences of grad u along each axis
                for (int scale = 1; scale <= 4; scale *= 2) {
                    double h = scale * grid_.dx();
                    double m = axis_shift_diff(du, a, scale);
                    hoelder = std::max(hoelder, m / std::pow(h, alpha));
                }
            }
        }
        return sup_u + sup_grad + hoelder;
    }

    static XField deriv_x_spectrum(const XSpectralField& fh, int axis) {
        XSpectralField d = fh;
        int kidx[3];
        for (std::size_t k = 0; k < fh.grid.nxn(); ++k) {
            fh.grid.decode(k, fh.grid.nx(), kidx);
            d.values[k] *= cplx(0.0, fh.grid.xi(kidx[axis]));
        }
        return inverse_x(d);
    }

    double axis_shift_diff(const XField& f, int axis, int shift) const {
        const PhaseGrid& g = f.grid;
        int idx[3], jdx[3];
        double m = 0;
        for (std::size_t k = 0; k < g.nxn(); ++k) {
            g.decode(k, g.nx(), idx);
            for (int a = 0; a < g.dim(); ++a) jdx[a] = idx[a];
            jdx[axis] = (idx[axis] + shift) % g.nx();
            m = std::max(m, std::fabs(f.values[g.encode(jdx, g.nx())] - f.values[k]));
        }
        return m;
    }
};

// The phase-space characteristic field (v, sigma E(t,x)) built from a solver
// trajectory; d = 2n.
class VlasovField {
  public:
    VlasovField(const Trajectory& traj)
        : grid_(traj.grid), sigma_(traj.params.sigma), times_(traj.times) {
        for (const auto& ff : traj.forces) {
            std::vector<XSpectralField> row;
            for (int a = 0; a < grid_.dim(); ++a) row.push_back(transform_x(ff.e[a]));
            e_.push_back(std::move(row));
        }
    }

    int components() const { return 2 * grid_.dim(); }
    const std::vector<double>& times() const { return times_; }

    void eval(double t, const double* y, double* out) const {
        const int n = grid_.dim();
        auto [i, w] = bracket(t);
        for (int a = 0; a < n; ++a) out[a] = y[n + a];  // dx/dt = v
        for (int a = 0; a < n; ++a) {
            double e0 = eval_x_spectrum(e_[i][a], y);
            double e1 = w == 0.0 ? e0 : eval_x_spectrum(e_[i + 1][a], y);
            out[n + a] = sigma_ * ((1.0 - w) * e0 + w * e1);
        }
    }

    void eval_grad(double t, const double* y, double* out) const {
        const int n = grid_.dim(), d = 2 * n;
        auto [i, w] = bracket(t);
        for (int c = 0; c < d * d; ++c) out[c] = 0;
        for (int a = 0; a < n; ++a) out[a * d + n + a] = 1.0;  // d(v)/dv
        int kidx[3];
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                XSpectralField da = e_[i][a];
                for (std::size_t k = 0; k < grid_.nxn(); ++k) {
                    grid_.decode(k, grid_.nx(), kidx);
                    da.values[k] *= cplx(0.0, grid_.xi(kidx[b]));
                }
                double g0 = eval_x_spectrum(da, y);
                double g1 = g0;
                if (w != 0.0) {
                    XSpectralField db = e_[i + 1][a];
                    for (std::size_t k = 0; k < grid_.nxn(); ++k) {
                        grid_.decode(k, grid_.nx(), kidx);
                        db.values[k] *= cplx(0.0, grid_.xi(kidx[b]));
                    }
                    g1 = eval_x_spectrum(db, y);
                }
                out[(n + a) * d + b] = sigma_ * ((1.0 - w) * g0 + w * g1);
            }
    }

    FlowField field() const {
        return FlowField{components(),
                         [this](double t, const double* y, double* out) { eval(t, y, out); },
                         [this](double t, const double* y, double* out) {
                             eval_grad(t, y, out);
                         }};
    }

  private:
    PhaseGrid grid_;
    double sigma_;
    std::vector<double> times_;
    std::vector<std::vector<XSpectralField>> e_;

    std::pair<std::size_t, double> bracket(double t) const {
        if (times_.size() == 1 || t <= times_.front()) return {0, 0.0};
        if (t >= times_.back()) return {times_.size() - 2, 1.0};
        std::size_t i = 0;
        while (i + 2 < times_.size() && times_[i + 1] <= t) ++i;
        double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
        return {i, w};
    }
};

struct FlowMap {
    int d = 0;
    std::vector<double> times;
    std::vector<double> seeds;      // S*d
    std::vector<double> positions;  // [time][seed][d]
    std::vector<double> jacobians;  // [time][seed][d*d], filled on demand
    bool has_jacobians = false;

    std::size_t n_seeds() const { return d == 0 ? 0 : seeds.size() / std::size_t(d); }
    const double* pos(std::size_t ti, std::size_t s) const {
        return positions.data() + (ti * n_seeds() + s) * std::size_t(d);
    }
    double* pos(std::size_t ti, std::size_t s) {
        return positions.data() + (ti * n_seeds() + s) * std::size_t(d);
    }
    const double* jac(std::size_t ti, std::size_t s) const {
        return jacobians.data() + (ti * n_seeds() + s) * std::size_t(d) * std::size_t(d);
    }
    double* jac(std::size_t ti, std::size_t s) {
        return jacobians.data() + (ti * n_seeds() + s) * std::size_t(d) * std::size_t(d);
    }
};

struct FlowError : std::runtime_error {
    double contraction = 0;
    FlowError(const std::string& msg, double c) : std::runtime_error(msg), contraction(c) {}
};

struct PicardResult {
    FlowMap flow;
    int iterations = 0;
    double final_change = 0;
    double contraction = 0;  // last observed ratio of successive sup-changes
};

// Fixed-point iteration Phi(t,x) = x + int_0^t u(s, Phi(s,x)) ds with the
// composite trapezoid rule on the sample times.
inline PicardResult picard_flow(const FlowField& u, const std::vector<double>& seeds,
                                const std::vector<double>& times, int iters, double tol) {
    if (iters < 1) throw std::invalid_argument("picard_flow: iters >= 1 required");
    const int d = u.d;
    const std::size_t S = seeds.size() / std::size_t(d);
    const std::size_t m = times.size();

    FlowMap flow;
    flow.d = d;
    flow.times = times;
    flow.seeds = seeds;
    flow.positions.resize(m * S * std::size_t(d));
    for (std::size_t ti = 0; ti < m; ++ti)
        for (std::size_t s = 0; s < S; ++s)
            for (int c = 0; c < d; ++c) flow.pos(ti, s)[c] = seeds[s * d + c];

    std::vector<double> vel(m * S * std::size_t(d));
    double prev_change = -1, contraction = 0, change = 0;
    int it = 0;
    for (; it < iters; ++it) {
        // evaluate u along the current iterate
        for (std::size_t ti = 0; ti < m; ++ti)
            for (std::size_t s = 0; s < S; ++s)
                u.value(times[ti], flow.pos(ti, s), &vel[(ti * S + s) * std::size_t(d)]);
        // cumulative trapezoid per seed
        change = 0;
        std::vector<double> acc(S * std::size_t(d), 0.0);
        for (std::size_t ti = 1; ti < m; ++ti) {
            const double h = 0.5 * (times[ti] - times[ti - 1]);
            for (std::size_t s = 0; s < S; ++s)
                for (int c = 0; c < d; ++c) {
                    acc[s * d + c] += h * (vel[((ti - 1) * S + s) * std::size_t(d) + c] +
                                           vel[(ti * S + s) * std::size_t(d) + c]);
                    const double next = seeds[s * d + c] + acc[s * d + c];
                    change = std::max(change, std::fabs(next - flow.pos(ti, s)[c]));
                    flow.pos(ti, s)[c] = next;
                }
        }
        if (prev_change > 0) contraction = change / prev_change;
        prev_change = std::max(change, 1e-300);
        if (change <= tol) break;
    }
    if (change > tol)
        throw FlowError("picard_flow: no convergence within iteration budget "
                        "(under-resolved field or C1 too large for T)",
                        contraction);
    return {std::move(flow), it + 1, change, contraction};
}

// classical 4-stage one-step method on a uniform grid; cross-check for picard
inline FlowMap rk_flow(const FlowField& u, const std::vector<double>& seeds, double t_final,
                       double dt) {
    const int d = u.d;
    const std::size_t S = seeds.size() / std::size_t(d);
    const long m = std::lround(t_final / dt);
    if (m < 0 || std::fabs(t_final / dt - double(m)) > 1e-9)
        throw std::invalid_argument("rk_flow: t_final/dt must be integral");

    FlowMap flow;
    flow.d = d;
    flow.seeds = seeds;
    flow.times.resize(std::size_t(m) + 1);
    flow.positions.resize((std::size_t(m) + 1) * S * std::size_t(d));
    for (long k = 0; k <= m; ++k) flow.times[k] = k * dt;
    for (std::size_t s = 0; s < S; ++s)
        for (int c = 0; c < d; ++c) flow.pos(0, s)[c] = seeds[s * d + c];

    double y[kMaxFlowDim], k1[kMaxFlowDim], k2[kMaxFlowDim], k3[kMaxFlowDim], k4[kMaxFlowDim],
        tmp[kMaxFlowDim];
    for (long k = 0; k < m; ++k) {
        const double t = k * dt;
        for (std::size_t s = 0; s < S; ++s) {
            for (int c = 0; c < d; ++c) y[c] = flow.pos(k, s)[c];
            u.value(t, y, k1);
            for (int c = 0; c < d; ++c) tmp[c] = y[c] + 0.5 * dt * k1[c];
            u.value(t + 0.5 * dt, tmp, k2);
            for (int c = 0; c < d; ++c) tmp[c] = y[c] + 0.5 * dt * k2[c];
            u.value(t + 0.5 * dt, tmp, k3);
            for (int c = 0; c < d; ++c) tmp[c] = y[c] + dt * k3[c];
            u.value(t + dt, tmp, k4);
            for (int c = 0; c < d; ++c) {
                double next = y[c] + dt / 6.0 * (k1[c] + 2 * k2[c] + 2 * k3[c] + k4[c]);
                if (!std::isfinite(next)) throw std::runtime_error("rk_flow: non-finite position");
                flow.pos(k + 1, s)[c] = next;
            }
        }
    }
    return flow;
}

namespace detail {
// solve (I - M) x = b for d x d M, in place Gaussian elimination
inline void solve_small(int d, double* M, double* b) {
    double A[kMaxFlowDim * (kMaxFlowDim + 1)];
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) A[r * (d + 1) + c] = (r == c ? 1.0 : 0.0) - M[r * d + c];
        A[r * (d + 1) + d] = b[r];
    }
    for (int p = 0; p < d; ++p) {
        int piv = p;
        for (int r = p + 1; r < d; ++r)
            if (std::fabs(A[r * (d + 1) + p]) > std::fabs(A[piv * (d + 1) + p])) piv = r;
        for (int c = 0; c <= d; ++c) std::swap(A[p * (d + 1) + c], A[piv * (d + 1) + c]);
        const double diag = A[p * (d + 1) + p];
        for (int r = p + 1; r < d; ++r) {
            const double f = A[r * (d + 1) + p] / diag;
            for (int c = p; c <= d; ++c) A[r * (d + 1) + c] -= f * A[p * (d + 1) + c];
        }
    }
    for (int r = d - 1; r >= 0; --r) {
        double s = A[r * (d + 1) + d];
        for (int c = r + 1; c < d; ++c) s -= A[r * (d + 1) + c] * b[c];
        b[r] = s / A[r * (d + 1) + r];
    }
}
} // namespace detail

// Solve the variational equation Psi(t) = I + int_0^t grad u(s, Phi(s,x)) Psi(s) ds
// along each trajectory with the same trapezoid quadrature (implicit in the
// right endpoint; exact for the linear matrix integral equation on each step).
inline void variational_jacobian(const FlowField& u, FlowMap& flow) {
    if (!u.gradient) throw std::invalid_argument("variational_jacobian: no gradient callback");
    const int d = flow.d;
    const std::size_t S = flow.n_seeds(), m = flow.times.size();
    flow.jacobians.assign(m * S * std::size_t(d) * std::size_t(d), 0.0);
    std::vector<double> a_prev(std::size_t(d) * d), a_next(std::size_t(d) * d);
    double col[kMaxFlowDim], rhsm[kMaxFlowDim * kMaxFlowDim];
    for (std::size_t s = 0; s < S; ++s) {
        double* j0 = flow.jac(0, s);
        for (int c = 0; c < d; ++c) j0[c * d + c] = 1.0;
        u.gradient(flow.times[0], flow.pos(0, s), a_prev.data());
        for (std::size_t ti = 1; ti < m; ++ti) {
            const double h = 0.5 * (flow.times[ti] - flow.times[ti - 1]);
            u.gradient(flow.times[ti], flow.pos(ti, s), a_next.data());
            // (I - h A_next) Psi_next = (I + h A_prev) Psi_prev
            const double* jp = flow.jac(ti - 1, s);
            double* jn = flow.jac(ti, s);
            for (int r = 0; r < d; ++r)
                for (int c = 0; c < d; ++c) {
                    double acc = jp[r * d + c];
                    for (int k = 0; k < d; ++k) acc += h * a_prev[r * d + k] * jp[k * d + c];
                    jn[r * d + c] = acc;
                }
            for (int c = 0; c < d; ++c) {
                for (int r = 0; r < d; ++r) col[r] = jn[r * d + c];
                for (int r = 0; r < d * d; ++r) rhsm[r] = h * a_next[r];
                detail::solve_small(d, rhsm, col);
                for (int r = 0; r < d; ++r) jn[r * d + c] = col[r];
            }
            std::swap(a_prev, a_next);
        }
    }
    flow.has_jacobians = true;
}

inline double det_small(int d, const double* M) {
    double A[kMaxFlowDim * kMaxFlowDim];
    for (int i = 0; i < d * d; ++i) A[i] = M[i];
    double det = 1.0;
    for (int p = 0; p < d; ++p) {
        int piv = p;
        for (int r = p + 1; r < d; ++r)
            if (std::fabs(A[r * d + p]) > std::fabs(A[piv * d + p])) piv = r;
        if (piv != p) {
            det = -det;
            for (int c = 0; c < d; ++c) std::swap(A[p * d + c], A[piv * d + c]);
        }
        const double diag = A[p * d + p];
        if (diag == 0.0) return 0.0;
        det *= diag;
        for (int r = p + 1; r < d; ++r) {
            const double f = A[r * d + p] / diag;
            for (int c = p; c < d; ++c) A[r * d + c] -= f * A[p * d + c];
        }
    }
    return det;
}

// max over times and seeds of |det grad Phi - 1|
inline double det_deviation(const FlowMap& flow) {
    if (!flow.has_jacobians) throw std::invalid_argument("det_deviation: jacobians not filled");
    double worst = 0;
    for (std::size_t ti = 0; ti < flow.times.size(); ++ti)
        for (std::size_t s = 0; s < flow.n_seeds(); ++s)
            worst = std::max(worst, std::fabs(det_small(flow.d, flow.jac(ti, s)) - 1.0));
    return worst;
}

// regular marker lattice over a phase-space box
inline std::vector<double> make_seed_lattice(int d, const double* lo, const double* hi,
                                             int per_axis) {
    std::vector<double> seeds;
    std::vector<int> idx(d, 0);
    for (;;) {
        for (int a = 0; a < d; ++a) {
            double w = per_axis == 1 ? 0.5 : double(idx[a]) / double(per_axis - 1);
            seeds.push_back(lo[a] + w * (hi[a] - lo[a]));
        }
        int a = d - 1;
        for (; a >= 0; --a) {
            if (++idx[a] < per_axis) break;
            idx[a] = 0;
        }
        if (a < 0) break;
    }
    return seeds;
}

// Hoelder modulus of grad Phi over dyadic seed offsets along each axis of a
// lattice with per_axis points; returns max over scales (and per-scale values).
struct HoelderCertificate {
    double modulus = 0;
    std::vector<double> per_scale;
};

inline HoelderCertificate hoelder_certificate(const FlowMap& flow, double alpha, int per_axis,
                                              int scales = 3) {
    if (!flow.has_jacobians)
        throw std::invalid_argument("hoelder_certificate: jacobians not filled");
    const int d = flow.d;
    const std::size_t S = flow.n_seeds();
    if (S != PhaseGrid::ipow(per_axis, d))
        throw std::invalid_argument("hoelder_certificate: seeds are not a full lattice");
    HoelderCertificate cert;
    std::vector<int> idx(d);
    for (int scale = 1, s2 = 0; s2 < scales; ++s2, scale *= 2) {
        double worst = 0;
        for (std::size_t ti = 0; ti < flow.times.size(); ++ti)
            for (std::size_t s = 0; s < S; ++s) {
                std::size_t rest = s;
                for (int a = d - 1; a >= 0; --a) {
                    idx[a] = int(rest % std::size_t(per_axis));
                    rest /= std::size_t(per_axis);
                }
                for (int a = 0; a < d; ++a) {
                    if (idx[a] + scale >= per_axis) continue;
                    std::size_t nb = 0;
                    for (int b = 0; b < d; ++b)
                        nb = nb * per_axis + std::size_t(b == a ? idx[b] + scale : idx[b]);
                    const double h = std::fabs(flow.seeds[nb * d + a] - flow.seeds[s * d + a]);
                    if (h == 0.0) continue;
                    double diff = 0;
                    for (int c = 0; c < d * d; ++c)
                        diff = std::max(diff,
                                        std::fabs(flow.jac(ti, nb)[c] - flow.jac(ti, s)[c]));
                    worst = std::max(worst, diff / std::pow(h, alpha));
                }
            }
        cert.per_scale.push_back(worst);
        cert.modulus = std::max(cert.modulus, worst);
    }
    return cert;
}

// Characteristic flow of a solver trajectory from the field (v, sigma E(t,x)).
// Seeds are phase-space points (x, v); an error is raised if any trajectory
// leaves the v-box (truncation violated).
inline PicardResult vlasov_characteristics(const Trajectory& traj,
                                           const std::vector<double>& seeds, int iters = 60,
                                           double tol = 1e-12) {
    VlasovField vf(traj);
    PicardResult res = picard_flow(vf.field(), seeds, traj.times, iters, tol);
    const int n = traj.grid.dim(), d = 2 * n;
    for (std::size_t ti = 0; ti < res.flow.times.size(); ++ti)
        for (std::size_t s = 0; s < res.flow.n_seeds(); ++s)
            for (int a = 0; a < n; ++a)
                if (std::fabs(res.flow.pos(ti, s)[n + a]) >= traj.grid.lv())
                    throw std::runtime_error(
                        "vlasov_characteristics: seed escaped the v-box (truncation violated)");
    (void)d;
    return res;
}

// max_seeds |f(t, Phi_t(x,v)) - f0(x,v)| at each snapshot time
inline std::vector<double> transport_residual(const Trajectory& traj, const FlowMap& flow) {
    const PhaseGrid& g = traj.grid;
    const int n = g.dim();
    std::vector<double> out;
    SpectralField f0h = transform_xv(traj.snapshots.front());
    for (std::size_t si = 0; si < traj.snap_times.size(); ++si) {
        // locate the flow sample at this snapshot time
        std::size_t ti = 0;
        while (ti + 1 < flow.times.size() &&
               std::fabs(flow.times[ti] - traj.snap_times[si]) > 1e-12)
            ++ti;
        SpectralField fh = transform_xv(traj.snapshots[si]);
        double worst = 0;
        for (std::size_t s = 0; s < flow.n_seeds(); ++s) {
            const double* z = flow.pos(ti, s);
            const double* z0 = flow.seeds.data() + s * std::size_t(flow.d);
            double ft = eval_xv_spectrum(fh, z, z + n);
            double f0 = eval_xv_spectrum(f0h, z0, z0 + n);
            worst = std::max(worst, std::fabs(ft - f0));
        }
        out.push_back(worst);
    }
    return out;
}

} // namespace vph
