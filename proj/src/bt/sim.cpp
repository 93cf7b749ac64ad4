#include "bt/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bt/spectral.hpp"

namespace bt {

namespace {

WaveState axpy(const WaveState& s, double a, const WaveState& d) {
    WaveState out = s;
    out.eta = s.eta + a * d.eta;
    out.u = s.u + a * d.u;
    return out;
}

void check_finite(const WaveState& s, const char* who) {
    for (double v : s.eta.v)
        if (!std::isfinite(v)) throw std::runtime_error(std::string(who) + ": non-finite eta");
    for (int a = 0; a < s.u.grid.dim; ++a)
        for (double v : s.u.comp[a])
            if (!std::isfinite(v)) throw std::runtime_error(std::string(who) + ": non-finite velocity");
}

}  // namespace

WaveState step_rk4(const RhsFn& rhs, const WaveState& s, double dt) {
    if (dt == 0.0) return s;
    WaveState k1 = rhs(s);
    WaveState k2 = rhs(axpy(s, dt / 2.0, k1));
    WaveState k3 = rhs(axpy(s, dt / 2.0, k2));
    WaveState k4 = rhs(axpy(s, dt, k3));
    WaveState out = s;
    out.eta = s.eta + (dt / 6.0) * (k1.eta + 2.0 * k2.eta + 2.0 * k3.eta + k4.eta);
    out.u = s.u + (dt / 6.0) * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u);
    check_finite(out, "step_rk4");
    return out;
}

double heuristic_dt(const Grid& g, double eps) {
    double dt = 1e300;
    for (int a = 0; a < g.dim; ++a) {
        const double dx = g.dx(a);
        const double kmax = 2.0 * std::numbers::pi / g.length[a] * (g.n[a] / 3);
        dt = std::min(dt, 0.4 * dx / (1.0 + eps * kmax * kmax * kmax * dx / 3.0));
    }
    return dt;
}

Trajectory simulate(const RhsFn& rhs, const WaveState& initial, double T,
                    const SimOptions& opt, const std::string& model_name,
                    double eps) {
    if (T <= 0.0) throw std::invalid_argument("simulate: horizon must be positive");
    const double snap_dt = opt.snap_dt > 0.0 ? opt.snap_dt : T / 50.0;
    const double dt0 = opt.dt > 0.0 ? opt.dt : heuristic_dt(initial.eta.grid, eps);

    Trajectory traj;
    traj.model = model_name;
    traj.frame = initial.frame;
    traj.eps = eps;

    auto record = [&](double t, const WaveState& s) {
        Snapshot snap;
        snap.t = t;
        snap.state = s;
        if (opt.bracket_delta > 0.0) {
            snap.delta = opt.bracket_delta;
            snap.minus = step_rk4(rhs, s, -opt.bracket_delta);
            snap.plus = step_rk4(rhs, s, opt.bracket_delta);
        }
        traj.snaps.push_back(std::move(snap));
    };

    WaveState state = initial;
    double t = 0.0;
    record(t, state);
    const int nsnap = std::max(1, static_cast<int>(std::ceil(T / snap_dt - 1e-9)));
    for (int sidx = 1; sidx <= nsnap; ++sidx) {
        const double target = std::min(T, sidx * snap_dt);
        const int nstep =
            std::max(1, static_cast<int>(std::ceil((target - t) / dt0 - 1e-9)));
        const double dt = (target - t) / nstep;
        for (int k = 0; k < nstep; ++k) {
            state = step_rk4(rhs, state, dt);
            t += dt;
            if (max_norm(state.eta) > opt.blowup_threshold) {
                std::ostringstream os;
                os << "simulate: blow-up guard tripped at t = " << t
                   << " (max|eta| > " << opt.blowup_threshold << ")";
                throw std::runtime_error(os.str());
            }
        }
        t = target;
        record(t, state);
    }
    return traj;
}

ReferenceState reference_rhs(const ReferenceState& s, const Bathymetry& bath,
                             double eps, int nz) {
    const StripGrid strip(s.eta.grid, nz);
    const RegimeParams params(eps, bath.regime);
    const ScalarField z = exact_dn(s.psi, s.eta, bath.b, params, strip);

    const VectorField gpsi = fourier_grad(s.psi);
    const VectorField geta = fourier_grad(s.eta);
    VectorField w = gpsi - eps * product(z, geta);

    ScalarField deta = (1.0 / eps) * z - eps * dot(geta, w);

    ScalarField dpsi = eps * product(deta, z);
    dpsi -= 0.5 * eps * dot(w, w);
    dpsi -= 0.5 * product(z, z);
    dpsi -= s.eta;
    return {std::move(dpsi), std::move(deta)};
}

ReferenceState reference_step(const ReferenceState& s, const Bathymetry& bath,
                              double eps, double dt, int nz) {
    auto ax = [](const ReferenceState& a, double c, const ReferenceState& d) {
        return ReferenceState{a.psi + c * d.psi, a.eta + c * d.eta};
    };
    ReferenceState k1 = reference_rhs(s, bath, eps, nz);
    ReferenceState k2 = reference_rhs(ax(s, dt / 2.0, k1), bath, eps, nz);
    ReferenceState k3 = reference_rhs(ax(s, dt / 2.0, k2), bath, eps, nz);
    ReferenceState k4 = reference_rhs(ax(s, dt, k3), bath, eps, nz);
    ReferenceState out;
    out.psi = s.psi + (dt / 6.0) * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
    out.eta = s.eta + (dt / 6.0) * (k1.eta + 2.0 * k2.eta + 2.0 * k3.eta + k4.eta);
    for (double v : out.eta.v)
        if (!std::isfinite(v))
            throw std::runtime_error("reference_step: non-finite elevation");
    return out;
}

Trajectory reference_run(const ReferenceState& initial, const Bathymetry& bath,
                         double eps, double T, double dt, int nz,
                         const SimOptions& opt) {
    const double snap_dt = opt.snap_dt > 0.0 ? opt.snap_dt : T / 8.0;

    Trajectory traj;
    traj.model = "water-waves-reference";
    traj.frame = Frame::Potential;
    traj.eps = eps;

    auto to_state = [&](const ReferenceState& s) {
        return WaveState(s.eta, fourier_grad(s.psi), Frame::Potential);
    };
    auto record = [&](double t, const ReferenceState& s) {
        Snapshot snap;
        snap.t = t;
        snap.state = to_state(s);
        if (opt.bracket_delta > 0.0) {
            snap.delta = opt.bracket_delta;
            snap.minus = to_state(reference_step(s, bath, eps, -opt.bracket_delta, nz));
            snap.plus = to_state(reference_step(s, bath, eps, opt.bracket_delta, nz));
        }
        traj.snaps.push_back(std::move(snap));
    };

    ReferenceState state = initial;
    double t = 0.0;
    record(t, state);
    const int nsnap = std::max(1, static_cast<int>(std::ceil(T / snap_dt - 1e-9)));
    for (int sidx = 1; sidx <= nsnap; ++sidx) {
        const double target = std::min(T, sidx * snap_dt);
        const int nstep =
            std::max(1, static_cast<int>(std::ceil((target - t) / dt - 1e-9)));
        const double step = (target - t) / nstep;
        for (int k = 0; k < nstep; ++k) {
            state = reference_step(state, bath, eps, step, nz);
            t += step;
            if (max_norm(state.eta) > opt.blowup_threshold)
                throw std::runtime_error("reference_run: blow-up guard tripped");
        }
        t = target;
        record(t, state);
    }
    return traj;
}

Trajectory map_states(const Trajectory& traj,
                      const std::function<WaveState(const WaveState&)>& map,
                      Frame new_frame, const std::string& new_model) {
    Trajectory out;
    out.model = new_model;
    out.frame = new_frame;
    out.eps = traj.eps;
    out.snaps.reserve(traj.snaps.size());
    for (const Snapshot& s : traj.snaps) {
        Snapshot ns;
        ns.t = s.t;
        ns.delta = s.delta;
        ns.state = map(s.state);
        ns.state.frame = new_frame;
        if (s.delta > 0.0) {
            ns.minus = map(s.minus);
            ns.plus = map(s.plus);
            ns.minus.frame = new_frame;
            ns.plus.frame = new_frame;
        }
        out.snaps.push_back(std::move(ns));
    }
    return out;
}

namespace {

double combined_l2(const ScalarField& eta, const VectorField& u) {
    const double a = l2_norm(eta), b = l2_norm(u);
    return std::sqrt(a * a + b * b);
}

}  // namespace

double trajectory_defect(const Trajectory& traj, const RhsFn& target_rhs) {
    double worst = 0.0;
    int used = 0;
    for (const Snapshot& s : traj.snaps) {
        if (s.delta <= 0.0) continue;
        const double inv = 1.0 / (2.0 * s.delta);
        ScalarField deta = inv * (s.plus.eta - s.minus.eta);
        VectorField du = inv * (s.plus.u - s.minus.u);
        WaveState rhs = target_rhs(s.state);
        worst = std::max(worst, combined_l2(deta - rhs.eta, du - rhs.u));
        ++used;
    }
    if (used == 0)
        throw std::invalid_argument(
            "trajectory_defect: no differencing brackets recorded");
    return worst;
}

void ConsistencyReport::write_csv(std::ostream& os) const {
    os << "epsilon,residual\n";
    os.precision(16);
    for (size_t i = 0; i < eps.size(); ++i)
        os << eps[i] << ',' << residual[i] << '\n';
    if (eps.size() >= 3) os << "slope," << slope << '\n';
}

ConsistencyReport consistency_residual(
    const std::vector<std::pair<double, Trajectory>>& family,
    const std::function<WaveState(const WaveState&, double)>& target_rhs) {
    ConsistencyReport rep;
    for (const auto& [eps, traj] : family) {
        rep.eps.push_back(eps);
        rep.residual.push_back(trajectory_defect(
            traj, [&, e = eps](const WaveState& s) { return target_rhs(s, e); }));
    }
    if (rep.eps.size() >= 3) rep.slope = fitted_slope(rep.eps, rep.residual);
    return rep;
}

Trajectory build_approximate_solution(const VectorField& v0, const ScalarField& eta0,
                                      const Bathymetry& bath, double eps,
                                      double horizon, const SmallCoeffs& sc,
                                      const SimOptions& opt) {
    if (bath.regime != Regime::SmallVariation)
        throw std::invalid_argument(
            "build_approximate_solution: small-variation bathymetry required");
    if (!is_symmetric_small(sc))
        throw std::invalid_argument(
            "build_approximate_solution: coefficients are not fully symmetric "
            "(need a1 == a3, a2 >= 0, a4 >= 0)");

    // forward: theta frame, then nonlinear symmetrization with the initial eta
    VectorField vtheta = to_theta_frame_small(v0, eps, sc.theta);
    VectorField vsym = symmetrize_small(vtheta, eta0, bath.b, eps);
    WaveState init(eta0, std::move(vsym), Frame::Symmetrized);

    RhsFn rhs = [&bath, eps, sc](const WaveState& s) {
        return rhs_t1(s, bath, eps, sc);
    };
    Trajectory sym = simulate(rhs, init, horizon, opt, "t1-symmetric", eps);

    // backward: approximate inverses in the opposite order, per snapshot
    auto back = [&](const WaveState& s) {
        VectorField v = unsymmetrize_small(s.u, s.eta, bath.b, eps);
        v = from_theta_frame_small(v, eps, sc.theta);
        return WaveState(s.eta, std::move(v), Frame::SurfaceVelocity);
    };
    return map_states(sym, back, Frame::SurfaceVelocity, "t1-approximate");
}

Trajectory build_approximate_solution_strong(const VectorField& v0,
                                             const ScalarField& eta0,
                                             const Bathymetry& bath, double eps,
                                             double horizon, const SimOptions& opt) {
    if (bath.regime != Regime::StrongVariation)
        throw std::invalid_argument(
            "build_approximate_solution_strong: strong-variation bathymetry "
            "required");
    const StrongCoeffs sc = solve_symmetric_strong(kSymmetricRootReference).coeffs;

    VectorField vsym = symmetrize_strong(v0, eta0, bath, eps);
    VectorField vtheta = to_theta_frame_strong(vsym, bath, eps, sc.theta);
    WaveState init(eta0, std::move(vtheta), Frame::ThetaVelocity);

    RhsFn rhs = [&bath, eps, sc](const WaveState& s) {
        return rhs_s_strong(s, bath, eps, sc);
    };
    Trajectory sym = simulate(rhs, init, horizon, opt, "s-strong-symmetric", eps);

    auto back = [&](const WaveState& s) {
        VectorField v = from_theta_frame_strong(s.u, bath, eps, sc.theta);
        v = unsymmetrize_strong(v, s.eta, bath, eps);
        return WaveState(s.eta, std::move(v), Frame::SurfaceVelocity);
    };
    return map_states(sym, back, Frame::SurfaceVelocity, "s-strong-approximate");
}

namespace {

void put_u32(std::ostream& os, uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (v >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
    static_assert(sizeof(double) == 8);
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (bits >> (8 * i)) & 0xff;
    os.write(reinterpret_cast<const char*>(b), 8);
}

uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw std::runtime_error("trajectory stream truncated");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    if (!is) throw std::runtime_error("trajectory stream truncated");
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_btj(std::ostream& os, const Trajectory& traj) {
    if (traj.snaps.empty()) throw std::invalid_argument("write_btj: empty trajectory");
    const Grid& g = traj.snaps.front().state.eta.grid;
    os.write("BTJ1", 4);
    put_u32(os, static_cast<uint32_t>(g.dim));
    put_u32(os, static_cast<uint32_t>(g.n[0]));
    put_u32(os, static_cast<uint32_t>(g.n[1]));
    put_f64(os, g.length[0]);
    put_f64(os, g.length[1]);
    put_f64(os, traj.eps);
    put_u32(os, static_cast<uint32_t>(traj.frame));
    put_u32(os, static_cast<uint32_t>(traj.model.size()));
    os.write(traj.model.data(), static_cast<std::streamsize>(traj.model.size()));
    put_u32(os, static_cast<uint32_t>(traj.snaps.size()));
    for (const Snapshot& s : traj.snaps) {
        put_f64(os, s.t);
        for (double v : s.state.eta.v) put_f64(os, v);
        for (int a = 0; a < g.dim; ++a)
            for (double v : s.state.u.comp[a]) put_f64(os, v);
    }
}

Trajectory read_btj(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "BTJ1", 4) != 0)
        throw std::runtime_error("read_btj: bad magic");
    const int dim = static_cast<int>(get_u32(is));
    const int n0 = static_cast<int>(get_u32(is));
    const int n1 = static_cast<int>(get_u32(is));
    const double l0 = get_f64(is);
    const double l1 = get_f64(is);
    Grid g = dim == 1 ? Grid::line(n0, l0) : Grid::plane(n0, n1, l0, l1);

    Trajectory traj;
    traj.eps = get_f64(is);
    traj.frame = static_cast<Frame>(get_u32(is));
    const uint32_t name_len = get_u32(is);
    traj.model.resize(name_len);
    is.read(traj.model.data(), name_len);
    const uint32_t count = get_u32(is);
    for (uint32_t k = 0; k < count; ++k) {
        Snapshot s;
        s.t = get_f64(is);
        ScalarField eta(g);
        for (double& v : eta.v) v = get_f64(is);
        VectorField u(g);
        for (int a = 0; a < dim; ++a)
            for (double& v : u.comp[a]) v = get_f64(is);
        s.state = WaveState(std::move(eta), std::move(u), traj.frame);
        traj.snaps.push_back(std::move(s));
    }
    if (!is) throw std::runtime_error("read_btj: stream truncated");
    return traj;
}

void write_diagnostics_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,eta_l2,u_l2,energy\n";
    os.precision(16);
    for (const Snapshot& s : traj.snaps) {
        const double a = l2_norm(s.state.eta);
        const double b = l2_norm(s.state.u);
        os << s.t << ',' << a << ',' << b << ',' << 0.5 * (a * a + b * b) << '\n';
    }
}

}  // namespace bt
