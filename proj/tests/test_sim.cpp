#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "bt/sim.hpp"
#include "bt/spectral.hpp"

using namespace bt;
using std::numbers::pi;

namespace {

ScalarField cosine_field(const Grid& g, double amp, double mode, double phase = 0.0) {
    ScalarField f(g);
    for (int i = 0; i < g.size(); ++i)
        f.v[i] = amp * std::cos(mode * g.x(i) + phase);
    return f;
}

WaveState cosine_state(const Grid& g, double ea, double va, Frame frame) {
    VectorField u(g);
    u.set_component(0, cosine_field(g, va, 1.0, 0.3));
    return WaveState(cosine_field(g, ea, 1.0), std::move(u), frame);
}

}  // namespace

TEST_CASE("rk4 basics") {
    Grid g = Grid::line(16, 2.0 * pi);
    WaveState s = cosine_state(g, 0.1, 0.05, Frame::SurfaceVelocity);

    SUBCASE("dt = 0 is the identity") {
        auto rhs = [](const WaveState& w) { return w; };
        WaveState out = step_rk4(rhs, s, 0.0);
        CHECK(max_norm(out.eta - s.eta) == 0.0);
        CHECK(max_norm(out.u - s.u) == 0.0);
    }
    SUBCASE("scalar exponential flow is 4th-order accurate") {
        // dt y = y componentwise: the RK4 polynomial vs exp(dt)
        auto rhs = [](const WaveState& w) { return w; };
        for (double dt : {0.5, 0.25}) {
            WaveState out = step_rk4(rhs, s, dt);
            const double poly =
                1.0 + dt + dt * dt / 2.0 + dt * dt * dt / 6.0 + std::pow(dt, 4) / 24.0;
            CHECK(max_norm(out.eta - poly * s.eta) < 1e-14);
            // defect from the exact flow shrinks by ~2^5 per halving
            CHECK(std::abs(poly - std::exp(dt)) < std::pow(dt, 5));
        }
    }
    SUBCASE("non-finite results are rejected") {
        auto rhs = [&](const WaveState& w) {
            WaveState d = w;
            d.eta.v[0] = std::nan("");
            return d;
        };
        CHECK_THROWS(step_rk4(rhs, s, 0.1));
    }
}

TEST_CASE("harmonic-oscillator trajectory: 4th-order global convergence") {
    // dt eta = u, dt u = -eta; exact solution rotates at unit frequency
    Grid g = Grid::line(8, 2.0 * pi);
    auto rhs = [](const WaveState& w) {
        WaveState d = w;
        d.eta = w.u.component(0);
        d.u.set_component(0, -1.0 * w.eta);
        return d;
    };
    WaveState s0 = cosine_state(g, 0.3, 0.0, Frame::SurfaceVelocity);
    const double T = 1.0;
    auto run_err = [&](double dt) {
        WaveState s = s0;
        int steps = static_cast<int>(std::round(T / dt));
        for (int k = 0; k < steps; ++k) s = step_rk4(rhs, s, dt);
        ScalarField exact = std::cos(T) * s0.eta;
        return max_norm(s.eta - exact);
    };
    double e1 = run_err(0.1), e2 = run_err(0.05);
    CHECK(e1 / e2 > 14.0);  // ~2^4
    CHECK(e1 / e2 < 18.0);
}

TEST_CASE("simulate: cadence, brackets, blow-up guard") {
    Grid g = Grid::line(32, 2.0 * pi);
    Bathymetry bath(cosine_field(g, 0.1, 1.0), Regime::SmallVariation);
    const double eps = 0.1;
    auto rhs = [&](const WaveState& w) { return rhs_b1(w, bath, eps); };
    WaveState s0 = cosine_state(g, 0.1, 0.05, Frame::SurfaceVelocity);

    SimOptions opt;
    opt.dt = 0.01;
    opt.snap_dt = 0.25;
    opt.bracket_delta = 0.005;
    Trajectory traj = simulate(rhs, s0, 1.0, opt, "b1", eps);

    CHECK(traj.model == "b1");
    CHECK(traj.snaps.size() == 5);  // t = 0, .25, .5, .75, 1
    CHECK(traj.snaps.front().t == doctest::Approx(0.0));
    CHECK(traj.snaps.back().t == doctest::Approx(1.0));
    for (const auto& s : traj.snaps) {
        CHECK(s.delta == doctest::Approx(0.005));
        CHECK(max_norm(s.plus.eta - s.minus.eta) > 0.0);
    }

    // centered differencing of the brackets reproduces the rhs to O(delta^2)
    const Snapshot& snap = traj.snaps[2];
    WaveState d = rhs(snap.state);
    ScalarField diff = (1.0 / (2.0 * snap.delta)) * (snap.plus.eta - snap.minus.eta);
    CHECK(max_norm(diff - d.eta) < 1e-4);

    SUBCASE("rest stays at rest") {
        WaveState rest = cosine_state(g, 0.0, 0.0, Frame::SurfaceVelocity);
        Trajectory r = simulate(rhs, rest, 0.5, opt, "b1", eps);
        CHECK(max_norm(r.snaps.back().state.eta) < 1e-13);
    }
    SUBCASE("blow-up is reported with the time") {
        auto bad = [](const WaveState& w) {
            WaveState d = w;
            d.eta = 40.0 * w.eta;  // exponential growth rate 40
            d.u = 40.0 * w.u;
            return d;
        };
        CHECK_THROWS_WITH_AS(simulate(bad, s0, 1.0, opt, "b1", eps),
                             doctest::Contains("blow-up"), std::runtime_error);
    }
}

TEST_CASE("heuristic_dt scales with the grid") {
    Grid g1 = Grid::line(64, 2.0 * pi);
    Grid g2 = Grid::line(128, 2.0 * pi);
    CHECK(heuristic_dt(g1, 0.1) > heuristic_dt(g2, 0.1));
    CHECK(heuristic_dt(g1, 0.0) == doctest::Approx(0.4 * g1.dx(0)));
}

TEST_CASE("reference dynamics: flat-bottom single-mode dispersion") {
    // linearized water waves: eta(t) = a cos(kx) cos(w t),
    // w = sqrt(tanh(sqrt(eps) k) k / sqrt(eps)) / ... in the scaled variables
    // the operator is (1/eps) Z[eps psi-mode] -> frequency
    // w^2 = sqrt(eps) k tanh(sqrt(eps) k) / eps.
    Grid g = Grid::line(32, 2.0 * pi);
    ScalarField zero(g);
    Bathymetry bath(zero, Regime::SmallVariation);
    const double eps = 0.09, k = 1.0, a = 1e-4;
    const double se = std::sqrt(eps);
    const double w = std::sqrt(se * k * std::tanh(se * k) / eps);

    ReferenceState s{ScalarField(g), cosine_field(g, a, k)};
    const int nz = 129;
    const double T = 0.8, dt = 0.01;
    int steps = static_cast<int>(std::round(T / dt));
    for (int i = 0; i < steps; ++i) s = reference_step(s, bath, eps, dt, nz);

    ScalarField expect = cosine_field(g, a * std::cos(w * T), k);
    CHECK(max_norm(s.eta - expect) < 2e-3 * a);
}

TEST_CASE("reference run records potential-frame snapshots with brackets") {
    Grid g = Grid::line(32, 2.0 * pi);
    Bathymetry bath(cosine_field(g, 0.05, 1.0), Regime::SmallVariation);
    const double eps = 0.1;
    ReferenceState s0{cosine_field(g, 0.02, 1.0, 0.5), cosine_field(g, 0.05, 1.0)};
    SimOptions opt;
    opt.snap_dt = 0.1;
    opt.bracket_delta = 0.002;
    Trajectory traj = reference_run(s0, bath, eps, 0.2, 0.01, 65, opt);
    CHECK(traj.frame == Frame::Potential);
    CHECK(traj.snaps.size() == 3);
    // U = grad psi at t=0
    ScalarField gpsi = derivative(s0.psi, 0);
    CHECK(max_norm(traj.snaps[0].state.u.component(0) - gpsi) < 1e-12);
    CHECK(traj.snaps[1].delta == doctest::Approx(0.002));
}

TEST_CASE("trajectory_defect vanishes on an exactly consistent trajectory") {
    Grid g = Grid::line(32, 2.0 * pi);
    Bathymetry bath(cosine_field(g, 0.1, 1.0), Regime::SmallVariation);
    const double eps = 0.1;
    auto rhs = [&](const WaveState& w) { return rhs_b1(w, bath, eps); };
    SimOptions opt;
    opt.dt = 0.005;
    opt.snap_dt = 0.2;
    opt.bracket_delta = 0.004;
    Trajectory traj =
        simulate(rhs, cosine_state(g, 0.1, 0.05, Frame::SurfaceVelocity), 0.6,
                 opt, "b1", eps);
    // differencing own rhs: defect limited by delta^2 of the bracket
    CHECK(trajectory_defect(traj, rhs) < 1e-4);
    // against a wrong target the defect is O(1) of the mismatch
    auto wrong = [&](const WaveState& w) {
        WaveState d = rhs(w);
        d.eta += cosine_field(g, 0.01, 1.0);
        return d;
    };
    CHECK(trajectory_defect(traj, wrong) > 5e-3);

    SUBCASE("no brackets -> error") {
        SimOptions nb = opt;
        nb.bracket_delta = 0.0;
        Trajectory t2 =
            simulate(rhs, cosine_state(g, 0.1, 0.05, Frame::SurfaceVelocity), 0.4,
                     nb, "b1", eps);
        CHECK_THROWS(trajectory_defect(t2, rhs));
    }
}

TEST_CASE("consistency_residual slope on a synthetic eps family") {
    // fabricate trajectories whose defect is exactly eps^2
    Grid g = Grid::line(16, 2.0 * pi);
    std::vector<std::pair<double, Trajectory>> family;
    for (double eps : {0.1, 0.05, 0.025}) {
        Trajectory t;
        t.model = "synthetic";
        t.eps = eps;
        Snapshot s;
        s.t = 0.0;
        s.state = cosine_state(g, 0.1, 0.0, Frame::SurfaceVelocity);
        s.delta = 1.0;  // (plus - minus)/2 = eps^2 * cos profile
        s.minus = s.state;
        s.plus = s.state;
        s.plus.eta += cosine_field(g, 2.0 * eps * eps, 1.0);
        t.snaps.push_back(s);
        family.emplace_back(eps, t);
    }
    auto target = [&](const WaveState& w, double) {
        WaveState d = w;
        d.eta = ScalarField(g);
        d.u = VectorField(g);
        return d;
    };
    ConsistencyReport rep = consistency_residual(family, target);
    REQUIRE(rep.eps.size() == 3);
    CHECK(rep.slope == doctest::Approx(2.0).epsilon(1e-6));

    std::ostringstream os;
    rep.write_csv(os);
    CHECK(os.str().find("epsilon,residual") != std::string::npos);
    CHECK(os.str().find("slope,") != std::string::npos);
}

TEST_CASE("btj round trip") {
    Grid g = Grid::line(16, 4.0);
    Trajectory t;
    t.model = "roundtrip";
    t.frame = Frame::Symmetrized;
    t.eps = 0.07;
    for (int k = 0; k < 3; ++k) {
        Snapshot s;
        s.t = 0.3 * k;
        s.state = cosine_state(g, 0.1 + 0.01 * k, 0.05, Frame::Symmetrized);
        t.snaps.push_back(s);
    }
    std::stringstream buf;
    write_btj(buf, t);
    Trajectory r = read_btj(buf);
    CHECK(r.model == t.model);
    CHECK(r.frame == t.frame);
    CHECK(r.eps == t.eps);
    REQUIRE(r.snaps.size() == 3);
    CHECK(r.snaps[1].t == doctest::Approx(0.3));
    CHECK(r.snaps[2].state.eta.grid == g);
    CHECK(max_norm(r.snaps[2].state.eta - t.snaps[2].state.eta) == 0.0);
    CHECK(max_norm(r.snaps[2].state.u - t.snaps[2].state.u) == 0.0);

    SUBCASE("corrupt magic rejected") {
        std::stringstream bad("nope");
        CHECK_THROWS(read_btj(bad));
    }
}

TEST_CASE("diagnostics csv and linear energy conservation") {
    Grid g = Grid::line(32, 2.0 * pi);
    ScalarField zero(g);
    Bathymetry bath(zero, Regime::SmallVariation);
    auto rhs = [&](const WaveState& w) { return rhs_b1(w, bath, 0.0); };
    SimOptions opt;
    opt.dt = 0.005;
    opt.snap_dt = 0.25;
    Trajectory traj =
        simulate(rhs, cosine_state(g, 0.1, 0.1, Frame::SurfaceVelocity), 1.0,
                 opt, "b1-linear", 0.0);
    std::ostringstream os;
    write_diagnostics_csv(os, traj);
    std::string out = os.str();
    CHECK(out.find("t,eta_l2,u_l2,energy") != std::string::npos);

    // at eps = 0 the b1 system is the linear wave equation with (1/3)Lap div:
    // quadratic energy is conserved by the flow (RK4 drift ~ dt^4)
    auto energy = [](const Snapshot& s) {
        double e = l2_norm(s.state.eta), u = l2_norm(s.state.u);
        return 0.5 * (e * e + u * u);
    };
    CHECK(std::abs(energy(traj.snaps.back()) - energy(traj.snaps.front())) < 1e-9);
}

TEST_CASE("map_states converts every snapshot and bracket") {
    Grid g = Grid::line(32, 2.0 * pi);
    Bathymetry bath(cosine_field(g, 0.1, 1.0), Regime::SmallVariation);
    auto rhs = [&](const WaveState& w) { return rhs_b1(w, bath, 0.1); };
    SimOptions opt;
    opt.dt = 0.01;
    opt.snap_dt = 0.2;
    opt.bracket_delta = 0.005;
    Trajectory traj =
        simulate(rhs, cosine_state(g, 0.1, 0.05, Frame::SurfaceVelocity), 0.4,
                 opt, "b1", 0.1);
    auto map = [](const WaveState& w) {
        WaveState out = w;
        out.eta = 2.0 * w.eta;
        return out;
    };
    Trajectory m = map_states(traj, map, Frame::Symmetrized, "b1-doubled");
    CHECK(m.model == "b1-doubled");
    CHECK(m.frame == Frame::Symmetrized);
    CHECK(max_norm(m.snaps[1].state.eta - 2.0 * traj.snaps[1].state.eta) == 0.0);
    CHECK(max_norm(m.snaps[1].plus.eta - 2.0 * traj.snaps[1].plus.eta) == 0.0);
    CHECK(m.snaps[1].state.frame == Frame::Symmetrized);
}

TEST_CASE("symmetric pipelines run and return surface-velocity frames") {
    Grid g = Grid::line(32, 2.0 * pi);
    const double eps = 0.1;
    SimOptions opt;
    opt.dt = 0.01;
    opt.snap_dt = 0.1;

    SUBCASE("small regime") {
        Bathymetry bath(cosine_field(g, 0.1, 1.0), Regime::SmallVariation);
        VectorField v0(g);
        v0.set_component(0, cosine_field(g, 0.05, 1.0, 0.3));
        SmallCoeffs sc = coeffs_small(std::sqrt(2.0 / 3.0), 0.5, 0.5);
        Trajectory t = build_approximate_solution(v0, cosine_field(g, 0.1, 1.0),
                                                  bath, eps, 0.2, sc, opt);
        CHECK(t.frame == Frame::SurfaceVelocity);
        CHECK(t.snaps.size() >= 2);
        CHECK(max_norm(t.snaps.back().state.eta) > 0.0);

        // non-symmetric coefficients are refused
        CHECK_THROWS(build_approximate_solution(v0, cosine_field(g, 0.1, 1.0), bath,
                                                eps, 0.2, coeffs_small(0.8, 0.3, 0.7),
                                                opt));
    }
    SUBCASE("strong regime") {
        Bathymetry bath(cosine_field(g, 0.15, 1.0), Regime::StrongVariation);
        VectorField v0(g);
        v0.set_component(0, cosine_field(g, 0.05, 1.0, 0.3));
        Trajectory t = build_approximate_solution_strong(
            v0, cosine_field(g, 0.1, 1.0), bath, eps, 0.2, opt);
        CHECK(t.frame == Frame::SurfaceVelocity);
        CHECK(t.snaps.size() >= 2);
        CHECK(max_norm(t.snaps.back().state.eta) > 0.0);
    }
}
