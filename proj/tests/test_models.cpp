#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "bt/models.hpp"
#include "bt/spectral.hpp"
#include "jet.hpp"

using namespace bt;
using btt::D;
using btt::Jet;
using std::numbers::pi;

namespace {

// three-mode analytic test fields; the jet oracle re-derives them per point
struct ModeSum {
    struct Mode {
        double amp, wavenumber, phase;
    };
    std::vector<Mode> modes;

    double operator()(double x) const {
        double v = 0.0;
        for (const auto& m : modes) v += m.amp * std::cos(m.wavenumber * x + m.phase);
        return v;
    }
    Jet jet(double x) const {
        Jet j;
        for (const auto& m : modes)
            j = j + Jet::cosine(m.amp, m.wavenumber, x, m.phase);
        return j;
    }
    ScalarField realize(const Grid& g) const {
        ScalarField f(g);
        for (int i = 0; i < g.size(); ++i) f.v[i] = (*this)(g.x(i));
        return f;
    }
};

const ModeSum kEta{{{0.11, 1.0, 0.0}, {0.06, 2.0, 0.7}, {0.04, 3.0, -1.1}}};
const ModeSum kVel{{{0.09, 1.0, 0.4}, {0.07, 2.0, -0.3}, {0.05, 3.0, 2.0}}};
const ModeSum kBath{{{0.15, 1.0, 0.2}, {0.05, 2.0, 1.3}}};
const ModeSum kZero{{}};

WaveState make_state(const Grid& g, const ModeSum& eta, const ModeSum& vel,
                     Frame frame) {
    VectorField u(g);
    u.set_component(0, vel.realize(g));
    return WaveState(eta.realize(g), std::move(u), frame);
}

double max_err(const ScalarField& got, const std::function<double(double)>& want) {
    double worst = 0.0;
    for (int i = 0; i < got.grid.size(); ++i)
        worst = std::max(worst, std::abs(got.v[i] - want(got.grid.x(i))));
    return worst;
}

// shared jet-level pieces (d = 1)
struct JetFields {
    Jet eta, v, b, h;
};

JetFields jets_at(double x, const ModeSum& eta, const ModeSum& vel,
                  const ModeSum& bath) {
    JetFields f;
    f.eta = eta.jet(x);
    f.v = vel.jet(x);
    f.b = bath.jet(x);
    f.h = Jet::constant(1.0) - f.b;
    return f;
}

// the eta^2 term carries 1/2, not the 1/4 of the small-regime flux: the
// symmetrizing map contributes (eta/sqrt h) grad eta in full here (there is
// no bottom split absorbing half of it), and 1/2 is what matches the div-V
// coefficient of f_h under transposition
Jet Fh_jet(const JetFields& f) {
    const Jet sh = btt::sqrtj(f.h);
    Jet acc = 0.5 * D(f.eta * f.eta) + 0.5 * D(f.v * f.v) + f.v * D(f.v) +
              f.v * D(f.v);
    acc = acc + btt::inv(f.h) * (0.5 * (D(f.h) * f.v) * f.v -
                                 (f.v * f.v) * D(f.h));
    return btt::inv(sh) * acc;
}

Jet fh_jet(const JetFields& f) {
    const Jet sh = btt::sqrtj(f.h);
    Jet acc = D(f.eta * f.v) - 0.5 * (f.eta / f.h) * (D(f.h) * f.v);
    return btt::inv(sh) * acc;
}

}  // namespace

TEST_CASE("bathymetry construction") {
    Grid g = Grid::line(32, 2.0 * pi);
    CHECK_THROWS(Bathymetry(ModeSum{{{1.2, 1.0, 0.0}}}.realize(g),
                            Regime::StrongVariation));
    Bathymetry bath(kBath.realize(g), Regime::StrongVariation);
    CHECK(bath.h.v[0] == doctest::Approx(1.0 - bath.b.v[0]).epsilon(1e-15));
    CHECK(bath.grad_h_sup() > 0.0);
}

TEST_CASE("frame and regime discipline") {
    Grid g = Grid::line(32, 2.0 * pi);
    Bathymetry small(kBath.realize(g), Regime::SmallVariation);
    Bathymetry strong(kBath.realize(g), Regime::StrongVariation);
    WaveState sv = make_state(g, kEta, kVel, Frame::SurfaceVelocity);
    WaveState th = make_state(g, kEta, kVel, Frame::ThetaVelocity);
    SmallCoeffs c = coeffs_small(1.0, 1.0, 0.0);

    CHECK_THROWS(rhs_b1(th, small, 0.1));
    CHECK_THROWS(rhs_b1(sv, strong, 0.1));
    CHECK_THROWS(rhs_b2(sv, small, 0.1));
    CHECK_THROWS(rhs_s1(sv, small, 0.1, c));
    CHECK_THROWS(rhs_t1(sv, small, 0.1, c));
    CHECK_THROWS(rhs_tb(th, strong, 0.1));
    CHECK_THROWS(rhs_s_strong(sv, strong, 0.1,
                              coeffs_strong(0.6318, -0.3416, -2.8209, -3.1157)));
}

TEST_CASE("rest state is a fixed point of every model") {
    Grid g = Grid::line(32, 2.0 * pi);
    Bathymetry small(kBath.realize(g), Regime::SmallVariation);
    Bathymetry strong(kBath.realize(g), Regime::StrongVariation);
    SmallCoeffs c = coeffs_small(0.8, 0.3, 0.7);
    StrongCoeffs sc = solve_symmetric_strong(kSymmetricRootReference).coeffs;

    auto is_zero = [](const WaveState& d) {
        return max_norm(d.eta) < 1e-13 && max_norm(d.u) < 1e-13;
    };
    CHECK(is_zero(rhs_b1(make_state(g, kZero, kZero, Frame::SurfaceVelocity), small, 0.1)));
    CHECK(is_zero(rhs_b2(make_state(g, kZero, kZero, Frame::SurfaceVelocity), strong, 0.1)));
    CHECK(is_zero(rhs_s1(make_state(g, kZero, kZero, Frame::ThetaVelocity), small, 0.1, c)));
    CHECK(is_zero(rhs_t1(make_state(g, kZero, kZero, Frame::Symmetrized), small, 0.1, c)));
    CHECK(is_zero(rhs_tb(make_state(g, kZero, kZero, Frame::Symmetrized), strong, 0.1)));
    CHECK(is_zero(rhs_s_strong(make_state(g, kZero, kZero, Frame::ThetaVelocity),
                               strong, 0.05, sc)));
}

TEST_CASE("three-mode jet oracle: rhs_b1") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::SmallVariation);
    const double eps = 0.1;
    WaveState d = rhs_b1(make_state(g, kEta, kVel, Frame::SurfaceVelocity), bath, eps);

    auto dv = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        return -(D(f.eta) + (eps / 2.0) * D(f.v * f.v)).value();
    };
    auto de = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        Jet r = D(f.v) + eps * (D((f.eta - f.b) * f.v) + (1.0 / 3.0) * D(D(D(f.v))));
        return -r.value();
    };
    CHECK(max_err(d.u.component(0), dv) < 1e-11);
    CHECK(max_err(d.eta, de) < 1e-11);
}

TEST_CASE("three-mode jet oracle: rhs_b2") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::StrongVariation);
    const double eps = 0.1;
    WaveState d = rhs_b2(make_state(g, kEta, kVel, Frame::SurfaceVelocity), bath, eps);

    auto de = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        const Jet h3 = f.h * f.h * f.h;
        Jet bracket = (1.0 / 3.0) * h3 * D(D(f.v)) - (f.h * f.h) * D(D(f.h * f.v));
        Jet r = D(f.h * f.v) + eps * (D(f.eta * f.v) - 0.5 * D(bracket));
        return -r.value();
    };
    CHECK(max_err(d.eta, de) < 1e-11);
}

TEST_CASE("three-mode jet oracle: rhs_s1 through the forward mass operator") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::SmallVariation);
    const double eps = 0.1;
    SmallCoeffs c = coeffs_small(0.6, 0.4, 0.25);
    WaveState d = rhs_s1(make_state(g, kEta, kVel, Frame::ThetaVelocity), bath, eps, c);

    // (1 - eps a2 Lap)(-dV) must reproduce the explicit part
    ScalarField lhs_v =
        -1.0 * (d.u.component(0) - eps * c.a2 * fourier_laplacian(d.u.component(0)));
    ScalarField lhs_e = -1.0 * (d.eta - eps * c.a4 * fourier_laplacian(d.eta));

    auto ev = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        return (D(f.eta) + eps * (0.5 * D(f.v * f.v) + c.a1 * D(D(D(f.eta)))))
            .value();
    };
    auto ee = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        return (D(f.v) + eps * (D((f.eta - f.b) * f.v) + c.a3 * D(D(D(f.v)))))
            .value();
    };
    CHECK(max_err(lhs_v, ev) < 1e-11);
    CHECK(max_err(lhs_e, ee) < 1e-11);

    CHECK_THROWS(rhs_s1(make_state(g, kEta, kVel, Frame::ThetaVelocity), bath, eps,
                        coeffs_small(0.2, 0.5, 3.0)));  // a2 < 0
}

TEST_CASE("three-mode jet oracle: rhs_t1") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::SmallVariation);
    const double eps = 0.1;
    SmallCoeffs c = coeffs_small(std::sqrt(2.0 / 3.0), 0.5, 0.5);
    WaveState d = rhs_t1(make_state(g, kEta, kVel, Frame::Symmetrized), bath, eps, c);

    ScalarField lhs_v =
        -1.0 * (d.u.component(0) - eps * c.a2 * fourier_laplacian(d.u.component(0)));
    ScalarField lhs_e = -1.0 * (d.eta - eps * c.a4 * fourier_laplacian(d.eta));

    auto ev = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        Jet r = D(f.eta) +
                eps * (0.25 * D(f.eta * f.eta) + 0.25 * D(f.v * f.v) +
                       0.5 * (f.v * D(f.v)) + 0.5 * (f.v * D(f.v)) -
                       0.5 * (f.b * D(f.eta)) + c.a1 * D(D(D(f.eta))));
        return r.value();
    };
    auto ee = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        Jet r = D(f.v) +
                eps * (0.5 * D((f.eta - f.b) * f.v) + c.a3 * D(D(D(f.v))));
        return r.value();
    };
    CHECK(max_err(lhs_v, ev) < 1e-11);
    CHECK(max_err(lhs_e, ee) < 1e-11);
}

TEST_CASE("three-mode jet oracle: rhs_tb") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::StrongVariation);
    const double eps = 0.1;
    WaveState d = rhs_tb(make_state(g, kEta, kVel, Frame::Symmetrized), bath, eps);

    auto dv = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        return -(btt::sqrtj(f.h) * D(f.eta) + (eps / 2.0) * Fh_jet(f)).value();
    };
    auto de = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        const Jet sh = btt::sqrtj(f.h);
        const Jet h3 = f.h * f.h * f.h;
        Jet bracket = (1.0 / 3.0) * h3 * D(D(f.v / sh)) -
                      (f.h * f.h) * D(D(sh * f.v));
        Jet r = D(sh * f.v) + (eps / 2.0) * (fh_jet(f) - D(bracket));
        return -r.value();
    };
    CHECK(max_err(d.u.component(0), dv) < 1e-9);
    CHECK(max_err(d.eta, de) < 1e-9);
}

TEST_CASE("three-mode jet oracle: strong mass operators") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::StrongVariation);
    const double eps = 0.05;
    StrongCoeffs sc = coeffs_strong(0.6318, -0.3416, -2.8209, -3.1157);

    VectorField V(g);
    V.set_component(0, kVel.realize(g));
    VectorField mv = apply_mass_v_strong(V, bath, eps, sc);
    ScalarField me = apply_mass_eta_strong(kEta.realize(g), bath, eps, sc);

    auto want_v = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        Jet p = ((1.0 - sc.theta) * (1.0 - sc.lambda1) * (sc.theta + 1.0)) *
                    D(f.h * f.h * D(f.v)) +
                (2.0 * (1.0 - sc.theta) * (1.0 - sc.lambda2)) *
                    D(f.h * (D(f.h) * f.v));
        return (f.v - (eps / 2.0) * p).value();
    };
    auto want_e = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        const double t2 = sc.theta * sc.theta;
        Jet p = ((1.0 - sc.mu) * (t2 - 1.0 / 3.0)) * D(f.h * f.h * D(f.eta)) +
                ((1.0 - sc.mu) * (1.5 * t2 - 7.0 / 6.0)) *
                    D(f.h * (f.eta * D(f.h)));
        return (f.eta - (eps / 2.0) * p).value();
    };
    CHECK(max_err(mv.component(0), want_v) < 1e-10);
    CHECK(max_err(me, want_e) < 1e-10);
}

TEST_CASE("three-mode jet oracle: rhs_s_strong explicit part") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::StrongVariation);
    const double eps = 0.05;
    StrongCoeffs sc = solve_symmetric_strong(kSymmetricRootReference).coeffs;

    WaveState d =
        rhs_s_strong(make_state(g, kEta, kVel, Frame::ThetaVelocity), bath, eps, sc);
    // push the returned derivative back through the mass operators
    VectorField lhs_v = -1.0 * apply_mass_v_strong(d.u, bath, eps, sc);
    ScalarField lhs_e = -1.0 * apply_mass_eta_strong(d.eta, bath, eps, sc);

    auto ev = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        const Jet sh = btt::sqrtj(f.h);
        Jet disp = sc.b[0] * (sh * D(D(f.h * f.h * D(f.eta))));
        disp = disp + sc.b[1] * (sh * D(f.h * (D(f.h) * D(f.eta))));
        disp = disp + sc.b[2] * (D(f.h) * D(f.h * sh * D(f.eta)));
        disp = disp + sc.b[3] * (sh * D(f.h) * (D(f.h) * D(f.eta)));
        return (sh * D(f.eta) + (eps / 2.0) * (Fh_jet(f) + disp)).value();
    };
    auto ee = [&](double x) {
        JetFields f = jets_at(x, kEta, kVel, kBath);
        const Jet sh = btt::sqrtj(f.h);
        const Jet dsv = D(sh * f.v);
        Jet disp = sc.c[0] * D(f.h * f.h * D(dsv));
        disp = disp + sc.c[1] * D(f.h * D(f.h) * dsv);
        disp = disp + sc.c[2] * D(f.h * sh * D(D(f.h) * f.v));
        disp = disp - sc.c[3] * D(sh * D(f.h) * (D(f.h) * f.v));
        return (dsv + (eps / 2.0) * (fh_jet(f) + disp)).value();
    };
    CHECK(max_err(lhs_v.component(0), ev) < 1e-8);
    CHECK(max_err(lhs_e, ee) < 1e-8);
}

TEST_CASE("strong mass inversion agrees with the direct solver when h is flat") {
    Grid g = Grid::line(64, 2.0 * pi);
    ScalarField b_const(g);
    std::fill(b_const.v.begin(), b_const.v.end(), 0.3);
    Bathymetry bath(b_const, Regime::StrongVariation);
    const double eps = 0.1;
    StrongCoeffs sc = solve_symmetric_strong(kSymmetricRootReference).coeffs;

    // with grad h = 0 the mass operators reduce to 1 - c Lap
    const double h = 0.7;
    const double cv = (eps / 2.0) * (1.0 - sc.theta * sc.theta) *
                      (1.0 - sc.lambda1) * h * h;
    const double ce = (eps / 2.0) * (1.0 - sc.mu) *
                      (sc.theta * sc.theta - 1.0 / 3.0) * h * h;
    VectorField V(g);
    V.set_component(0, kVel.realize(g));
    ScalarField eta = kEta.realize(g);

    ScalarField mv = apply_mass_v_strong(V, bath, eps, sc).component(0);
    ScalarField me = apply_mass_eta_strong(eta, bath, eps, sc);
    CHECK(max_norm(mv - (V.component(0) - cv * fourier_laplacian(V.component(0)))) < 1e-10);
    CHECK(max_norm(me - (eta - ce * fourier_laplacian(eta))) < 1e-10);
    // and the constant-coefficient inverse undoes them exactly
    CHECK(max_norm(helmholtz_inverse(mv, cv) - V.component(0)) < 1e-10);
    CHECK(max_norm(helmholtz_inverse(me, ce) - eta) < 1e-10);
}

TEST_CASE("eps above the positivity bound is refused") {
    Grid g = Grid::line(64, 2.0 * pi);
    Bathymetry bath(ModeSum{{{0.5, 1.0, 0.0}}}.realize(g), Regime::StrongVariation);
    StrongCoeffs sc = solve_symmetric_strong(kSymmetricRootReference).coeffs;
    EpsilonBounds eb = epsilon_positivity_bounds(sc.theta, sc.lambda1, sc.lambda2,
                                                 sc.mu, bath.grad_h_sup());
    const double bound = std::min(eb.bound1, eb.bound2);
    CHECK_THROWS_WITH_AS(
        rhs_s_strong(make_state(g, kEta, kVel, Frame::ThetaVelocity), bath,
                     1.5 * bound, sc),
        doctest::Contains("positivity bound"), std::invalid_argument);
}

TEST_CASE("changes of variables") {
    Grid g = Grid::line(64, 2.0 * pi);
    ScalarField eta = kEta.realize(g);
    VectorField V(g);
    V.set_component(0, kVel.realize(g));
    ScalarField b = kBath.realize(g);
    Bathymetry bath(b, Regime::StrongVariation);

    SUBCASE("theta = 1 maps are the identity") {
        CHECK(max_norm(to_theta_frame_small(V, 0.1, 1.0) - V) < 1e-14);
        CHECK(max_norm(from_theta_frame_small(V, 0.1, 1.0) - V) < 1e-14);
        CHECK(max_norm(to_theta_frame_strong(V, bath, 0.1, 1.0) - V) < 1e-13);
        CHECK(max_norm(from_theta_frame_strong(V, bath, 0.1, 1.0) - V) < 1e-13);
    }
    SUBCASE("single-mode symbol of the small theta map") {
        ScalarField mode(g);
        for (int i = 0; i < g.size(); ++i) mode.v[i] = std::cos(3.0 * g.x(i));
        VectorField M(g);
        M.set_component(0, mode);
        const double eps = 0.1, theta = 0.5;
        VectorField out = to_theta_frame_small(M, eps, theta);
        const double symbol = 1.0 - (eps / 2.0) * (1.0 - theta * theta) * 9.0;
        CHECK(max_norm(out - symbol * M) < 1e-12);
    }
    SUBCASE("eps = 0 symmetrizations are the identity") {
        CHECK(max_norm(symmetrize_small(V, eta, b, 0.0) - V) < 1e-13);
        ScalarField h1(g);  // h = 1: strong map must reduce to multiplication by 1
        Bathymetry flat(h1, Regime::StrongVariation);
        CHECK(max_norm(symmetrize_strong(V, eta, flat, 0.0) - V) < 1e-13);
    }
    SUBCASE("eta = b makes the small symmetrization trivial") {
        CHECK(max_norm(symmetrize_small(V, b, b, 0.2) - V) < 1e-13);
    }
    SUBCASE("round trips are identity + O(eps^2), slope >= 1.7") {
        std::vector<double> eps{0.1, 0.05, 0.025};
        std::vector<std::vector<double>> errs(4);
        for (double e : eps) {
            errs[0].push_back(max_norm(
                from_theta_frame_small(to_theta_frame_small(V, e, 0.4), e, 0.4) - V));
            errs[1].push_back(
                max_norm(unsymmetrize_small(symmetrize_small(V, eta, b, e), eta, b, e) - V));
            errs[2].push_back(max_norm(
                unsymmetrize_strong(symmetrize_strong(V, eta, bath, e), eta, bath, e) - V));
            errs[3].push_back(max_norm(
                from_theta_frame_strong(to_theta_frame_strong(V, bath, e, 0.4), bath,
                                        e, 0.4) - V));
        }
        for (const auto& err : errs) CHECK(fitted_slope(eps, err) > 1.7);
    }
}

TEST_CASE("linearized symmetric small system has imaginary spectrum") {
    const int n = 32;
    Grid g = Grid::line(n, 2.0 * pi);
    Bathymetry bath(kBath.realize(g), Regime::SmallVariation);
    SmallCoeffs c = coeffs_small(std::sqrt(2.0 / 3.0), 0.5, 0.5);
    REQUIRE(is_symmetric_small(c));
    const double eps = 0.1;

    // linear part extracted exactly as the odd part of the quadratic rhs
    auto lin = [&](const Eigen::VectorXd& x) {
        ScalarField eta(g);
        VectorField u(g);
        for (int i = 0; i < n; ++i) {
            eta.v[i] = x[i];
            u.comp[0][i] = x[n + i];
        }
        WaveState plus = rhs_t1(WaveState(eta, u, Frame::Symmetrized), bath, eps, c);
        eta *= -1.0;
        u *= -1.0;
        WaveState minus = rhs_t1(WaveState(eta, u, Frame::Symmetrized), bath, eps, c);
        Eigen::VectorXd out(2 * n);
        for (int i = 0; i < n; ++i) {
            out[i] = 0.5 * (plus.eta.v[i] - minus.eta.v[i]);
            out[n + i] = 0.5 * (plus.u.comp[0][i] - minus.u.comp[0][i]);
        }
        return out;
    };

    Eigen::MatrixXd A(2 * n, 2 * n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(2 * n);
    for (int j = 0; j < 2 * n; ++j) {
        e[j] = 1.0;
        A.col(j) = lin(e);
        e[j] = 0.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(A);
    double worst = 0.0;
    for (int i = 0; i < 2 * n; ++i)
        worst = std::max(worst, std::abs(es.eigenvalues()[i].real()));
    CHECK(worst <= 1e-8);
}
