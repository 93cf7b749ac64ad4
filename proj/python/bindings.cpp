// Python surface: 1D fields as float64 numpy arrays on a periodic grid of
// the given length; trajectories come back as dicts of stacked arrays.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <stdexcept>

#include "bt/coeffs.hpp"
#include "bt/dn.hpp"
#include "bt/models.hpp"
#include "bt/sim.hpp"
#include "bt/spectral.hpp"

namespace py = pybind11;
using namespace bt;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField as_field(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                     double length) {
    if (a.ndim() != 1) throw std::invalid_argument("expected a 1D array");
    Grid g = Grid::line(static_cast<int>(a.shape(0)), length);
    ScalarField f(g);
    auto r = a.unchecked<1>();
    for (int i = 0; i < g.size(); ++i) f.v[i] = r(i);
    return f;
}

py::array_t<double> as_array(const ScalarField& f) {
    py::array_t<double> out(f.grid.size());
    auto w = out.mutable_unchecked<1>();
    for (int i = 0; i < f.grid.size(); ++i) w(i) = f.v[i];
    return out;
}

Regime parse_regime(const std::string& name) {
    if (name == "small") return Regime::SmallVariation;
    if (name == "strong") return Regime::StrongVariation;
    throw std::invalid_argument("regime must be 'small' or 'strong'");
}

py::dict trajectory_dict(const Trajectory& traj) {
    const size_t ns = traj.snaps.size();
    const int n = ns ? traj.snaps[0].state.eta.grid.size() : 0;
    py::array_t<double> t(ns), eta({ns, size_t(n)}), u({ns, size_t(n)});
    auto wt = t.mutable_unchecked<1>();
    auto we = eta.mutable_unchecked<2>();
    auto wu = u.mutable_unchecked<2>();
    for (size_t s = 0; s < ns; ++s) {
        wt(s) = traj.snaps[s].t;
        for (int i = 0; i < n; ++i) {
            we(s, i) = traj.snaps[s].state.eta.v[i];
            wu(s, i) = traj.snaps[s].state.u.comp[0][i];
        }
    }
    py::dict d;
    d["t"] = t;
    d["eta"] = eta;
    d["u"] = u;
    d["model"] = traj.model;
    d["frame"] = frame_name(traj.frame);
    d["eps"] = traj.eps;
    return d;
}

}  // namespace

PYBIND11_MODULE(boussitopo_py, m) {
    m.doc() = "long-wave water-wave models over uneven bottoms";

    m.def(
        "exact_dn",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f,
           py::array_t<double, py::array::c_style | py::array::forcecast> eta,
           py::array_t<double, py::array::c_style | py::array::forcecast> b,
           double eps, const std::string& regime, int nz, double length,
           double h_min) {
            ScalarField ff = as_field(f, length);
            RegimeParams params(eps, parse_regime(regime), h_min);
            StripGrid strip(ff.grid, nz);
            return as_array(
                exact_dn(ff, as_field(eta, length), as_field(b, length), params, strip));
        },
        py::arg("f"), py::arg("eta"), py::arg("b"), py::arg("eps"),
        py::arg("regime") = "small", py::arg("nz") = 65, py::arg("length") = kTwoPi,
        py::arg("h_min") = 0.05,
        "Exact Dirichlet-Neumann value via the strip solve.");

    m.def(
        "dn_expansion",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> f,
           py::array_t<double, py::array::c_style | py::array::forcecast> eta,
           py::array_t<double, py::array::c_style | py::array::forcecast> b,
           double eps, const std::string& regime, double length) {
            ScalarField ff = as_field(f, length);
            ScalarField ee = as_field(eta, length);
            ScalarField bb = as_field(b, length);
            return as_array(parse_regime(regime) == Regime::SmallVariation
                                ? dn_expansion_small(ff, ee, bb, eps)
                                : dn_expansion_strong(ff, ee, bb, eps));
        },
        py::arg("f"), py::arg("eta"), py::arg("b"), py::arg("eps"),
        py::arg("regime") = "small", py::arg("length") = kTwoPi,
        "Second-order asymptotic expansion of the Dirichlet-Neumann operator.");

    m.def(
        "coeffs_small",
        [](double theta, double lambda, double mu) {
            SmallCoeffs c = coeffs_small(theta, lambda, mu);
            py::dict d;
            d["theta"] = c.theta;
            d["lambda"] = c.lambda;
            d["mu"] = c.mu;
            d["a1"] = c.a1;
            d["a2"] = c.a2;
            d["a3"] = c.a3;
            d["a4"] = c.a4;
            d["symmetric"] = is_symmetric_small(c);
            return d;
        },
        py::arg("theta"), py::arg("lambda"), py::arg("mu"),
        "Dispersive coefficients of the small-variation family member.");

    m.def(
        "symmetric_root",
        [](std::array<double, 4> guess) {
            SymmetricRootResult r = solve_symmetric_strong(guess);
            py::dict d;
            d["theta"] = r.coeffs.theta;
            d["lambda1"] = r.coeffs.lambda1;
            d["lambda2"] = r.coeffs.lambda2;
            d["mu"] = r.coeffs.mu;
            d["b"] = r.coeffs.b;
            d["c"] = r.coeffs.c;
            d["residual"] = r.residual;
            d["iterations"] = r.iterations;
            d["theta_in_range"] = r.theta_in_range;
            return d;
        },
        py::arg("guess") = kSymmetricRootReference,
        "Newton solve for the fully symmetric strong-regime parameters.");

    m.def(
        "positivity_bounds",
        [](double theta, double lambda1, double lambda2, double mu,
           double grad_h_norm) {
            EpsilonBounds eb =
                epsilon_positivity_bounds(theta, lambda1, lambda2, mu, grad_h_norm);
            py::dict d;
            d["bound1"] = eb.bound1;
            d["bound2"] = eb.bound2;
            d["bound2_applies"] = eb.bound2_applies;
            return d;
        },
        py::arg("theta"), py::arg("lambda1"), py::arg("lambda2"), py::arg("mu"),
        py::arg("grad_h_norm"),
        "Largest epsilon keeping the strong-regime mass operators positive.");

    m.def(
        "reference_run",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> psi0,
           py::array_t<double, py::array::c_style | py::array::forcecast> eta0,
           py::array_t<double, py::array::c_style | py::array::forcecast> b,
           double eps, const std::string& regime, double horizon, double dt, int nz,
           double snap_dt, double length) {
            ScalarField psi = as_field(psi0, length);
            Bathymetry bath(as_field(b, length), parse_regime(regime));
            SimOptions opt;
            opt.snap_dt = snap_dt;
            if (dt <= 0.0) dt = heuristic_dt(psi.grid, eps);
            return trajectory_dict(reference_run({psi, as_field(eta0, length)}, bath,
                                                 eps, horizon, dt, nz, opt));
        },
        py::arg("psi0"), py::arg("eta0"), py::arg("b"), py::arg("eps"),
        py::arg("regime") = "small", py::arg("horizon") = 1.0, py::arg("dt") = 0.0,
        py::arg("nz") = 65, py::arg("snap_dt") = 0.0, py::arg("length") = kTwoPi,
        "Exact water-wave run; recorded u is the surface-potential gradient.");

    m.def(
        "approximate_solution",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> v0,
           py::array_t<double, py::array::c_style | py::array::forcecast> eta0,
           py::array_t<double, py::array::c_style | py::array::forcecast> b,
           double eps, const std::string& regime, double horizon, double theta,
           double lambda, double mu, double dt, double snap_dt, double length) {
            ScalarField e0 = as_field(eta0, length);
            Bathymetry bath(as_field(b, length), parse_regime(regime));
            VectorField vv(e0.grid);
            vv.set_component(0, as_field(v0, length));
            SimOptions opt;
            opt.dt = dt;
            opt.snap_dt = snap_dt;
            Trajectory traj =
                bath.regime == Regime::StrongVariation
                    ? build_approximate_solution_strong(vv, e0, bath, eps, horizon, opt)
                    : build_approximate_solution(vv, e0, bath, eps, horizon,
                                                 coeffs_small(theta, lambda, mu), opt);
            return trajectory_dict(traj);
        },
        py::arg("v0"), py::arg("eta0"), py::arg("b"), py::arg("eps"),
        py::arg("regime") = "small", py::arg("horizon") = 1.0,
        py::arg("theta") = 0.816496580927726, py::arg("lambda") = 0.5,
        py::arg("mu") = 0.5, py::arg("dt") = 0.0, py::arg("snap_dt") = 0.0,
        py::arg("length") = kTwoPi,
        "Symmetric-model pipeline: forward maps, simulation, inverse maps.");

    m.def(
        "symmetrize",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> v,
           py::array_t<double, py::array::c_style | py::array::forcecast> eta,
           py::array_t<double, py::array::c_style | py::array::forcecast> b,
           double eps, const std::string& regime, double length) {
            ScalarField e = as_field(eta, length);
            VectorField vv(e.grid);
            vv.set_component(0, as_field(v, length));
            if (parse_regime(regime) == Regime::SmallVariation)
                return as_array(
                    symmetrize_small(vv, e, as_field(b, length), eps).component(0));
            Bathymetry bath(as_field(b, length), Regime::StrongVariation);
            return as_array(symmetrize_strong(vv, e, bath, eps).component(0));
        },
        py::arg("v"), py::arg("eta"), py::arg("b"), py::arg("eps"),
        py::arg("regime") = "small", py::arg("length") = kTwoPi,
        "Symmetrizing change of the velocity variable.");

    m.def(
        "heuristic_dt",
        [](int n, double eps, double length) {
            return heuristic_dt(Grid::line(n, length), eps);
        },
        py::arg("n"), py::arg("eps"), py::arg("length") = kTwoPi,
        "Stability-heuristic explicit step size.");
}
