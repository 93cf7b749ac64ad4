// Command-line front end: every study is driven by a config file and writes
// deterministic CSV/SVG artifacts into the output directory.
#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "bt/config.hpp"
#include "bt/report.hpp"
#include "bt/sim.hpp"
#include "bt/spectral.hpp"

namespace fs = std::filesystem;
using namespace bt;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
}

Bathymetry make_bathymetry(const RunConfig& c, const Grid& g) {
    return Bathymetry(c.bathymetry.realize(g), c.regime_enum(), c.h_min);
}

// model dispatch for the `simulate` subcommand; the state is interpreted in
// the model's native frame
struct ModelChoice {
    RhsFn rhs;
    Frame frame;
};

ModelChoice pick_model(const RunConfig& c, const Bathymetry& bath) {
    const double eps = c.eps;
    if (c.model == "b1")
        return {[&bath, eps](const WaveState& s) { return rhs_b1(s, bath, eps); },
                Frame::SurfaceVelocity};
    if (c.model == "b2")
        return {[&bath, eps](const WaveState& s) { return rhs_b2(s, bath, eps); },
                Frame::SurfaceVelocity};
    if (c.model == "s1") {
        SmallCoeffs sc = coeffs_small(c.theta, c.lambda, c.mu);
        return {[&bath, eps, sc](const WaveState& s) { return rhs_s1(s, bath, eps, sc); },
                Frame::ThetaVelocity};
    }
    if (c.model == "t1") {
        SmallCoeffs sc = coeffs_small(c.theta, c.lambda, c.mu);
        return {[&bath, eps, sc](const WaveState& s) { return rhs_t1(s, bath, eps, sc); },
                Frame::Symmetrized};
    }
    if (c.model == "tb")
        return {[&bath, eps](const WaveState& s) { return rhs_tb(s, bath, eps); },
                Frame::Symmetrized};
    if (c.model == "s-strong") {
        StrongCoeffs sc = coeffs_strong(c.theta, c.lambda1, c.lambda2, c.mu);
        return {[&bath, eps, sc](const WaveState& s) {
                    return rhs_s_strong(s, bath, eps, sc);
                },
                Frame::ThetaVelocity};
    }
    throw std::invalid_argument("unknown model '" + c.model + "'");
}

void plot_study(const fs::path& dir, const std::string& name,
                const std::vector<double>& eps,
                const std::vector<std::vector<double>>& curves,
                const std::vector<std::string>& labels) {
    std::vector<PlotSeries> series;
    for (size_t i = 0; i < curves.size(); ++i)
        series.push_back({labels[i], eps, curves[i]});
    std::ofstream os = open_out(dir, name);
    write_svg_loglog(os, series, "convergence", "epsilon", "error");
}

int cmd_dn_verify(const RunConfig& c, const fs::path& out) {
    Grid g = c.make_grid();
    ScalarField eta = c.surface.realize(g);
    ScalarField b = c.bathymetry.realize(g);
    ScalarField f = c.data.realize(g);
    StudyReport rep = dn_convergence_study(eta, b, f, c.regime_enum(), c.eps_list,
                                           c.nz, c.expansion_order);
    {
        std::ofstream os = open_out(out, "dn_study.csv");
        rep.write_csv(os);
    }
    std::vector<double> e2, em;
    for (const auto& r : rep.rows) {
        e2.push_back(r.err_l2);
        em.push_back(r.err_max);
    }
    plot_study(out, "dn_study.svg", c.eps_list, {e2, em}, {"l2", "max"});
    std::cout << "dn-verify: slope_l2 = " << rep.slope_l2
              << " slope_max = " << rep.slope_max << "\n";
    return 0;
}

int cmd_symmetry_solve(const RunConfig& c, const fs::path& out) {
    SymmetricRootResult r = solve_symmetric_strong(c.guess);
    EpsilonBounds eb = epsilon_positivity_bounds(r.coeffs.theta, r.coeffs.lambda1,
                                                 r.coeffs.lambda2, r.coeffs.mu,
                                                 c.grad_h_norm);
    double resnorm = 0.0;
    for (double v : r.residual) resnorm = std::max(resnorm, std::abs(v));
    std::ofstream os = open_out(out, "symmetry_root.csv");
    os.precision(16);
    os << "theta,lambda1,lambda2,mu,residual,iterations,eps_bound1,eps_bound2\n"
       << r.coeffs.theta << ',' << r.coeffs.lambda1 << ',' << r.coeffs.lambda2
       << ',' << r.coeffs.mu << ',' << resnorm << ',' << r.iterations << ','
       << eb.bound1 << ',' << (eb.bound2_applies ? eb.bound2 : 0.0) << "\n";
    std::cout << "symmetry-solve: residual = " << resnorm << " after "
              << r.iterations << " iterations\n";
    return 0;
}

int cmd_simulate(const RunConfig& c, const fs::path& out) {
    Grid g = c.make_grid();
    Bathymetry bath = make_bathymetry(c, g);
    ModelChoice mc = pick_model(c, bath);
    VectorField u0(g);
    u0.set_component(0, c.data.realize(g));
    if (g.dim == 2) u0.set_component(1, ScalarField(g));
    WaveState s0(c.surface.realize(g), u0, mc.frame);
    SimOptions opt;
    opt.dt = c.dt;
    opt.snap_dt = c.snap_dt;
    Trajectory traj = simulate(mc.rhs, s0, c.horizon, opt, c.model, c.eps);
    {
        std::ofstream os(out / "trajectory.btj", std::ios::binary);
        if (!os) throw std::runtime_error("cannot write trajectory.btj");
        write_btj(os, traj);
    }
    {
        std::ofstream os = open_out(out, "diagnostics.csv");
        write_diagnostics_csv(os, traj);
    }
    {
        std::vector<double> x(g.n[0]);
        for (int i = 0; i < g.n[0]; ++i) x[i] = g.x(i);
        std::vector<PlotSeries> series;
        series.push_back({"eta(t=0)", x, traj.snaps.front().state.eta.v});
        series.push_back({"eta(t=T)", x, traj.snaps.back().state.eta.v});
        std::ofstream os = open_out(out, "surface.svg");
        write_svg_lines(os, series, "surface elevation", "x", "eta");
    }
    std::cout << "simulate: " << traj.snaps.size() << " snapshots, final |eta|_inf = "
              << max_norm(traj.snaps.back().state.eta) << "\n";
    return 0;
}

// reference family shared by `consistency` and `compare`
Trajectory run_reference(const RunConfig& c, const Grid& g, const Bathymetry& bath,
                         double eps, double horizon, bool brackets) {
    ReferenceState s0{c.data.realize(g), c.surface.realize(g)};
    SimOptions opt;
    opt.snap_dt = c.snap_dt > 0.0 ? c.snap_dt : horizon / 4.0;
    if (brackets) opt.bracket_delta = eps * eps / 20.0;
    double dt = c.dt > 0.0 ? c.dt : heuristic_dt(g, eps);
    return reference_run(s0, bath, eps, horizon, dt, c.nz, opt);
}

int cmd_consistency(const RunConfig& c, const fs::path& out) {
    Grid g = c.make_grid();
    Bathymetry bath = make_bathymetry(c, g);
    if (c.eps_list.size() < 3)
        throw std::invalid_argument("consistency needs >= 3 eps values");

    // optional randomized (lambda, mu) for the s1 target, seeded for determinism
    double lambda = c.lambda, mu = c.mu;
    if (c.target == "s1-random") {
        std::mt19937 rng(c.seed);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        lambda = unit(rng);
        mu = unit(rng);
    }

    std::vector<std::pair<double, Trajectory>> family;
    for (double eps : c.eps_list) {
        Trajectory ref = run_reference(c, g, bath, eps, c.horizon, true);
        if (c.target == "s1" || c.target == "s1-random") {
            // the target lives in the theta-velocity frame
            Trajectory mapped = map_states(
                ref,
                [&](const WaveState& s) {
                    WaveState o = s;
                    o.u = to_theta_frame_small(s.u, eps, c.theta);
                    o.frame = Frame::ThetaVelocity;
                    return o;
                },
                Frame::ThetaVelocity, "reference-theta");
            family.emplace_back(eps, std::move(mapped));
        } else {
            Trajectory mapped = map_states(
                ref,
                [](const WaveState& s) {
                    WaveState o = s;
                    o.frame = Frame::SurfaceVelocity;
                    return o;
                },
                Frame::SurfaceVelocity, "reference");
            family.emplace_back(eps, std::move(mapped));
        }
    }

    std::function<WaveState(const WaveState&, double)> target;
    if (c.target == "b1")
        target = [&](const WaveState& s, double eps) { return rhs_b1(s, bath, eps); };
    else if (c.target == "b2")
        target = [&](const WaveState& s, double eps) { return rhs_b2(s, bath, eps); };
    else if (c.target == "s1" || c.target == "s1-random") {
        SmallCoeffs sc = coeffs_small(c.theta, lambda, mu);
        target = [&bath, sc](const WaveState& s, double eps) {
            return rhs_s1(s, bath, eps, sc);
        };
    } else
        throw std::invalid_argument("unknown consistency target '" + c.target + "'");

    ConsistencyReport rep = consistency_residual(family, target);
    {
        std::ofstream os = open_out(out, "consistency.csv");
        rep.write_csv(os);
    }
    plot_study(out, "consistency.svg", rep.eps, {rep.residual}, {"residual"});
    std::cout << "consistency: slope = " << rep.slope << "\n";
    return 0;
}

int cmd_compare(const RunConfig& c, const fs::path& out) {
    Grid g = c.make_grid();
    Bathymetry bath = make_bathymetry(c, g);
    if (c.eps_list.size() < 3)
        throw std::invalid_argument("compare needs >= 3 eps values");
    const bool strong = c.regime_enum() == Regime::StrongVariation;

    std::vector<double> errs;
    for (double eps : c.eps_list) {
        Trajectory ref = run_reference(c, g, bath, eps, c.horizon, false);
        VectorField v0(g);
        v0.set_component(0, derivative(c.data.realize(g), 0));  // U0 = grad psi0
        ScalarField eta0 = c.surface.realize(g);
        SimOptions opt;
        opt.dt = c.dt;
        opt.snap_dt = c.snap_dt > 0.0 ? c.snap_dt : c.horizon / 4.0;
        Trajectory app =
            strong ? build_approximate_solution_strong(v0, eta0, bath, eps,
                                                       c.horizon, opt)
                   : build_approximate_solution(
                         v0, eta0, bath, eps, c.horizon,
                         coeffs_small(c.theta, c.lambda, c.mu), opt);
        const WaveState& a = ref.snaps.back().state;
        const WaveState& b = app.snaps.back().state;
        double err = std::hypot(l2_norm(a.eta - b.eta), l2_norm(a.u - b.u));
        errs.push_back(err);
    }
    double slope = fitted_slope(c.eps_list, errs);
    {
        std::ofstream os = open_out(out, "compare.csv");
        os.precision(16);
        os << "epsilon,err\n";
        for (size_t i = 0; i < errs.size(); ++i)
            os << c.eps_list[i] << ',' << errs[i] << "\n";
        os << "slope," << slope << "\n";
    }
    plot_study(out, "compare.svg", c.eps_list, {errs}, {"error"});
    std::cout << "compare: slope = " << slope << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"asymptotic water-wave model laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    for (const char* name :
         {"dn-verify", "symmetry-solve", "simulate", "consistency", "compare"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    RunConfig cfg;
    try {
        cfg = parse_config(read_file(config_path), sub);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        fs::create_directories(out_dir);
        if (sub == "dn-verify") return cmd_dn_verify(cfg, out_dir);
        if (sub == "symmetry-solve") return cmd_symmetry_solve(cfg, out_dir);
        if (sub == "simulate") return cmd_simulate(cfg, out_dir);
        if (sub == "consistency") return cmd_consistency(cfg, out_dir);
        if (sub == "compare") return cmd_compare(cfg, out_dir);
        std::cerr << "error: unknown subcommand\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
