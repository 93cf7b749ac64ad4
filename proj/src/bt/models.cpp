#include "bt/models.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "bt/spectral.hpp"

namespace bt {

const char* frame_name(Frame f) {
    switch (f) {
        case Frame::SurfaceVelocity: return "surface-velocity";
        case Frame::ThetaVelocity: return "theta-velocity";
        case Frame::Symmetrized: return "symmetrized";
        case Frame::Potential: return "potential-gradient";
    }
    return "?";
}

WaveState::WaveState(ScalarField eta_, VectorField u_, Frame frame_)
    : eta(std::move(eta_)), u(std::move(u_)), frame(frame_) {
    if (!(eta.grid == u.grid))
        throw std::invalid_argument("WaveState: eta and velocity grids differ");
}

Bathymetry::Bathymetry(ScalarField b_, Regime regime_, double h_min_)
    : b(std::move(b_)), h(b.grid), regime(regime_), h_min(h_min_) {
    if (h_min <= 0.0) throw std::invalid_argument("Bathymetry: h_min <= 0");
    double worst = 1e300;
    int worst_i = 0;
    for (int i = 0; i < b.grid.size(); ++i) {
        h.v[i] = 1.0 - b.v[i];
        if (h.v[i] < worst) {
            worst = h.v[i];
            worst_i = i;
        }
    }
    if (worst < h_min) {
        std::ostringstream os;
        os << "Bathymetry: still-water depth h = " << worst << " < h_min = " << h_min
           << " at node " << worst_i;
        throw std::invalid_argument(os.str());
    }
}

double Bathymetry::grad_h_sup() const { return grad_sup_norm(h); }

namespace {

void require_frame(const WaveState& s, Frame want, const char* who) {
    if (s.frame != want)
        throw std::invalid_argument(std::string(who) + ": state is in the " +
                                    frame_name(s.frame) + " frame, expected " +
                                    frame_name(want));
}

void require_regime(const Bathymetry& bath, Regime want, const char* who) {
    if (bath.regime != want)
        throw std::invalid_argument(
            std::string(who) + ": bathymetry regime tag does not match the model");
}

ScalarField grad_div(const VectorField& v, int axis) {
    return derivative(fourier_div(v), axis);
}

VectorField grad_of(const ScalarField& f) { return fourier_grad(f); }

// (V . grad) V
VectorField advect(const VectorField& v) {
    VectorField out(v.grid);
    for (int a = 0; a < v.grid.dim; ++a) {
        ScalarField comp = v.component(a);
        ScalarField acc(v.grid);
        for (int bx = 0; bx < v.grid.dim; ++bx)
            acc += product(v.component(bx), derivative(comp, bx));
        out.set_component(a, acc);
    }
    return out;
}

ScalarField pointwise_map(const ScalarField& f, const std::function<double(double)>& m) {
    ScalarField out(f.grid);
    for (int i = 0; i < f.grid.size(); ++i) out.v[i] = m(f.v[i]);
    return out;
}

// Hand-rolled BiCGSTAB on flat vectors; the strong-regime mass operators are
// positive but not symmetric, so plain CG is not applicable.
std::vector<double> bicgstab(
    const std::function<std::vector<double>(const std::vector<double>&)>& apply,
    const std::function<std::vector<double>(const std::vector<double>&)>& precond,
    const std::vector<double>& rhs, double rel_tol, int max_iter,
    const char* who) {
    const size_t n = rhs.size();
    auto dotv = [n](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };
    const double rhs_norm = std::sqrt(dotv(rhs, rhs));
    if (rhs_norm == 0.0) return std::vector<double>(n, 0.0);

    std::vector<double> x(n, 0.0), r = rhs;
    std::vector<double> r0 = r, p = r, v(n, 0.0), s(n), t(n);
    double rho = dotv(r0, r);

    for (int it = 0; it < max_iter; ++it) {
        std::vector<double> ph = precond(p);
        v = apply(ph);
        const double alpha = rho / dotv(r0, v);
        for (size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
        if (std::sqrt(dotv(s, s)) <= rel_tol * rhs_norm) {
            for (size_t i = 0; i < n; ++i) x[i] += alpha * ph[i];
            return x;
        }
        std::vector<double> sh = precond(s);
        t = apply(sh);
        const double omega = dotv(t, s) / dotv(t, t);
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * ph[i] + omega * sh[i];
            r[i] = s[i] - omega * t[i];
        }
        if (std::sqrt(dotv(r, r)) <= rel_tol * rhs_norm) return x;
        const double rho_new = dotv(r0, r);
        const double beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for (size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        if (!std::isfinite(rho))
            throw std::runtime_error(std::string(who) + ": iteration broke down");
    }
    throw std::runtime_error(std::string(who) +
                             ": mass-operator solve did not reach tolerance");
}

std::vector<double> flatten(const VectorField& v) {
    std::vector<double> out;
    for (int a = 0; a < v.grid.dim; ++a)
        out.insert(out.end(), v.comp[a].begin(), v.comp[a].end());
    return out;
}

VectorField unflatten(const Grid& g, const std::vector<double>& x) {
    VectorField v(g);
    for (int a = 0; a < g.dim; ++a)
        std::copy(x.begin() + a * g.size(), x.begin() + (a + 1) * g.size(),
                  v.comp[a].begin());
    return v;
}

void check_eps_bounds(const Bathymetry& bath, double eps, const StrongCoeffs& sc,
                      const char* who) {
    EpsilonBounds eb = epsilon_positivity_bounds(sc.theta, sc.lambda1, sc.lambda2,
                                                 sc.mu, bath.grad_h_sup());
    double bound = eb.bound1;
    if (eb.bound2_applies) bound = std::min(bound, eb.bound2);
    if (eps > bound) {
        std::ostringstream os;
        os << who << ": eps = " << eps
           << " exceeds the mass-operator positivity bound " << bound;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

WaveState rhs_b1(const WaveState& s, const Bathymetry& bath, double eps) {
    require_frame(s, Frame::SurfaceVelocity, "rhs_b1");
    require_regime(bath, Regime::SmallVariation, "rhs_b1");
    const ScalarField& eta = s.eta;
    const VectorField& v = s.u;

    VectorField dv = grad_of(eta) + (eps / 2.0) * grad_of(dot(v, v));
    ScalarField deta = fourier_div(v) +
                       eps * (fourier_div(product(eta - bath.b, v)) +
                              (1.0 / 3.0) * fourier_laplacian(fourier_div(v)));
    dv *= -1.0;
    deta *= -1.0;
    return WaveState(std::move(deta), std::move(dv), s.frame);
}

WaveState rhs_b2(const WaveState& s, const Bathymetry& bath, double eps) {
    require_frame(s, Frame::SurfaceVelocity, "rhs_b2");
    require_regime(bath, Regime::StrongVariation, "rhs_b2");
    const ScalarField& eta = s.eta;
    const VectorField& v = s.u;
    const ScalarField& h = bath.h;
    const ScalarField h2 = product(h, h);
    const ScalarField h3 = product(h2, h);

    VectorField dv = grad_of(eta) + (eps / 2.0) * grad_of(dot(v, v));

    VectorField bracket = product((1.0 / 3.0) * h3, grad_of(fourier_div(v)));
    bracket -= product(h2, grad_of(fourier_div(product(h, v))));
    ScalarField deta = fourier_div(product(h, v)) +
                       eps * (fourier_div(product(eta, v)) -
                              0.5 * fourier_div(bracket));
    dv *= -1.0;
    deta *= -1.0;
    return WaveState(std::move(deta), std::move(dv), s.frame);
}

WaveState rhs_s1(const WaveState& s, const Bathymetry& bath, double eps,
                 const SmallCoeffs& c) {
    require_frame(s, Frame::ThetaVelocity, "rhs_s1");
    require_regime(bath, Regime::SmallVariation, "rhs_s1");
    if (c.a2 < -1e-14 || c.a4 < -1e-14)
        throw std::invalid_argument(
            "rhs_s1: negative mass coefficients a2/a4 make (1-eps a Lap) "
            "non-invertible on this branch");
    const ScalarField& eta = s.eta;
    const VectorField& v = s.u;

    VectorField ev = grad_of(eta);
    ev += (eps / 2.0) * grad_of(dot(v, v));
    ev += (eps * c.a1) * grad_of(fourier_laplacian(eta));

    ScalarField ee = fourier_div(v);
    ee += eps * fourier_div(product(eta - bath.b, v));
    ee += (eps * c.a3) * fourier_laplacian(fourier_div(v));

    VectorField dv(v.grid);
    for (int a = 0; a < v.grid.dim; ++a)
        dv.set_component(a, helmholtz_inverse(ev.component(a),
                                              eps * std::max(c.a2, 0.0)));
    ScalarField deta = helmholtz_inverse(ee, eps * std::max(c.a4, 0.0));
    dv *= -1.0;
    deta *= -1.0;
    return WaveState(std::move(deta), std::move(dv), s.frame);
}

WaveState rhs_t1(const WaveState& s, const Bathymetry& bath, double eps,
                 const SmallCoeffs& c) {
    require_frame(s, Frame::Symmetrized, "rhs_t1");
    require_regime(bath, Regime::SmallVariation, "rhs_t1");
    if (c.a2 < -1e-14 || c.a4 < -1e-14)
        throw std::invalid_argument("rhs_t1: negative mass coefficients a2/a4");
    const ScalarField& eta = s.eta;
    const VectorField& v = s.u;

    VectorField ev = grad_of(eta);
    ev += (eps / 4.0) * grad_of(product(eta, eta));
    ev += (eps / 4.0) * grad_of(dot(v, v));
    ev += (eps / 2.0) * advect(v);
    ev += (eps / 2.0) * product(fourier_div(v), v);
    ev -= (eps / 2.0) * product(bath.b, grad_of(eta));
    ev += (eps * c.a1) * grad_of(fourier_laplacian(eta));

    ScalarField ee = fourier_div(v);
    ee += (eps / 2.0) * fourier_div(product(eta - bath.b, v));
    ee += (eps * c.a3) * fourier_laplacian(fourier_div(v));

    VectorField dv(v.grid);
    for (int a = 0; a < v.grid.dim; ++a)
        dv.set_component(a, helmholtz_inverse(ev.component(a),
                                              eps * std::max(c.a2, 0.0)));
    ScalarField deta = helmholtz_inverse(ee, eps * std::max(c.a4, 0.0));
    dv *= -1.0;
    deta *= -1.0;
    return WaveState(std::move(deta), std::move(dv), s.frame);
}

namespace {

// F_h = (1/sqrt h)( (1/2)grad eta^2 + (1/2)grad|V|^2 + (V.grad)V + V div V
//                   + (1/h)((1/2)(grad h . V)V - |V|^2 grad h) )
// The eta^2 coefficient is the one produced by pushing the mass-equation
// leading order through the symmetrizing map ((eps/2)(eta/sqrt h) d_t V with
// d_t V = -grad eta), and it is the choice that makes the quadratic part
// symmetric: the grad-eta coefficient in this equation then equals the
// div-V coefficient of f_h in the mass equation.
VectorField strong_Fh(const VectorField& v, const ScalarField& eta,
                      const Bathymetry& bath) {
    const ScalarField inv_sqrt_h =
        pointwise_map(bath.h, [](double x) { return 1.0 / std::sqrt(x); });
    const ScalarField inv_h = pointwise_map(bath.h, [](double x) { return 1.0 / x; });
    const VectorField gh = fourier_grad(bath.h);

    VectorField acc = 0.5 * grad_of(product(eta, eta));
    acc += 0.5 * grad_of(dot(v, v));
    acc += advect(v);
    acc += product(fourier_div(v), v);
    VectorField inner = 0.5 * product(dot(gh, v), v);
    inner -= product(dot(v, v), gh);
    acc += product(inv_h, inner);
    return product(inv_sqrt_h, acc);
}

// f_h = (1/sqrt h)( div(eta V) - (eta/(2h)) grad h . V )
ScalarField strong_fh(const VectorField& v, const ScalarField& eta,
                      const Bathymetry& bath) {
    const ScalarField inv_sqrt_h =
        pointwise_map(bath.h, [](double x) { return 1.0 / std::sqrt(x); });
    const ScalarField inv_h = pointwise_map(bath.h, [](double x) { return 1.0 / x; });
    ScalarField acc = fourier_div(product(eta, v));
    acc -= 0.5 * product(product(eta, inv_h), dot(fourier_grad(bath.h), v));
    return product(inv_sqrt_h, acc);
}

}  // namespace

WaveState rhs_tb(const WaveState& s, const Bathymetry& bath, double eps) {
    require_frame(s, Frame::Symmetrized, "rhs_tb");
    require_regime(bath, Regime::StrongVariation, "rhs_tb");
    const ScalarField& eta = s.eta;
    const VectorField& v = s.u;
    const ScalarField& h = bath.h;
    const ScalarField sqrt_h = pointwise_map(h, [](double x) { return std::sqrt(x); });
    const ScalarField inv_sqrt_h =
        pointwise_map(h, [](double x) { return 1.0 / std::sqrt(x); });
    const ScalarField h2 = product(h, h);
    const ScalarField h3 = product(h2, h);

    VectorField dv = product(sqrt_h, grad_of(eta));
    dv += (eps / 2.0) * strong_Fh(v, eta, bath);

    VectorField bracket =
        product((1.0 / 3.0) * h3, grad_of(fourier_div(product(inv_sqrt_h, v))));
    bracket -= product(h2, grad_of(fourier_div(product(sqrt_h, v))));
    ScalarField deta = fourier_div(product(sqrt_h, v));
    deta += (eps / 2.0) * (strong_fh(v, eta, bath) - fourier_div(bracket));

    dv *= -1.0;
    deta *= -1.0;
    return WaveState(std::move(deta), std::move(dv), s.frame);
}

VectorField apply_mass_v_strong(const VectorField& v, const Bathymetry& bath,
                                double eps, const StrongCoeffs& sc) {
    const ScalarField h2 = product(bath.h, bath.h);
    const VectorField gh = fourier_grad(bath.h);
    const double theta = sc.theta;

    VectorField p = ((1.0 - theta) * (1.0 - sc.lambda1) * (theta + 1.0)) *
                    grad_of(product(h2, fourier_div(v)));
    p += (2.0 * (1.0 - theta) * (1.0 - sc.lambda2)) *
         grad_of(product(bath.h, dot(gh, v)));
    VectorField out = v;
    out -= (eps / 2.0) * p;
    return out;
}

ScalarField apply_mass_eta_strong(const ScalarField& eta, const Bathymetry& bath,
                                  double eps, const StrongCoeffs& sc) {
    const ScalarField h2 = product(bath.h, bath.h);
    const VectorField gh = fourier_grad(bath.h);
    const double t2 = sc.theta * sc.theta;

    ScalarField p = ((1.0 - sc.mu) * (t2 - 1.0 / 3.0)) *
                    fourier_div(product(h2, fourier_grad(eta)));
    p += ((1.0 - sc.mu) * (1.5 * t2 - 7.0 / 6.0)) *
         fourier_div(product(bath.h, product(eta, gh)));
    ScalarField out = eta;
    out -= (eps / 2.0) * p;
    return out;
}

WaveState rhs_s_strong(const WaveState& s, const Bathymetry& bath, double eps,
                       const StrongCoeffs& sc) {
    require_frame(s, Frame::ThetaVelocity, "rhs_s_strong");
    require_regime(bath, Regime::StrongVariation, "rhs_s_strong");
    check_eps_bounds(bath, eps, sc, "rhs_s_strong");

    const ScalarField& eta = s.eta;
    const VectorField& v = s.u;
    const ScalarField& h = bath.h;
    const ScalarField sqrt_h = pointwise_map(h, [](double x) { return std::sqrt(x); });
    const ScalarField h2 = product(h, h);
    const ScalarField h_sqrt_h = product(h, sqrt_h);
    const VectorField gh = fourier_grad(h);
    const VectorField geta = grad_of(eta);

    // velocity equation, explicit part
    VectorField ev = product(sqrt_h, geta);
    {
        VectorField disp =
            sc.b[0] * product(sqrt_h, grad_of(fourier_div(product(h2, geta))));
        disp += sc.b[1] * product(sqrt_h, grad_of(product(h, dot(gh, geta))));
        disp += sc.b[2] *
                product(fourier_div(product(h_sqrt_h, geta)), gh);
        disp += sc.b[3] * product(product(sqrt_h, dot(gh, geta)), gh);
        ev += (eps / 2.0) * (strong_Fh(v, eta, bath) + disp);
    }

    // surface equation, explicit part
    const VectorField shv = product(sqrt_h, v);
    ScalarField ee = fourier_div(shv);
    {
        ScalarField div_shv = fourier_div(shv);
        ScalarField disp =
            sc.c[0] * fourier_div(product(h2, grad_of(div_shv)));
        disp += sc.c[1] * fourier_div(product(product(h, div_shv), gh));
        disp += sc.c[2] * fourier_div(product(h_sqrt_h, grad_of(dot(gh, v))));
        // the c4 term enters with a minus sign: pushing the change of frame
        // through the mass equation produces -c4, and at the symmetric root
        // (where b4 = -c4) this is also the sign that pairs the term with its
        // b4 counterpart as an adjoint
        disp -= sc.c[3] * fourier_div(product(product(sqrt_h, dot(gh, v)), gh));
        ee += (eps / 2.0) * (strong_fh(v, eta, bath) + disp);
    }

    // invert the mass operators (positive but non-symmetric), preconditioned
    // by the constant-coefficient symbol at the mean depth
    const double h_mean = mean(h);
    const double cv = (eps / 2.0) * (1.0 - sc.theta * sc.theta) *
                      (1.0 - sc.lambda1) * h_mean * h_mean;
    const double ce = (eps / 2.0) * (1.0 - sc.mu) *
                      (sc.theta * sc.theta - 1.0 / 3.0) * h_mean * h_mean;
    const Grid& g = v.grid;

    auto apply_v = [&](const std::vector<double>& x) {
        return flatten(apply_mass_v_strong(unflatten(g, x), bath, eps, sc));
    };
    auto precond_v = [&](const std::vector<double>& x) {
        VectorField w = unflatten(g, x);
        if (cv > 0.0)
            for (int a = 0; a < g.dim; ++a)
                w.set_component(a, helmholtz_inverse(w.component(a), cv));
        return flatten(w);
    };
    auto apply_e = [&](const std::vector<double>& x) {
        ScalarField w(g, x);
        return apply_mass_eta_strong(w, bath, eps, sc).v;
    };
    auto precond_e = [&](const std::vector<double>& x) {
        ScalarField w(g, x);
        return ce > 0.0 ? helmholtz_inverse(w, ce).v : w.v;
    };

    VectorField dv = unflatten(
        g, bicgstab(apply_v, precond_v, flatten(ev), 1e-10, 400, "rhs_s_strong[V]"));
    ScalarField deta(
        g, bicgstab(apply_e, precond_e, ee.v, 1e-10, 400, "rhs_s_strong[eta]"));

    dv *= -1.0;
    deta *= -1.0;
    return WaveState(std::move(deta), std::move(dv), s.frame);
}

VectorField to_theta_frame_small(const VectorField& v, double eps, double theta) {
    VectorField out = v;
    out += (eps / 2.0 * (1.0 - theta * theta)) * fourier_laplacian(v);
    return out;
}

VectorField from_theta_frame_small(const VectorField& vtheta, double eps,
                                   double theta) {
    VectorField out = vtheta;
    out += (eps / 2.0 * (theta * theta - 1.0)) * fourier_laplacian(vtheta);
    return out;
}

VectorField symmetrize_small(const VectorField& v, const ScalarField& eta,
                             const ScalarField& b, double eps) {
    VectorField out = v;
    out += (eps / 2.0) * product(eta - b, v);
    return out;
}

VectorField unsymmetrize_small(const VectorField& vt, const ScalarField& eta,
                               const ScalarField& b, double eps) {
    VectorField out = vt;
    out -= (eps / 2.0) * product(eta - b, vt);
    return out;
}

VectorField symmetrize_strong(const VectorField& v, const ScalarField& eta,
                              const Bathymetry& bath, double eps) {
    const ScalarField sqrt_h =
        pointwise_map(bath.h, [](double x) { return std::sqrt(x); });
    const ScalarField inv_sqrt_h =
        pointwise_map(bath.h, [](double x) { return 1.0 / std::sqrt(x); });
    VectorField out = product(sqrt_h, v);
    out += (eps / 2.0) * product(product(eta, inv_sqrt_h), v);
    return out;
}

VectorField unsymmetrize_strong(const VectorField& vt, const ScalarField& eta,
                                const Bathymetry& bath, double eps) {
    const ScalarField inv_sqrt_h =
        pointwise_map(bath.h, [](double x) { return 1.0 / std::sqrt(x); });
    const ScalarField inv_h_sqrt_h =
        pointwise_map(bath.h, [](double x) { return 1.0 / (x * std::sqrt(x)); });
    VectorField out = product(inv_sqrt_h, vt);
    out -= (eps / 2.0) * product(product(eta, inv_h_sqrt_h), vt);
    return out;
}

namespace {

VectorField theta_strong_correction(const VectorField& v, const Bathymetry& bath,
                                    double theta) {
    const ScalarField h2 = product(bath.h, bath.h);
    VectorField p = theta * fourier_grad(product(h2, fourier_div(v)));
    p += fourier_grad(fourier_div(product(h2, v)));
    return (theta - 1.0) * p;
}

}  // namespace

VectorField to_theta_frame_strong(const VectorField& v, const Bathymetry& bath,
                                  double eps, double theta) {
    VectorField out = v;
    out -= (eps / 2.0) * theta_strong_correction(v, bath, theta);
    return out;
}

VectorField from_theta_frame_strong(const VectorField& vtheta,
                                    const Bathymetry& bath, double eps,
                                    double theta) {
    VectorField out = vtheta;
    out += (eps / 2.0) * theta_strong_correction(vtheta, bath, theta);
    return out;
}

}  // namespace bt
