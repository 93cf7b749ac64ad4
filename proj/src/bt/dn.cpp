#include "bt/dn.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <cmath>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "bt/spectral.hpp"

namespace bt {

double regime_beta(Regime regime, double eps) {
    return regime == Regime::SmallVariation ? eps : 1.0;
}

RegimeParams::RegimeParams(double eps_, Regime regime_, double h_min_)
    : eps(eps_), regime(regime_), h_min(h_min_) {
    if (eps <= 0.0 || eps >= 1.0)
        throw std::invalid_argument("RegimeParams: eps must lie in (0,1)");
    if (h_min <= 0.0)
        throw std::invalid_argument("RegimeParams: h_min must be positive");
}

namespace {

void require_1d(const Grid& g, const char* who) {
    if (g.dim != 1)
        throw std::invalid_argument(std::string(who) +
                                    ": the strip solver supports d = 1 only");
}

// Depth delta = 1 + eps*eta - beta*b at every transverse node; throws with
// the worst node on violation.
std::vector<double> depth_or_throw(const ScalarField& eta, const ScalarField& b,
                                   const RegimeParams& params) {
    const double beta = regime_beta(params.regime, params.eps);
    const int n = eta.grid.size();
    std::vector<double> delta(n);
    double worst = 1e300;
    int worst_i = -1;
    for (int i = 0; i < n; ++i) {
        delta[i] = 1.0 + params.eps * eta.v[i] - beta * b.v[i];
        if (delta[i] < worst) {
            worst = delta[i];
            worst_i = i;
        }
    }
    if (worst < params.h_min) {
        std::ostringstream os;
        os << "depth condition violated: 1 + eps*eta - beta*b = " << worst
           << " < h_min = " << params.h_min << " at node " << worst_i << " (x = "
           << eta.grid.x(worst_i) << ")";
        throw std::runtime_error(os.str());
    }
    return delta;
}

}  // namespace

EllipticCoeffs assemble_coeffs(const ScalarField& eta, const ScalarField& b,
                               const RegimeParams& params, const StripGrid& strip) {
    require_1d(strip.grid, "assemble_coeffs");
    const double eps = params.eps;
    const double beta = regime_beta(params.regime, eps);
    const std::vector<double> delta = depth_or_throw(eta, b, params);

    // Surface and bottom gradients of the transformed problem, computed
    // spectrally from the samples.
    const ScalarField deta = derivative(eta, 0);
    const ScalarField db = derivative(b, 0);

    EllipticCoeffs co;
    co.strip = strip;
    const int n = strip.grid.size();
    co.pxx.resize(strip.size());
    co.pxz.resize(strip.size());
    co.pzz.resize(strip.size());
    for (int j = 0; j < strip.nz; ++j) {
        const double z = strip.z(j);
        for (int i = 0; i < n; ++i) {
            // U = -(z+1) grad(eps*eta) + z grad(beta*b)
            const double u = -(z + 1.0) * eps * deta.v[i] + z * beta * db.v[i];
            const int id = strip.index(j, i);
            co.pxx[id] = eps * delta[i];
            co.pxz[id] = eps * u;
            co.pzz[id] = (1.0 + eps * u * u) / delta[i];
        }
    }
    return co;
}

double coercivity_c0(double x, double y, double h_min, double h0, int d,
                     const std::vector<double>& p) {
    if (h_min <= 0.0) throw std::invalid_argument("coercivity_c0: h_min <= 0");
    if (static_cast<int>(p.size()) != d + 1)
        throw std::invalid_argument("coercivity_c0: need d+1 diagonal entries");
    for (double pi : p)
        if (pi <= 0.0) throw std::invalid_argument("coercivity_c0: p_i <= 0");

    double m = std::min(1.0, 1.0 / (h_min * (x + h0 + y)));
    if (x + y > 0.0) {
        double ratio = 1e300;
        for (int i = 0; i < d; ++i) ratio = std::min(ratio, p[d] / p[i]);
        m = std::min(m, ratio / ((x + y) * (x + y)));
    }
    return h_min / ((d + 1) * (d + 1)) * m;
}

namespace {

// Spectral differentiation matrix, built by transforming unit impulses so
// it is exactly consistent with the FFT path (Nyquist zeroed).
Eigen::MatrixXd spectral_diff_matrix(const Grid& g) {
    const int n = g.size();
    Eigen::MatrixXd d(n, n);
    ScalarField e(g);
    for (int c = 0; c < n; ++c) {
        std::fill(e.v.begin(), e.v.end(), 0.0);
        e.v[c] = 1.0;
        const ScalarField de = derivative(e, 0);
        for (int r = 0; r < n; ++r) d(r, c) = de.v[r];
    }
    return d;
}

// Discretization of the transformed strip problem, d = 1. Unknowns are the
// layers j = 0..nz-2 (z-major); the top layer j = nz-1 carries the Dirichlet
// value f. The conormal bottom condition G = pxz*dx(u) + pzz*dz(u) = 0 at
// z = -1 is eliminated: dz(u)|_0 = -(pxz/pzz)*dx(u)|_0 and G_0 = 0.
struct StripSystem {
    int n, nz;
    Eigen::SparseMatrix<double> mat;
    Eigen::VectorXd rhs;

    StripSystem(const EllipticCoeffs& co, const ScalarField& f,
                const Eigen::MatrixXd& dx) {
        n = co.strip.grid.size();
        nz = co.strip.nz;
        const double dzi = 1.0 / (2.0 * co.strip.dz());
        const int rows = (nz - 1) * n;
        rhs = Eigen::VectorXd::Zero(rows);

        const Eigen::Map<const Eigen::VectorXd> fv(f.v.data(), n);

        auto diagv = [&](const std::vector<double>& w, int j) {
            return Eigen::Map<const Eigen::VectorXd>(w.data() + j * n, n);
        };

        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<size_t>(rows) * (5 * n + 8));

        // Per equation layer: source layer -> dense block, plus rhs.
        std::map<int, Eigen::MatrixXd> blocks;
        auto block = [&](int layer) -> Eigen::MatrixXd& {
            auto it = blocks.find(layer);
            if (it == blocks.end())
                it = blocks.emplace(layer, Eigen::MatrixXd::Zero(n, n)).first;
            return it->second;
        };
        Eigen::VectorXd rhs_layer(n);

        // Adds scale * M * u_layer, routing the known top layer to the rhs.
        auto add = [&](int layer, const Eigen::MatrixXd& m) {
            if (layer == nz - 1)
                rhs_layer -= m * fv;
            else
                block(layer) += m;
        };
        auto add_diag = [&](int layer, const Eigen::VectorXd& w) {
            if (layer == nz - 1)
                rhs_layer -= w.cwiseProduct(fv);
            else
                block(layer) += w.asDiagonal();
        };

        // G_s = pxz_s*dx(u_s) + pzz_s*dz(u_s) scaled by `scale`, as a linear
        // map of the layers. G_0 == 0 by the bottom condition.
        auto add_G = [&](double scale, int s) {
            if (s == 0) return;
            add(s, scale * diagv(co.pxz, s).asDiagonal() * dx);
            if (s == nz - 1) {
                // one-sided second-order dz at the surface
                add_diag(nz - 1, scale * dzi * 3.0 * diagv(co.pzz, s));
                add_diag(nz - 2, -scale * dzi * 4.0 * diagv(co.pzz, s));
                add_diag(nz - 3, scale * dzi * diagv(co.pzz, s));
            } else {
                add_diag(s + 1, scale * dzi * diagv(co.pzz, s));
                add_diag(s - 1, -scale * dzi * diagv(co.pzz, s));
            }
        };

        for (int j = 0; j <= nz - 2; ++j) {
            blocks.clear();
            rhs_layer.setZero();

            // dx(pxx*dx(u)) on layer j
            add(j, dx * diagv(co.pxx, j).asDiagonal() * dx);

            // dx(pxz*dz(u)) on layer j
            if (j == 0) {
                const Eigen::VectorXd w =
                    -diagv(co.pxz, 0).array().square() / diagv(co.pzz, 0).array();
                add(0, dx * w.asDiagonal() * dx);
            } else {
                add(j + 1, dzi * dx * diagv(co.pxz, j).asDiagonal());
                add(j - 1, -dzi * dx * diagv(co.pxz, j).asDiagonal());
            }

            // dz(G)
            if (j == 0) {
                add_G(4.0 * dzi, 1);
                add_G(-dzi, 2);
            } else {
                add_G(dzi, j + 1);
                add_G(-dzi, j - 1);
            }

            for (const auto& [layer, m] : blocks)
                for (int c = 0; c < n; ++c)
                    for (int r = 0; r < n; ++r)
                        if (m(r, c) != 0.0)
                            trip.emplace_back(j * n + r, layer * n + c, m(r, c));
            rhs.segment(j * n, n) += rhs_layer;
        }

        mat.resize(rows, rows);
        mat.setFromTriplets(trip.begin(), trip.end());
    }
};

}  // namespace

ScalarField exact_dn(const ScalarField& f, const ScalarField& eta,
                     const ScalarField& b, const RegimeParams& params,
                     const StripGrid& strip) {
    require_1d(strip.grid, "exact_dn");
    const EllipticCoeffs co = assemble_coeffs(eta, b, params, strip);
    const Eigen::MatrixXd dx = spectral_diff_matrix(strip.grid);
    StripSystem sys(co, f, dx);

    // natural ordering: the z-major layout is block-banded, and keeping it
    // confines LU fill to the band (COLAMD destroys the band and is ~30x
    // slower here)
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu;
    lu.compute(sys.mat);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("exact_dn: sparse factorization failed");
    const Eigen::VectorXd u = lu.solve(sys.rhs);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("exact_dn: sparse solve failed");
    const double residual = (sys.mat * u - sys.rhs).norm();
    if (!std::isfinite(residual) || residual > 1e-8 * (1.0 + sys.rhs.norm()))
        throw std::runtime_error("exact_dn: solver residual too large: " +
                                 std::to_string(residual));

    // dz(u)/delta at z = 0, one-sided second order using the Dirichlet layer.
    const int n = strip.grid.size();
    const int nz = strip.nz;
    const double dzi = 1.0 / (2.0 * strip.dz());
    const std::vector<double> delta = depth_or_throw(eta, b, params);
    ScalarField out(strip.grid);
    for (int i = 0; i < n; ++i) {
        const double u1 = u[(nz - 2) * n + i];
        const double u2 = u[(nz - 3) * n + i];
        const double dzu = dzi * (3.0 * f.v[i] - 4.0 * u1 + u2);
        out.v[i] = dzu / delta[i];
    }
    return out;
}

ScalarField dn_expansion_small(const ScalarField& f, const ScalarField& eta,
                               const ScalarField& b, double eps) {
    const ScalarField lf = fourier_laplacian(f);
    const ScalarField z1 = -1.0 * lf;
    ScalarField z2 = -1.0 / 3.0 * fourier_laplacian(lf);
    z2 -= product(eta - b, lf);
    z2 += dot(fourier_grad(b), fourier_grad(f));
    return eps * z1 + (eps * eps) * z2;
}

ScalarField dn_expansion_strong(const ScalarField& f, const ScalarField& eta,
                                const ScalarField& b, double eps) {
    ScalarField h(b.grid);
    for (int i = 0; i < b.grid.size(); ++i) h.v[i] = 1.0 - b.v[i];
    const ScalarField h2 = product(h, h);
    const ScalarField h3 = product(h2, h);

    const VectorField gf = fourier_grad(f);
    const ScalarField lf = fourier_laplacian(f);
    const ScalarField div_h_gf = fourier_div(product(h, gf));

    const ScalarField z1 = -1.0 * div_h_gf;

    VectorField inner = product(h3, fourier_grad(lf));
    inner *= 1.0 / 3.0;
    inner -= product(h2, fourier_grad(div_h_gf));
    ScalarField z2 = 0.5 * fourier_div(inner);
    z2 -= product(eta, lf);

    return eps * z1 + (eps * eps) * z2;
}

ScalarField dn_expansion_small_order1(const ScalarField& f, const ScalarField&,
                                      const ScalarField&, double eps) {
    return (-eps) * fourier_laplacian(f);
}

ScalarField dn_expansion_strong_order1(const ScalarField& f, const ScalarField&,
                                       const ScalarField& b, double eps) {
    ScalarField h(b.grid);
    for (int i = 0; i < b.grid.size(); ++i) h.v[i] = 1.0 - b.v[i];
    return (-eps) * fourier_div(product(h, fourier_grad(f)));
}

WkbProfiles wkb_profiles(const ScalarField& f, const ScalarField& eta,
                         const ScalarField& b, const RegimeParams& params,
                         const StripGrid& strip) {
    require_1d(strip.grid, "wkb_profiles");
    const int n = strip.grid.size();
    WkbProfiles w;
    w.strip = strip;
    w.u0.resize(strip.size());
    w.u1.resize(strip.size());
    w.u2.resize(strip.size());

    const ScalarField lf = fourier_laplacian(f);
    const ScalarField llf = fourier_laplacian(lf);
    const VectorField gf = fourier_grad(f);
    const ScalarField gb_gf = dot(fourier_grad(b), fourier_grad(f));

    if (params.regime == Regime::SmallVariation) {
        const ScalarField emb = eta - b;
        for (int j = 0; j < strip.nz; ++j) {
            const double z = strip.z(j);
            const double zp = z + 1.0;
            for (int i = 0; i < n; ++i) {
                const int id = strip.index(j, i);
                w.u0[id] = f.v[i];
                w.u1[id] = (0.5 - 0.5 * zp * zp) * lf.v[i];
                w.u2[id] = (zp * zp * zp * zp / 24.0 - zp * zp / 4.0 + 5.0 / 24.0) *
                               llf.v[i] +
                           (1.0 - zp * zp) * emb.v[i] * lf.v[i] + z * gb_gf.v[i];
            }
        }
    } else {
        ScalarField h(b.grid);
        for (int i = 0; i < n; ++i) h.v[i] = 1.0 - b.v[i];
        const ScalarField h2 = product(h, h);
        const ScalarField h3 = product(h2, h);
        const ScalarField h4 = product(h2, h2);
        const ScalarField div_h_gf = fourier_div(product(h, fourier_grad(f)));
        const ScalarField lap_div = fourier_laplacian(div_h_gf);

        VectorField inner = product(h3, fourier_grad(lf));
        inner *= 1.0 / 3.0;
        inner -= product(h2, fourier_grad(div_h_gf));
        const ScalarField half_div_inner = fourier_div(inner);  // times h/2 below

        for (int j = 0; j < strip.nz; ++j) {
            const double z = strip.z(j);
            const double zp = z + 1.0;
            for (int i = 0; i < n; ++i) {
                const int id = strip.index(j, i);
                const double hi = h.v[i];
                w.u0[id] = f.v[i];
                w.u1[id] = 0.5 * h2.v[i] * (1.0 - zp * zp) * lf.v[i] +
                           z * hi * gb_gf.v[i];
                w.u2[id] = h4.v[i] / 24.0 * llf.v[i] * z * z * z * z +
                           h3.v[i] / 6.0 * lap_div.v[i] * z * z * z -
                           hi * eta.v[i] * lf.v[i] * z * z +
                           (0.5 * hi * half_div_inner.v[i] -
                            eta.v[i] * (2.0 * hi * lf.v[i] + gb_gf.v[i])) *
                               z;
            }
        }
    }
    return w;
}

WkbResidual wkb_residual(const ScalarField& f, const ScalarField& eta,
                         const ScalarField& b, const RegimeParams& params,
                         const StripGrid& strip) {
    const WkbProfiles w = wkb_profiles(f, eta, b, params, strip);
    const EllipticCoeffs co = assemble_coeffs(eta, b, params, strip);
    const Eigen::MatrixXd dx = spectral_diff_matrix(strip.grid);
    const int n = strip.grid.size();
    const int nz = strip.nz;
    const double eps = params.eps;
    const double dz = strip.dz();

    // combined profile on the strip
    Eigen::MatrixXd u(nz, n);
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < n; ++i) {
            const int id = strip.index(j, i);
            u(j, i) = w.u0[id] + eps * w.u1[id] + eps * eps * w.u2[id];
        }

    // flux components at every node, centered dz in the interior and
    // one-sided second order at the boundaries
    Eigen::MatrixXd ux(nz, n), uz(nz, n);
    for (int j = 0; j < nz; ++j) ux.row(j) = (dx * u.row(j).transpose()).transpose();
    for (int j = 1; j < nz - 1; ++j) uz.row(j) = (u.row(j + 1) - u.row(j - 1)) / (2 * dz);
    uz.row(0) = (-3.0 * u.row(0) + 4.0 * u.row(1) - u.row(2)) / (2 * dz);
    uz.row(nz - 1) =
        (3.0 * u.row(nz - 1) - 4.0 * u.row(nz - 2) + u.row(nz - 3)) / (2 * dz);

    Eigen::MatrixXd fx(nz, n), fz(nz, n);
    for (int j = 0; j < nz; ++j)
        for (int i = 0; i < n; ++i) {
            const int id = strip.index(j, i);
            fx(j, i) = co.pxx[id] * ux(j, i) + co.pxz[id] * uz(j, i);
            fz(j, i) = co.pxz[id] * ux(j, i) + co.pzz[id] * uz(j, i);
        }

    // interior residual of div(P grad u) over interior layers
    double sum = 0.0;
    int count = 0;
    for (int j = 1; j < nz - 1; ++j) {
        Eigen::VectorXd dfx = dx * fx.row(j).transpose();
        for (int i = 0; i < n; ++i) {
            const double dfz = (fz(j + 1, i) - fz(j - 1, i)) / (2 * dz);
            const double r = dfx[i] + dfz;
            sum += r * r;
            ++count;
        }
    }

    WkbResidual res;
    res.interior = std::sqrt(sum / count);
    double bsum = 0.0;
    for (int i = 0; i < n; ++i) bsum += fz(0, i) * fz(0, i);
    res.bottom = std::sqrt(bsum / n);
    return res;
}

double fitted_slope(const std::vector<double>& eps, const std::vector<double>& err) {
    if (eps.size() != err.size() || eps.size() < 2)
        throw std::invalid_argument("fitted_slope: need >= 2 matching samples");
    const int n = static_cast<int>(eps.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::log(eps[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void StudyReport::write_csv(std::ostream& os) const {
    os << "epsilon,err_l2,err_max\n";
    os.precision(16);
    for (const auto& r : rows)
        os << r.eps << ',' << r.err_l2 << ',' << r.err_max << '\n';
    os << "slope," << slope_l2 << ',' << slope_max << '\n';
}

StudyReport dn_convergence_study(const ScalarField& eta, const ScalarField& b,
                                 const ScalarField& f, Regime regime,
                                 const std::vector<double>& eps_list, int nz,
                                 int expansion_order) {
    if (eps_list.size() < 4)
        throw std::invalid_argument("dn_convergence_study: need >= 4 eps values");
    const StripGrid strip(eta.grid, nz);
    StudyReport rep;
    std::vector<double> el2, emax;
    for (double eps : eps_list) {
        const RegimeParams params(eps, regime);
        const ScalarField zd = exact_dn(f, eta, b, params, strip);
        ScalarField expn =
            regime == Regime::SmallVariation
                ? (expansion_order == 1 ? dn_expansion_small_order1(f, eta, b, eps)
                                        : dn_expansion_small(f, eta, b, eps))
                : (expansion_order == 1 ? dn_expansion_strong_order1(f, eta, b, eps)
                                        : dn_expansion_strong(f, eta, b, eps));
        const ScalarField diff = zd - expn;
        rep.rows.push_back({eps, l2_norm(diff), max_norm(diff)});
        el2.push_back(l2_norm(diff));
        emax.push_back(max_norm(diff));
    }
    rep.slope_l2 = fitted_slope(eps_list, el2);
    rep.slope_max = fitted_slope(eps_list, emax);
    return rep;
}

}  // namespace bt
