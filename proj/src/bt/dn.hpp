#ifndef BT_DN_HPP
#define BT_DN_HPP

#include <array>
#include <iosfwd>
#include <vector>

#include "bt/grid.hpp"

namespace bt {

enum class Regime { SmallVariation, StrongVariation };

// beta = eps in the small-variation regime, beta = 1 in the strong one.
double regime_beta(Regime regime, double eps);

struct RegimeParams {
    double eps;
    Regime regime;
    double h_min = 0.05;

    RegimeParams(double eps_, Regime regime_, double h_min_ = 0.05);
};

// Coefficient matrix of the strip-transformed elliptic problem, one
// symmetric (d+1)x(d+1) matrix per strip node. d = 1 only: entries
// (pxx, pxz; pxz, pzz).
struct EllipticCoeffs {
    StripGrid strip;
    std::vector<double> pxx, pxz, pzz;  // z-major, strip.index(j, i)
};

// Assembles the transformed coefficient matrix for the active regime.
// Throws if the depth condition 1 + eps*eta - beta*b >= h_min fails,
// naming the worst node.
EllipticCoeffs assemble_coeffs(const ScalarField& eta, const ScalarField& b,
                               const RegimeParams& params, const StripGrid& strip);

// Coercivity constant c0(x, y) with x = |eta|_{W^{1,inf}}, y = |B|_{W^{1,inf}}
// (the boundaries of the transformed problem), p the diagonal of the
// untransformed matrix P. The third min-argument is dropped when x + y = 0.
double coercivity_c0(double x, double y, double h_min, double h0, int d,
                     const std::vector<double>& p);

// Exact Dirichlet-Neumann value: solves the transformed elliptic problem on
// the strip (Fourier collocation in X, second-order finite differences in z,
// sparse direct solve) and returns dz(u)/(1 + eps*eta - beta*b) at z = 0.
// d = 1 only.
ScalarField exact_dn(const ScalarField& f, const ScalarField& eta,
                     const ScalarField& b, const RegimeParams& params,
                     const StripGrid& strip);

// Second-order asymptotic expansions eps*Z1 + eps^2*Z2 of the DN operator.
// Small regime: Z1 = -Lap f, Z2 = -(1/3)Lap^2 f - (eta-b)Lap f + grad b . grad f.
ScalarField dn_expansion_small(const ScalarField& f, const ScalarField& eta,
                               const ScalarField& b, double eps);
// Strong regime: Z1 = -div((1-b) grad f),
// Z2 = (1/2) div((1/3)(1-b)^3 grad Lap f - (1-b)^2 grad div((1-b) grad f))
//      - eta Lap f.
ScalarField dn_expansion_strong(const ScalarField& f, const ScalarField& eta,
                                const ScalarField& b, double eps);

// Truncations at first order (eps*Z1 only), used by the slope-control studies.
ScalarField dn_expansion_small_order1(const ScalarField& f, const ScalarField& eta,
                                      const ScalarField& b, double eps);
ScalarField dn_expansion_strong_order1(const ScalarField& f, const ScalarField& eta,
                                       const ScalarField& b, double eps);

// Closed-form profiles u0, u1, u2 of the approximate strip solution
// u0 + eps*u1 + eps^2*u2, per regime.
struct WkbProfiles {
    StripGrid strip;
    std::vector<double> u0, u1, u2;  // z-major
};

WkbProfiles wkb_profiles(const ScalarField& f, const ScalarField& eta,
                         const ScalarField& b, const RegimeParams& params,
                         const StripGrid& strip);

// Discrete residuals of the combined profile u0 + eps*u1 + eps^2*u2 in the
// strip equation (interior) and the conormal bottom condition, L2-normed.
struct WkbResidual {
    double interior;
    double bottom;
};
WkbResidual wkb_residual(const ScalarField& f, const ScalarField& eta,
                         const ScalarField& b, const RegimeParams& params,
                         const StripGrid& strip);

struct StudyRow {
    double eps;
    double err_l2;
    double err_max;
};

struct StudyReport {
    std::vector<StudyRow> rows;
    double slope_l2 = 0.0;
    double slope_max = 0.0;

    // CSV: header `epsilon,err_l2,err_max`, one row per epsilon, footer row
    // `slope,<slope_l2>,<slope_max>`.
    void write_csv(std::ostream& os) const;
};

// Least-squares slope of log(err) against log(eps).
double fitted_slope(const std::vector<double>& eps, const std::vector<double>& err);

// Sweeps eps over the given list, comparing exact_dn against the active
// regime's expansion (order 2 by default, order 1 when expansion_order == 1).
StudyReport dn_convergence_study(const ScalarField& eta, const ScalarField& b,
                                 const ScalarField& f, Regime regime,
                                 const std::vector<double>& eps_list, int nz,
                                 int expansion_order = 2);

}  // namespace bt

#endif
