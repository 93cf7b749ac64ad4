#ifndef BT_MODELS_HPP
#define BT_MODELS_HPP

#include "bt/coeffs.hpp"
#include "bt/dn.hpp"
#include "bt/grid.hpp"

namespace bt {

// Velocity-variable frames. Changes of variables move between them; every
// model RHS checks the tag so frame misuse fails loudly instead of silently
// producing O(eps) garbage.
enum class Frame { SurfaceVelocity, ThetaVelocity, Symmetrized, Potential };

const char* frame_name(Frame f);

struct WaveState {
    ScalarField eta;
    VectorField u;
    Frame frame = Frame::SurfaceVelocity;

    WaveState() = default;
    WaveState(ScalarField eta_, VectorField u_, Frame frame_);
};

// Bottom profile b with the cached still-water depth h = 1 - b.
// Construction enforces h >= h_min everywhere.
struct Bathymetry {
    ScalarField b;
    ScalarField h;
    Regime regime;
    double h_min;

    Bathymetry(ScalarField b_, Regime regime_, double h_min_ = 0.05);

    // sup-norm of |grad h| over the grid (spectral gradient)
    double grad_h_sup() const;
};

// Time derivatives of (u, eta); returned in the same frame as the input
// state so RK stages compose naturally.

// dt V + grad eta + (eps/2) grad|V|^2 = 0
// dt eta + div V + eps[div((eta-b)V) + (1/3) Lap div V] = 0
WaveState rhs_b1(const WaveState& s, const Bathymetry& bath, double eps);

// dt V as above;
// dt eta + div(hV) + eps[div(eta V) - (1/2)div((h^3/3) grad div V
//                                              - h^2 grad div(hV))] = 0
WaveState rhs_b2(const WaveState& s, const Bathymetry& bath, double eps);

// (1-eps a2 Lap) dt V + grad eta + eps[(1/2)grad|V|^2 + a1 Lap grad eta] = 0
// (1-eps a4 Lap) dt eta + div V + eps[div((eta-b)V) + a3 Lap div V] = 0
WaveState rhs_s1(const WaveState& s, const Bathymetry& bath, double eps,
                 const SmallCoeffs& c);

// Symmetric-nonlinearity variant of rhs_s1 in the symmetrized frame.
WaveState rhs_t1(const WaveState& s, const Bathymetry& bath, double eps,
                 const SmallCoeffs& c);

// Strong-regime symmetrized order-one system (no free parameters).
WaveState rhs_tb(const WaveState& s, const Bathymetry& bath, double eps);

// Strong-regime family with mass operators (1-(eps/2)P_h^{1,2}) inverted
// iteratively (relative residual 1e-10). Refuses eps above the positivity
// bounds.
WaveState rhs_s_strong(const WaveState& s, const Bathymetry& bath, double eps,
                       const StrongCoeffs& sc);

// Mass-operator applications, exposed for the positivity and spectral studies.
VectorField apply_mass_v_strong(const VectorField& v, const Bathymetry& bath,
                                double eps, const StrongCoeffs& sc);
ScalarField apply_mass_eta_strong(const ScalarField& eta, const Bathymetry& bath,
                                  double eps, const StrongCoeffs& sc);

// Changes of variables. Forward maps are the exact displayed operators; the
// inverse maps are the order-eps^2 approximate inverses, as in the source
// derivations.
VectorField to_theta_frame_small(const VectorField& v, double eps, double theta);
VectorField from_theta_frame_small(const VectorField& vtheta, double eps,
                                   double theta);

VectorField symmetrize_small(const VectorField& v, const ScalarField& eta,
                             const ScalarField& b, double eps);
VectorField unsymmetrize_small(const VectorField& vt, const ScalarField& eta,
                               const ScalarField& b, double eps);

VectorField symmetrize_strong(const VectorField& v, const ScalarField& eta,
                              const Bathymetry& bath, double eps);
VectorField unsymmetrize_strong(const VectorField& vt, const ScalarField& eta,
                                const Bathymetry& bath, double eps);

VectorField to_theta_frame_strong(const VectorField& v, const Bathymetry& bath,
                                  double eps, double theta);
VectorField from_theta_frame_strong(const VectorField& vtheta,
                                    const Bathymetry& bath, double eps,
                                    double theta);

}  // namespace bt

#endif
