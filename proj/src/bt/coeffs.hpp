#ifndef BT_COEFFS_HPP
#define BT_COEFFS_HPP

#include <array>
#include <vector>

namespace bt {

// Small-variation model family: parameters (theta, lambda, mu) and the
// induced dispersive coefficients
//   a1 = -mu (theta^2-1)/2        a2 = (mu-1)(theta^2-1)/2
//   a3 = lambda (theta^2/2-1/6)   a4 = (1-lambda)(theta^2/2-1/6)
struct SmallCoeffs {
    double theta, lambda, mu;
    double a1, a2, a3, a4;
};

// Strong-variation model family: parameters (theta, lambda1, lambda2, mu)
// and the induced coefficients b1..b4 (surface-equation side) and c1..c4
// (mass-equation side).
struct StrongCoeffs {
    double theta, lambda1, lambda2, mu;
    std::array<double, 4> b;
    std::array<double, 4> c;
};

SmallCoeffs coeffs_small(double theta, double lambda, double mu);
StrongCoeffs coeffs_strong(double theta, double lambda1, double lambda2, double mu);

// Fully symmetric small-regime members: a1 == a3 (tol 1e-12), a2 >= 0, a4 >= 0.
bool is_symmetric_small(const SmallCoeffs& c);

// Residual of the strong-regime symmetry system:
//   (b1 - c1, b2 + c2, b3 - c3, b4 + c4)
std::array<double, 4> symmetry_residual_strong(double theta, double lambda1,
                                               double lambda2, double mu);

struct SymmetricRootResult {
    StrongCoeffs coeffs;
    std::array<double, 4> residual;
    int iterations;
    bool theta_in_range;  // converged root has theta in [0,1]
};

// Newton iteration (finite-difference Jacobian, step 1e-7, tol 1e-12,
// <= 50 iterations) on symmetry_residual_strong. Throws on
// non-convergence; a converged root with theta outside [0,1] is returned
// flagged, never silently accepted.
SymmetricRootResult solve_symmetric_strong(const std::array<double, 4>& guess);

// Published approximation of the symmetric root, used as default guess.
inline constexpr std::array<double, 4> kSymmetricRootReference{0.6318, -0.3416,
                                                               -2.8209, -3.1157};

struct EpsilonBounds {
    double bound1;        // positivity of the velocity-equation mass operator
    double bound2;        // positivity of the mass-equation mass operator
    bool bound2_applies;  // requires theta^2 > 1/3
};

// Largest epsilon for which the strong-regime mass operators stay positive:
//   eps <= 2(1+theta)(1-lambda1) / ((1-theta)(1-lambda2)^2 |grad h|^2)
//   eps <= 8(theta^2-1/3) / ((1-mu)((3/2)theta^2-7/6)^2 |grad h|^2)
// grad_h_norm == 0 gives unbounded (infinity) results.
EpsilonBounds epsilon_positivity_bounds(double theta, double lambda1, double lambda2,
                                        double mu, double grad_h_norm);

}  // namespace bt

#endif
